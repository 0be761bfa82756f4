#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "veriloop/errors.hpp"

namespace veriloop {

using cplx = std::complex<double>;

// Eve-side operators are small; 64 is generous for every construction here
// and keeps the self-contained eigensolver comfortably fast.
inline constexpr int kMaxEveDim = 64;

// Dense complex matrix, row-major. Used for the Eve-side blocks of
// classical-quantum states and for small unitaries (basis changes).
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(int dim) : dim_(dim), m_(static_cast<std::size_t>(dim) * dim) {
        require(dim >= 1 && dim <= kMaxEveDim, errc::cap_exceeded,
                "matrix dimension must be in [1," + std::to_string(kMaxEveDim) + "]");
    }

    static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

    static ComplexMatrix identity(int dim) {
        ComplexMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim(); ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const noexcept { return dim_; }

    cplx& at(int r, int c) { return m_[static_cast<std::size_t>(r) * dim_ + c]; }
    const cplx& at(int r, int c) const { return m_[static_cast<std::size_t>(r) * dim_ + c]; }

    double trace_real() const {
        double t = 0;
        for (int i = 0; i < dim_; ++i) t += at(i, i).real();
        return t;
    }

    double max_abs() const {
        double m = 0;
        for (const cplx& z : m_) m = std::max(m, std::abs(z));
        return m;
    }

    // max |a_ij - conj(a_ji)|; zero for exactly Hermitian input.
    double hermiticity_residual() const {
        double r = 0;
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                r = std::max(r, std::abs(at(i, j) - std::conj(at(j, i))));
        return r;
    }

    // max |a_ij| over i != j.
    double offdiagonal_max() const {
        double r = 0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (i != j) r = std::max(r, std::abs(at(i, j)));
        return r;
    }

    std::vector<double> diagonal_real() const {
        std::vector<double> d(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) d[static_cast<std::size_t>(i)] = at(i, i).real();
        return d;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require(o.dim_ == dim_, errc::shape_mismatch, "matrix dimensions differ");
        for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
        return *this;
    }

    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
        require(a.dim_ == b.dim_, errc::shape_mismatch, "matrix dimensions differ");
        ComplexMatrix r(a.dim_);
        for (std::size_t i = 0; i < a.m_.size(); ++i) r.m_[i] = a.m_[i] - b.m_[i];
        return r;
    }

    ComplexMatrix scaled(double f) const {
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < m_.size(); ++i) r.m_[i] = m_[i] * f;
        return r;
    }

    // conj(U)^T * this * U
    ComplexMatrix conjugated_by(const ComplexMatrix& u) const {
        require(u.dim_ == dim_, errc::shape_mismatch, "basis dimension differs");
        ComplexMatrix tmp(dim_), out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                cplx s = 0;
                for (int k = 0; k < dim_; ++k) s += at(i, k) * u.at(k, j);
                tmp.at(i, j) = s;
            }
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                cplx s = 0;
                for (int k = 0; k < dim_; ++k) s += std::conj(u.at(k, i)) * tmp.at(k, j);
                out.at(i, j) = s;
            }
        return out;
    }

    double max_entry_difference(const ComplexMatrix& o) const {
        require(o.dim_ == dim_, errc::shape_mismatch, "matrix dimensions differ");
        double r = 0;
        for (std::size_t i = 0; i < m_.size(); ++i) r = std::max(r, std::abs(m_[i] - o.m_[i]));
        return r;
    }

private:
    int dim_ = 0;
    std::vector<cplx> m_;
};

struct SpectrumResult {
    std::vector<double> eigenvalues;  // sorted descending
    double residual = 0;              // max off-diagonal magnitude after the sweeps
};

namespace detail {

inline constexpr double kJacobiTarget = 1e-13;  // stop threshold per sweep check
inline constexpr int kJacobiMaxSweeps = 100;

}  // namespace detail

// Cyclic complex Jacobi eigensolver for Hermitian matrices of dim <= 64.
// The input is symmetrized first; convergence is declared once the largest
// off-diagonal magnitude falls below 1e-13 (well inside the 1e-12 residual
// contract). Deterministic: fixed sweep order, no randomness.
inline SpectrumResult hermitian_eigenvalues(const ComplexMatrix& block) {
    const int n = block.dim();
    require(n >= 1, errc::invalid_argument, "empty matrix");

    ComplexMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a.at(i, j) = 0.5 * (block.at(i, j) + std::conj(block.at(j, i)));

    double off = a.offdiagonal_max();
    int sweep = 0;
    while (off > detail::kJacobiTarget) {
        if (sweep++ >= detail::kJacobiMaxSweeps)
            fail(errc::no_convergence, "Jacobi sweep limit exceeded (residual " +
                                           std::to_string(off) + ")");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a.at(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                // Phase factor turning the (p,q) block real, then a standard
                // real rotation zeroing it.
                const cplx phase = apq / g;  // a_pq = g * phase
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                const double theta = (aqq - app) / (2.0 * g);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                     : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // U: u_pp = c, u_pq = s, u_qp = -s*conj(phase), u_qq = c*conj(phase)
                for (int k = 0; k < n; ++k) {
                    const cplx akp = a.at(k, p);
                    const cplx akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * std::conj(phase) * akq;
                    a.at(k, q) = s * akp + c * std::conj(phase) * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a.at(p, k);
                    const cplx aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * phase * aqk;
                    a.at(q, k) = s * apk + c * phase * aqk;
                }
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                a.at(p, p) = a.at(p, p).real();
                a.at(q, q) = a.at(q, q).real();
            }
        }
        off = a.offdiagonal_max();
    }

    SpectrumResult r;
    r.residual = off;
    r.eigenvalues = a.diagonal_real();
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), std::greater<>());
    return r;
}

// Trace norm in the convention used throughout this project:
//
//     ||sigma||_1 := (1/2) Sum_i |lambda_i|
//
// NOTE the factor 1/2 is part of the norm itself (not applied separately at
// call sites). Every distance reported by this library uses this convention,
// so a pair of orthogonal unit-trace states has trace distance 1.
inline double trace_norm(const ComplexMatrix& block) {
    if (block.max_abs() == 0.0) return 0.0;
    SpectrumResult s = hermitian_eigenvalues(block);
    double sum = 0;
    for (double lam : s.eigenvalues) sum += std::abs(lam);
    return 0.5 * sum;
}

inline double min_eigenvalue(const ComplexMatrix& block) {
    SpectrumResult s = hermitian_eigenvalues(block);
    return s.eigenvalues.back();
}

}  // namespace veriloop
