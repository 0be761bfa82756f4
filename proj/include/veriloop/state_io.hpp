#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "veriloop/cq_state.hpp"

namespace veriloop {

// State-file schema:
//
// {
//   "registers": [{"name": "A", "alphabet": ["00","01","10","11"]}, ...],
//   "eve_dim": d,
//   "terms": [{"assignment": ["00","10"], "block": [[[re,im],...],...]}, ...]
// }
//
// Terms are emitted in assignment order, so save(load(x)) is byte-stable and
// load(save(s)) is value-identical.

inline nlohmann::ordered_json state_to_json(const CqState& s) {
    nlohmann::ordered_json j;
    j["registers"] = nlohmann::ordered_json::array();
    for (const ClassicalRegister& r : s.registers())
        j["registers"].push_back({{"name", r.name()}, {"alphabet", r.alphabet()}});
    j["eve_dim"] = s.eve_dim();
    j["terms"] = nlohmann::ordered_json::array();
    s.for_each_term([&](const std::vector<int>& idx, const ComplexMatrix& block) {
        nlohmann::ordered_json t;
        t["assignment"] = s.symbols_of(idx);
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int r = 0; r < block.dim(); ++r) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int c = 0; c < block.dim(); ++c)
                row.push_back({block.at(r, c).real(), block.at(r, c).imag()});
            rows.push_back(std::move(row));
        }
        t["block"] = std::move(rows);
        j["terms"].push_back(std::move(t));
    });
    return j;
}

inline CqState state_from_json(const nlohmann::ordered_json& j, const StateTolerances& tol = {}) {
    require(j.contains("registers") && j.contains("eve_dim") && j.contains("terms"),
            errc::invalid_argument, "state file needs registers, eve_dim and terms");
    std::vector<ClassicalRegister> regs;
    for (const auto& r : j.at("registers"))
        regs.push_back(ClassicalRegister::make(r.at("name").get<std::string>(),
                                               r.at("alphabet").get<std::vector<std::string>>()));
    const int eve_dim = j.at("eve_dim").get<int>();
    require(eve_dim >= 1 && eve_dim <= kMaxEveDim, errc::cap_exceeded, "eve_dim out of range");

    std::vector<std::pair<Assignment, ComplexMatrix>> terms;
    for (const auto& t : j.at("terms")) {
        Assignment a = t.at("assignment").get<std::vector<std::string>>();
        const auto& rows = t.at("block");
        require(static_cast<int>(rows.size()) == eve_dim, errc::shape_mismatch,
                "block row count differs from eve_dim");
        ComplexMatrix block(eve_dim);
        for (int r = 0; r < eve_dim; ++r) {
            const auto& row = rows.at(static_cast<std::size_t>(r));
            require(static_cast<int>(row.size()) == eve_dim, errc::shape_mismatch,
                    "block is not square");
            for (int c = 0; c < eve_dim; ++c) {
                const auto& entry = row.at(static_cast<std::size_t>(c));
                require(entry.is_array() && entry.size() == 2, errc::invalid_argument,
                        "block entries must be [re, im] pairs");
                block.at(r, c) = cplx(entry.at(0).get<double>(), entry.at(1).get<double>());
            }
        }
        terms.emplace_back(std::move(a), std::move(block));
    }
    return CqState::build(std::move(regs), eve_dim, terms, tol);
}

inline void save_state(const CqState& s, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), errc::invalid_argument, "cannot open '" + path + "' for writing");
    out << state_to_json(s).dump(2) << '\n';
    require(out.good(), errc::invalid_argument, "write to '" + path + "' failed");
}

inline CqState load_state(const std::string& path, const StateTolerances& tol = {}) {
    std::ifstream in(path);
    require(in.good(), errc::invalid_argument, "cannot open '" + path + "'");
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::invalid_argument, "cannot parse '" + path + "': " + e.what());
    }
    return state_from_json(j, tol);
}

}  // namespace veriloop
