#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "carpetdim/carpet.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

// {"N":3,"M":8,"rows":[{"column":1,"fibers":[1,2,3,4,5]},...]} with 1-based
// indices throughout.
inline CarpetSpec carpet_from_json(const nlohmann::json& j) {
    try {
        int N = j.at("N").get<int>();
        int M = j.at("M").get<int>();
        std::vector<std::pair<int, std::vector<int>>> rows;
        for (const auto& row : j.at("rows"))
            rows.emplace_back(row.at("column").get<int>(),
                              row.at("fibers").get<std::vector<int>>());
        return CarpetSpec::create(N, M, std::move(rows));
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCarpet(std::string("bad carpet JSON: ") + e.what());
    }
}

inline nlohmann::json carpet_to_json(const CarpetSpec& spec) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < spec.num_rows(); ++r) {
        std::vector<int> fibers;
        for (int f = 0; f < spec.fiber_count(r); ++f) fibers.push_back(spec.fiber_value(r, f));
        rows.push_back({{"column", spec.column_value(r)}, {"fibers", fibers}});
    }
    return {{"N", spec.base_n()}, {"M", spec.base_m()}, {"rows", rows}};
}

inline CarpetSpec load_carpet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedCarpet("cannot open carpet file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCarpet(std::string("bad carpet JSON: ") + e.what());
    }
    return carpet_from_json(j);
}

inline void save_carpet(const CarpetSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MalformedCarpet("cannot open carpet file for writing: " + path);
    out << carpet_to_json(spec).dump(2) << "\n";
}

// {"weights":[...]} over the digit set in canonical order: rows sorted by
// column, fibers sorted within each row.
inline ProbVector load_prob_vector(const CarpetSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open probability vector file: " + path);
    nlohmann::json j;
    std::vector<double> w;
    try {
        in >> j;
        w = j.at("weights").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad probability vector JSON: ") + e.what());
    }
    return ProbVector::from_weights(spec, w);
}

}  // namespace carpetdim
