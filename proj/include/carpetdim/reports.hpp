#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/frontier.hpp"
#include "carpetdim/optimizer.hpp"
#include "carpetdim/parallel.hpp"
#include "carpetdim/schedule.hpp"

namespace carpetdim {

// all CLI numerics: 9 significant digits
inline std::string format_g9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string active_set_string(const DimBreakdown& b) {
    std::string s;
    for (int i : b.active_indices()) s += static_cast<char>('0' + i);
    return s;
}

struct SweepRow {
    double alpha = 0;
    double value = 0;
    DimBreakdown breakdown;
};

// Points run in parallel; row i belongs to alphas[i] regardless of which
// worker finished it.
inline std::vector<SweepRow> run_sweep(const CarpetSpec& spec, const DimParams& base,
                                       const std::vector<double>& alphas,
                                       const MaximizeOptions& opts = {}) {
    std::vector<SweepRow> rows(alphas.size());
    detail::parallel_for(alphas.size(), [&](std::size_t i) {
        DimParams p = base;
        p.alpha = alphas[i];
        auto res = maximize(spec, p, opts);
        rows[i] = {alphas[i], res.value, res.breakdown};
    });
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "alpha,dim,d1,d2,d3,d4,d5,d6,active_set\n";
    for (const auto& r : rows) {
        out << format_g9(r.alpha) << ',' << format_g9(r.value);
        for (double d : r.breakdown.d) out << ',' << format_g9(d);
        out << ',' << active_set_string(r.breakdown) << '\n';
    }
}

inline void write_frontier_csv(std::ostream& out, const CarpetSpec& spec, int grid) {
    Frontier f(spec);
    out << "z,psi,beta\n";
    double hint = 1.0;
    for (int i = 0; i <= grid; ++i) {
        double z = f.z_hi() * static_cast<double>(i) / static_cast<double>(grid);
        double beta;
        bool binding = f.solve_beta(z, beta, hint);
        if (binding) hint = beta;
        out << format_g9(z) << ',' << format_g9(f.psi(z)) << ',';
        if (binding) out << format_g9(beta);  // blank when the constraint is slack
        out << '\n';
    }
}

inline void write_simulate_csv(std::ostream& out, const SimulationResult& res) {
    out << "m,d_m,predicted\n";
    for (const auto& [m, dm] : res.curve) {
        out << m << ',' << format_g9(dm) << ',';
        for (const auto& row : res.table)
            if (row.m == m) {
                out << format_g9(row.predicted);
                break;
            }
        out << '\n';
    }
}

// The published curve's carpet: N=3, M=8, fiber counts (5, 2, 8), ball
// targets with H = 0.8, alpha on [0, 6].
inline CarpetSpec figure5_carpet() { return CarpetSpec::from_fiber_counts(3, 8, {5, 2, 8}); }

// Quadratically refined toward 0, where the curve is steepest (slope
// close to -1 near alpha ~ 0.07 for this carpet): uniform spacing at 600
// points would leave adjacent dimension gaps near 1e-2.
inline std::vector<double> figure5_alphas(int points = 600) {
    std::vector<double> a(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        double u = static_cast<double>(i) / static_cast<double>(points - 1);
        a[static_cast<std::size_t>(i)] = 6.0 * u * u;
    }
    return a;
}

inline DimParams figure5_params(const CarpetSpec& spec) { return ball_params(spec, 0.0, 0.8); }

}  // namespace carpetdim
