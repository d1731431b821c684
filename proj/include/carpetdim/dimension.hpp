#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

enum class TargetKind { cylinder, ball };

// (h, h_r) of a probability vector; the dimension functions depend on the
// vectors only through these.
struct EntropyProfile {
    double h = 0;
    double h_r = 0;
};

inline EntropyProfile profile_of(const CarpetSpec& spec, const ProbVector& p) {
    return EntropyProfile{entropy(p), row_entropy(spec, p)};
}

// Feasibility: 0 <= h_r <= min(h, log R), h <= log D, up to slack.
inline void check_profile(const CarpetSpec& spec, const EntropyProfile& e,
                          double slack = 1e-9) {
    if (!(e.h_r >= -slack) || !(e.h >= e.h_r - slack) ||
        !(e.h <= spec.log_alphabet() + slack) || !(e.h_r <= spec.log_rows() + slack))
        throw DomainError("entropy profile outside the feasible region");
}

struct DimParams {
    double alpha = 0;
    double H = 0;  // always 0 for cylinder targets
    TargetKind kind = TargetKind::cylinder;
};

inline DimParams cylinder_params(double alpha) {
    if (!(alpha >= 0)) throw DomainError("alpha must be >= 0");
    return DimParams{alpha, 0.0, TargetKind::cylinder};
}

// Ball targets carry the hole-size exponent H, constrained to the span of
// attainable per-row values [min_a log T_a, max_a log T_a].
inline DimParams ball_params(const CarpetSpec& spec, double alpha, double H) {
    if (!(alpha >= 0)) throw DomainError("alpha must be >= 0");
    double lo = std::log(static_cast<double>(spec.min_fiber_count()));
    double hi = std::log(static_cast<double>(spec.max_fiber_count()));
    if (!(H >= lo - 1e-12) || !(H <= hi + 1e-12))
        throw DomainError("H outside [min log T_a, max log T_a]");
    return DimParams{alpha, std::clamp(H, lo, hi), TargetKind::ball};
}

// Fractions of the pair prefix at scale n + f(n) occupied by the leading
// block and the remainder: lead = min{1, (1+alpha)/tau}, rest = 1 - lead.
struct AlphaWeights {
    double lead = 1;
    double rest = 0;
};

inline AlphaWeights alpha_weights(double alpha, double tau) {
    double lead = std::min(1.0, (1.0 + alpha) / tau);
    return AlphaWeights{lead, 1.0 - lead};
}

struct DimBreakdown {
    std::array<double, 6> d{};   // d[0] = d1, ..., d[5] = d6
    double dj = 0;               // min of the six
    std::array<bool, 6> active{};

    std::vector<int> active_indices() const {  // 1-based
        std::vector<int> out;
        for (int i = 0; i < 6; ++i)
            if (active[static_cast<std::size_t>(i)]) out.push_back(i + 1);
        return out;
    }
};

// Tolerance for declaring d_i active (tied with the minimum), absolute.
inline constexpr double kActiveTolerance = 1e-9;

// The six candidate local dimensions of the shrinking-target measure, as
// functions of the profiles of (p-, p1, p2, p+). Order of profiles matches
// that tuple.
inline DimBreakdown dim_functions(const CarpetSpec& spec, const DimParams& params,
                                  const std::array<EntropyProfile, 4>& pr) {
    for (const auto& e : pr) check_profile(spec, e);
    const double tau = spec.tau();
    const double logN = spec.log_n();
    const double logM = spec.log_m();
    const double a = params.alpha;
    const double H = params.kind == TargetKind::ball ? params.H : 0.0;
    const auto w = alpha_weights(a, tau);

    const EntropyProfile &pm = pr[0], &p1 = pr[1], &p2 = pr[2], &pp = pr[3];

    DimBreakdown out;
    out.d[0] = (pm.h + (tau - 1.0) * pm.h_r) / logM;
    out.d[1] = (w.lead * pm.h + w.rest * p1.h_r) / ((1.0 + a) * logN);
    out.d[2] = (w.lead * pm.h + w.rest * p1.h + (tau - 1.0) * p2.h_r) / ((tau + a) * logN);
    out.d[3] = (w.lead * pm.h + w.rest * p1.h + (tau - 1.0) * p2.h_r +
                a * (tau - 1.0) * pp.h_r + a * (1.0 - 1.0 / tau) * H) /
               (tau * (1.0 + a) * logN);
    out.d[4] = (w.lead * pm.h + w.rest * p1.h + (tau - 1.0) * p2.h +
                (tau + a) * (tau - 1.0) * pp.h_r + a * (1.0 - 1.0 / tau) * H) /
               (tau * (tau + a) * logN);
    out.d[5] = (pp.h + (tau - 1.0) * pp.h_r) / logM;

    out.dj = *std::min_element(out.d.begin(), out.d.end());
    for (int i = 0; i < 6; ++i)
        out.active[static_cast<std::size_t>(i)] = out.d[static_cast<std::size_t>(i)] <= out.dj + kActiveTolerance;
    return out;
}

}  // namespace carpetdim
