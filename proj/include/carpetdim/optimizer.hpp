#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/errors.hpp"
#include "carpetdim/frontier.hpp"
#include "carpetdim/rng.hpp"

namespace carpetdim {

// Reduced coordinates: candidate row entropies of (p-, p1, p2, p+). Each
// vector is the within-row-uniform lift of its coordinate, so h = psi(z).
struct ThetaPoint {
    double z_minus = 0;
    double z1 = 0;
    double z2 = 0;
    double z_plus = 0;

    double operator[](int k) const {
        return k == 0 ? z_minus : k == 1 ? z1 : k == 2 ? z2 : z_plus;
    }
    double& ref(int k) {
        return k == 0 ? z_minus : k == 1 ? z1 : k == 2 ? z2 : z_plus;
    }
    bool lex_less(const ThetaPoint& o) const {
        if (z_minus != o.z_minus) return z_minus < o.z_minus;
        if (z1 != o.z1) return z1 < o.z1;
        if (z2 != o.z2) return z2 < o.z2;
        return z_plus < o.z_plus;
    }
};

struct MaximizeOptions {
    int grid_starts = 5;       // per-axis multistart grid
    double coord_tol = 1e-7;   // golden-section interval tolerance
    int max_iters = 200;       // cap on ascent rounds per refined start
    int refine_starts = 6;     // grid starts carried to full convergence
};

struct OptDiagnostics {
    int starts = 0;               // grid restarts launched
    int refined = 0;              // starts driven to full convergence
    long long evals = 0;          // objective evaluations
    int max_cycles = 0;           // worst ascent round count
    double spread = 0;            // best ascent value above the certificate, clamped at 0
    double last_gain = 0;         // final round improvement of the winner
};

struct OptResult {
    double value = 0;
    ThetaPoint argmax;
    DimBreakdown breakdown;
    std::array<ProbVector, 4> vectors;
    OptDiagnostics diagnostics;
};

namespace detail {

// Box for the reduced domain. z1's lower bound is z_minus (coupled).
struct ThetaBounds {
    double zD, zd, zR;
    explicit ThetaBounds(const Frontier& f)
        : zD(f.z_lo()), zd(std::max(f.z_dim(), f.z_lo())), zR(f.z_hi()) {}
    bool degenerate() const { return zR - zD <= 1e-14; }
};

// Fast objective over ThetaPoint with memoized frontier solves. The warm
// beta hint exploits that successive queries sit close together during a
// line search.
class ThetaEval {
public:
    ThetaEval(const CarpetSpec& spec, const DimParams& params)
        : frontier_(spec), spec_(spec) {
        const double tau = spec.tau();
        const double logN = spec.log_n();
        const auto w = alpha_weights(params.alpha, tau);
        lead_ = w.lead;
        rest_ = w.rest;
        tau_ = tau;
        inv_logM_ = 1.0 / spec.log_m();
        den2_ = 1.0 / ((1.0 + params.alpha) * logN);
        den3_ = 1.0 / ((tau + params.alpha) * logN);
        den4_ = 1.0 / (tau * (1.0 + params.alpha) * logN);
        den5_ = 1.0 / (tau * (tau + params.alpha) * logN);
        hterm_ = params.kind == TargetKind::ball
                     ? params.alpha * (1.0 - 1.0 / tau) * params.H
                     : 0.0;
        alpha_ = params.alpha;
        drop_z1_ = rest_ == 0.0;
    }

    const Frontier& frontier() const { return frontier_; }
    bool drop_z1() const { return drop_z1_; }
    long long evals() const { return evals_; }

    double psi(double z) {
        std::uint64_t key = std::bit_cast<std::uint64_t>(z);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        double beta;
        double val;
        if (frontier_.solve_beta(z, beta, hint_)) {
            hint_ = beta;
            val = z + frontier_.tilt_stats(beta).E;
        } else {
            val = frontier_.psi(z);  // entropy constraint non-binding
        }
        memo_.emplace(key, val);
        return val;
    }

    double value(const ThetaPoint& t) {
        ++evals_;
        const double pm = psi(t.z_minus);
        const double p1 = drop_z1_ ? 0.0 : psi(t.z1);
        const double p2 = psi(t.z2);
        const double pp = psi(t.z_plus);
        const double head = lead_ * pm + rest_ * p1;
        double v = (pm + (tau_ - 1.0) * t.z_minus) * inv_logM_;                              // d1
        v = std::min(v, (lead_ * pm + rest_ * t.z1) * den2_);                                // d2
        v = std::min(v, (head + (tau_ - 1.0) * t.z2) * den3_);                               // d3
        v = std::min(v, (head + (tau_ - 1.0) * t.z2 + alpha_ * (tau_ - 1.0) * t.z_plus + hterm_) * den4_);  // d4
        v = std::min(v, (head + (tau_ - 1.0) * p2 +
                         (tau_ + alpha_) * (tau_ - 1.0) * t.z_plus + hterm_) * den5_);       // d5
        v = std::min(v, (pp + (tau_ - 1.0) * t.z_plus) * inv_logM_);                         // d6
        return v;
    }

private:
    Frontier frontier_;
    const CarpetSpec& spec_;
    std::unordered_map<std::uint64_t, double> memo_;
    double hint_ = 1.0;
    double lead_, rest_, tau_, inv_logM_, den2_, den3_, den4_, den5_, hterm_, alpha_;
    bool drop_z1_ = false;
    long long evals_ = 0;
};

// Golden-section maximization of a unimodal slice; interval endpoints are
// always evaluated so boundary maxima are hit exactly.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    double best_x = lo, best_v = f(lo);
    double vhi = f(hi);
    if (vhi > best_v) {
        best_v = vhi;
        best_x = hi;
    }
    if (hi - lo <= tol) return {best_x, best_v};
    constexpr double r = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if (f1 > best_v) {
        best_v = f1;
        best_x = x1;
    }
    if (f2 > best_v) {
        best_v = f2;
        best_x = x2;
    }
    return {best_x, best_v};
}

struct AscentState {
    ThetaPoint t;
    double v;
};

inline void coordinate_interval(const ThetaBounds& b, const ThetaPoint& t, int k,
                                bool drop_z1, double& lo, double& hi) {
    switch (k) {
        case 0:
            lo = b.zD;
            hi = drop_z1 ? b.zd : std::min(b.zd, t.z1);
            break;
        case 1:
            lo = t.z_minus;
            hi = b.zR;
            break;
        case 2:
            lo = b.zD;
            hi = b.zR;
            break;
        default:
            lo = b.zd;
            hi = b.zR;
            break;
    }
    if (hi < lo) hi = lo;
}

// One sweep of per-coordinate golden sections. Returns the gain.
inline double ascent_cycle(ThetaEval& ev, const ThetaBounds& b, AscentState& s, double tol) {
    double start = s.v;
    for (int k = 0; k < 4; ++k) {
        if (k == 1 && ev.drop_z1()) continue;
        double lo, hi;
        coordinate_interval(b, s.t, k, ev.drop_z1(), lo, hi);
        if (hi - lo <= 1e-15) continue;
        ThetaPoint probe = s.t;
        auto [x, v] = golden_max(
            [&](double z) {
                probe.ref(k) = z;
                if (k == 0 && ev.drop_z1()) probe.z1 = z;
                return ev.value(probe);
            },
            lo, hi, tol);
        if (v > s.v) {
            s.t.ref(k) = x;
            if (k == 0 && ev.drop_z1()) s.t.z1 = x;
            s.v = v;
        }
    }
    return s.v - start;
}

// Feasible parameter range along direction d from t; empty -> lo > hi.
inline bool direction_range(const ThetaBounds& b, const ThetaPoint& t,
                            const std::array<double, 4>& d, bool drop_z1,
                            double& tlo, double& thi) {
    tlo = -1e300;
    thi = 1e300;
    auto clip = [&](double x, double dx, double lo, double hi) {
        if (dx == 0.0) return x >= lo - 1e-12 && x <= hi + 1e-12;
        double a = (lo - x) / dx, c = (hi - x) / dx;
        if (a > c) std::swap(a, c);
        tlo = std::max(tlo, a);
        thi = std::min(thi, c);
        return true;
    };
    if (!clip(t.z_minus, d[0], b.zD, b.zd)) return false;
    if (!drop_z1) {
        if (!clip(t.z1, d[1], b.zD, b.zR)) return false;
        // z1 - z_minus >= 0 along the ray
        double dx = d[1] - d[0];
        double x = t.z1 - t.z_minus;
        if (dx == 0.0) {
            if (x < -1e-12) return false;
        } else {
            double bound = -x / dx;
            if (dx > 0)
                tlo = std::max(tlo, bound);
            else
                thi = std::min(thi, bound);
        }
    }
    if (!clip(t.z2, d[2], b.zD, b.zR)) return false;
    if (!clip(t.z_plus, d[3], b.zd, b.zR)) return false;
    return thi > tlo;
}

// Line searches along a fixed direction set break the ridge stalls that
// plain coordinate ascent hits on a min of smooth concave pieces.
inline double polish_round(ThetaEval& ev, const ThetaBounds& b, AscentState& s, double tol) {
    static const std::array<std::array<double, 4>, 13> kFixed = {{
        {1, 1, 0, 0},  {1, -1, 0, 0}, {1, 0, 1, 0}, {1, 0, -1, 0}, {1, 0, 0, 1},
        {1, 0, 0, -1}, {0, 1, 1, 0},  {0, 1, -1, 0}, {0, 1, 0, 1}, {0, 1, 0, -1},
        {0, 0, 1, 1},  {0, 0, 1, -1}, {1, 1, 1, 1},
    }};
    double start = s.v;
    auto try_direction = [&](std::array<double, 4> d) {
        if (ev.drop_z1()) d[1] = d[0];  // z1 rides along with z_minus
        double norm = 0;
        for (double x : d) norm += x * x;
        if (norm == 0) return;
        double tlo, thi;
        if (!direction_range(b, s.t, d, ev.drop_z1(), tlo, thi)) return;
        if (thi - tlo <= 1e-15) return;
        auto [x, v] = golden_max(
            [&](double step) {
                ThetaPoint p = s.t;
                for (int k = 0; k < 4; ++k) p.ref(k) += step * d[k];
                return ev.value(p);
            },
            tlo, thi, tol);
        if (v > s.v) {
            for (int k = 0; k < 4; ++k) s.t.ref(k) += x * d[k];
            s.v = v;
        }
    };
    for (const auto& d : kFixed) try_direction(d);
    // deterministic pseudo-random directions
    CounterRng rng{0x7a3d0c5u};
    for (std::uint64_t i = 0; i < 16; ++i) {
        std::array<double, 4> d;
        for (std::uint64_t k = 0; k < 4; ++k) d[k] = 2.0 * rng.uniform(i, k) - 1.0;
        try_direction(d);
    }
    return s.v - start;
}

inline AscentState ascend(ThetaEval& ev, const ThetaBounds& b, ThetaPoint t0,
                          double coord_tol, int max_rounds, int* rounds_out) {
    AscentState s{t0, ev.value(t0)};
    int rounds = 0;
    for (; rounds < max_rounds; ++rounds) {
        double gain = 0;
        for (int c = 0; c < 30; ++c) {
            double g = ascent_cycle(ev, b, s, coord_tol);
            gain += g;
            if (g <= 1e-12 * (1.0 + std::fabs(s.v))) break;
        }
        double pg = polish_round(ev, b, s, coord_tol);
        // Sub-1e-11 rounds are a crawl along a nonsmooth ridge, not
        // progress; the caller reconciles stalls against the nested solve.
        if (gain + pg <= 1e-11 * (1.0 + std::fabs(s.v))) break;
    }
    if (rounds_out) *rounds_out = rounds + 1;
    return s;
}

// (z, psi) along the tilted row family nu_b ~ T_a^b, b in [0, 1]. z(b) =
// H(nu_b) sweeps the reduced domain monotonely from log R (b = 0) down to
// z_lo (b = 1) and psi(z(b)) = H + E. Both are smooth in b even where
// dpsi/dz diverges (z -> log R), so cubic Hermite nodes with the exact
// derivatives dH/db = -b Var, dE/db = Var interpolate to ~1e-13.
class TiltTable {
public:
    explicit TiltTable(const Frontier& f, int cells = 2048) : n_(cells) {
        const std::size_t m = static_cast<std::size_t>(cells) + 1;
        z_.resize(m);
        e_.resize(m);
        dz_.resize(m);
        de_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            double b = static_cast<double>(i) / static_cast<double>(cells);
            auto ts = f.tilt_stats(b);
            z_[i] = ts.H;
            e_[i] = ts.E;
            dz_[i] = -b * ts.Var;
            de_[i] = ts.Var;
        }
    }

    void eval(double b, double& z, double& psi) const {
        if (b <= 0.0) {
            z = z_.front();
            psi = z + e_.front();
            return;
        }
        if (b >= 1.0) {
            z = z_.back();
            psi = z + e_.back();
            return;
        }
        double s = b * static_cast<double>(n_);
        std::size_t c = std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(n_ - 1));
        double u = s - static_cast<double>(c);
        double w = 1.0 / static_cast<double>(n_);
        double u2 = u * u, u3 = u2 * u;
        double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        double h01 = 3 * u2 - 2 * u3, h11 = u3 - u2;
        z = h00 * z_[c] + w * h10 * dz_[c] + h01 * z_[c + 1] + w * h11 * dz_[c + 1];
        double e = h00 * e_[c] + w * h10 * de_[c] + h01 * e_[c + 1] + w * h11 * de_[c + 1];
        psi = z + e;
    }

private:
    int n_;
    std::vector<double> z_, e_, dz_, de_;
};

// Exact DIM by bisection on the achieved value. For a fixed level t the
// constraint set {min d_j >= t} unwinds monotonely: d1 rises on
// [z_lo, z_dim], so the smallest z- with d1 >= t maximizes psi(z-), which
// loosens every other constraint; d2 then dictates the smallest
// admissible z1, maximizing psi(z1) and with it the head; d6 falls on
// [z_dim, log R], so the largest z+ with d6 >= t maximizes the d4/d5
// slack; d3 and d4 leave a smallest z2, where psi(z2) is largest, and d5
// at that corner settles feasibility. Every step is a monotone scalar
// bisection, no search is involved, and feasibility is monotone in t.
class ValueBisect {
public:
    ValueBisect(const CarpetSpec& spec, const DimParams& params, const Frontier& f)
        : tab_(f) {
        tau_ = spec.tau();
        const double logN = spec.log_n();
        const auto w = alpha_weights(params.alpha, tau_);
        lead_ = w.lead;
        rest_ = w.rest;
        inv_logM_ = 1.0 / spec.log_m();
        c2_ = (1.0 + params.alpha) * logN;
        c3_ = (tau_ + params.alpha) * logN;
        c4_ = tau_ * (1.0 + params.alpha) * logN;
        c5_ = tau_ * (tau_ + params.alpha) * logN;
        hterm_ = params.kind == TargetKind::ball
                     ? params.alpha * (1.0 - 1.0 / tau_) * params.H
                     : 0.0;
        alpha_ = params.alpha;
        b_dim_ = 1.0 / tau_;
        zD_ = f.z_lo();
        zR_ = f.z_hi();
        double z, p;
        tab_.eval(b_dim_, z, p);
        cap_ = (p + (tau_ - 1.0) * z) * inv_logM_;  // d1 <= McMullen value
    }

    struct Result {
        ThetaPoint t;
        double v;
    };

    Result solve() const {
        ThetaPoint wit{};
        feasible(0.0, &wit);  // structurally feasible, seeds the witness
        double lo = 0.0, hi = cap_ + 1e-9;
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            double t = 0.5 * (lo + hi);
            if (feasible(t, nullptr))
                lo = t;
            else
                hi = t;
        }
        feasible(lo, &wit);
        return {wit, lo};
    }

private:
    double dim16_at(double b) const {
        double z, p;
        tab_.eval(b, z, p);
        return (p + (tau_ - 1.0) * z) * inv_logM_;
    }

    // psi at a given row entropy, inverting the monotone table
    double psi_at_z(double z) const {
        if (z <= zD_) {
            double zz, p;
            tab_.eval(1.0, zz, p);
            return p;
        }
        if (z >= zR_) {
            double zz, p;
            tab_.eval(0.0, zz, p);
            return p;
        }
        double blo = 0.0, bhi = 1.0;  // H falls in b: H(blo) >= z >= H(bhi)
        for (int i = 0; i < 60; ++i) {
            double bm = 0.5 * (blo + bhi);
            double zz, p;
            tab_.eval(bm, zz, p);
            (zz >= z ? blo : bhi) = bm;
        }
        double zz, p;
        tab_.eval(0.5 * (blo + bhi), zz, p);
        return p;
    }

    bool feasible(double t, ThetaPoint* wit) const {
        const double c = tau_ - 1.0;
        // z-: d1 falls along b on [b_dim, 1]; keep the feasible side.
        if (dim16_at(b_dim_) < t) return false;
        double bm = 1.0;
        if (dim16_at(1.0) < t) {
            double blo = b_dim_, bhi = 1.0;
            for (int i = 0; i < 60; ++i) {
                double x = 0.5 * (blo + bhi);
                (dim16_at(x) >= t ? blo : bhi) = x;
            }
            bm = blo;
        }
        double zm, pm;
        tab_.eval(bm, zm, pm);
        // z1: smallest value d2 admits; smaller z1 only raises psi(z1).
        double z1 = zm, p1 = pm;
        if (rest_ > 0.0) {
            double zreq = (t * c2_ - lead_ * pm) / rest_;
            if (zreq > z1) {
                if (zreq > zR_) return false;
                z1 = zreq;
                p1 = psi_at_z(z1);
            }
        } else if (lead_ * pm < t * c2_) {
            return false;
        }
        const double head = rest_ == 0.0 ? lead_ * pm : lead_ * pm + rest_ * p1;
        // z+: d6 rises along b on [0, b_dim]; the smallest feasible b is
        // the largest z+, which maximizes the d4/d5 slack.
        double bp = 0.0;
        if (dim16_at(0.0) < t) {
            double blo = 0.0, bhi = b_dim_;
            for (int i = 0; i < 60; ++i) {
                double x = 0.5 * (blo + bhi);
                (dim16_at(x) >= t ? bhi : blo) = x;
            }
            bp = bhi;
        }
        double zp, pp;
        tab_.eval(bp, zp, pp);
        // z2: smallest value d3 and d4 admit; d5 is checked there.
        double z2 = zD_;
        z2 = std::max(z2, (t * c3_ - head) / c);
        z2 = std::max(z2, (t * c4_ - head - hterm_ - alpha_ * c * zp) / c);
        if (z2 > zR_) return false;
        double p2 = psi_at_z(z2);
        if (head + c * p2 + (tau_ + alpha_) * c * zp + hterm_ < t * c5_) return false;
        if (wit) *wit = ThetaPoint{zm, z1, z2, zp};
        return true;
    }

    TiltTable tab_;
    double tau_, lead_, rest_, inv_logM_, c2_, c3_, c4_, c5_, hterm_, alpha_, b_dim_;
    double zD_, zR_, cap_;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (hi - lo <= 1e-14 || n <= 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace detail

// Breakdown of the six candidate dimensions at a reduced point; validates
// the point against the reduced domain.
inline DimBreakdown objective(const CarpetSpec& spec, const DimParams& params,
                              const ThetaPoint& t) {
    Frontier f(spec);
    detail::ThetaBounds b(f);
    const double tol = 1e-9;
    if (t.z_minus < b.zD - tol || t.z_minus > b.zd + tol ||
        t.z1 < t.z_minus - tol || t.z1 > b.zR + tol ||
        t.z2 < b.zD - tol || t.z2 > b.zR + tol ||
        t.z_plus < b.zd - tol || t.z_plus > b.zR + tol)
        throw DomainError("point outside the reduced optimization domain");
    auto prof = [&](double z) {
        double zz = std::clamp(z, b.zD, b.zR);
        return EntropyProfile{f.psi(zz), zz};
    };
    return dim_functions(spec, params,
                         {prof(t.z_minus), prof(t.z1), prof(t.z2), prof(t.z_plus)});
}

// Global maximum of min(d1..d6) over the reduced domain. The objective is
// a min of concave functions of theta. Every call is certified against the
// value bisection: stalled ascents, unanimous ones included, are reconciled
// by adopting the certified witness, and only an ascent value above the
// certificate (beyond 1e-6) raises ConvergenceFailure, which is what
// genuine nonconcavity would produce.
inline OptResult maximize(const CarpetSpec& spec, const DimParams& params,
                          const MaximizeOptions& opts = {}) {
    Frontier f(spec);
    detail::ThetaBounds b(f);

    auto finish = [&](ThetaPoint t, OptDiagnostics diag) {
        OptResult res;
        res.argmax = t;
        res.breakdown = objective(spec, params, t);
        res.value = res.breakdown.dj;
        res.vectors = {f.lift(spec, t.z_minus), f.lift(spec, t.z1), f.lift(spec, t.z2),
                       f.lift(spec, t.z_plus)};
        res.diagnostics = diag;
        double cap = mcmullen_dimension(spec);
        if (res.value > cap + 1e-9)
            throw ConvergenceFailure("optimizer value exceeds the unperturbed dimension");
        if (params.alpha >= 1e-3 && res.value >= cap - 1e-12)
            throw ConvergenceFailure("optimizer value failed to drop below the unperturbed dimension");
        return res;
    };

    // alpha = 0: every coordinate at h_r(p_d) attains dim(p_d) exactly.
    if (params.alpha == 0.0 || b.degenerate()) {
        double z = params.alpha == 0.0 ? std::clamp(f.z_dim(), b.zD, b.zR) : b.zD;
        ThetaPoint t{z, z, z, z};
        if (b.degenerate()) t = ThetaPoint{b.zD, b.zD, b.zD, b.zD};
        OptDiagnostics diag;
        diag.starts = 1;
        return finish(t, diag);
    }

    detail::ThetaEval ev(spec, params);
    const int g = std::max(2, opts.grid_starts);
    auto zm_grid = detail::linspace(b.zD, b.zd, g);
    auto z2_grid = detail::linspace(b.zD, b.zR, g);
    auto zp_grid = detail::linspace(b.zd, b.zR, g);

    OptDiagnostics diag;
    struct Seed {
        ThetaPoint t;
        double v;
    };
    std::vector<Seed> seeds;
    // Cheap pass over the whole grid: a few coarse ascent cycles rank the
    // restarts; the best few are then driven to full convergence.
    const double width = std::max(b.zR - b.zD, 1e-12);
    const double coarse_tol = std::max(1e-3 * width, 1e-6);
    for (double zm : zm_grid) {
        auto z1_grid = ev.drop_z1() ? std::vector<double>{zm} : detail::linspace(zm, b.zR, g);
        for (double z1 : z1_grid) {
            for (double z2 : z2_grid) {
                for (double zp : zp_grid) {
                    detail::AscentState s{ThetaPoint{zm, z1, z2, zp},
                                          ev.value(ThetaPoint{zm, z1, z2, zp})};
                    for (int c = 0; c < 3; ++c)
                        if (detail::ascent_cycle(ev, b, s, coarse_tol) <=
                            1e-10 * (1.0 + std::fabs(s.v)))
                            break;
                    seeds.push_back({s.t, s.v});
                    ++diag.starts;
                }
            }
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& c) {
        if (a.v != c.v) return a.v > c.v;
        return a.t.lex_less(c.t);
    });

    const int refine = std::min<int>(opts.refine_starts, static_cast<int>(seeds.size()));
    double best_v = -1e300;
    ThetaPoint best_t{};
    std::vector<detail::AscentState> finals;
    for (int i = 0; i < refine; ++i) {
        int rounds = 0;
        auto s = detail::ascend(ev, b, seeds[static_cast<std::size_t>(i)].t, opts.coord_tol,
                                opts.max_iters, &rounds);
        diag.max_cycles = std::max(diag.max_cycles, rounds);
        finals.push_back(s);
        if (s.v > best_v) best_v = s.v;
        ++diag.refined;
    }
    // Always-on certificate: the value bisection yields the exact maximum
    // independently of the ascents, so a stall, even one every seed agrees
    // on, is reconciled by adopting the certified witness. Only an ascent
    // value above the certificate signals nonconcavity.
    detail::ValueBisect vb(spec, params, f);
    auto cert = vb.solve();
    detail::AscentState ws{cert.t, ev.value(cert.t)};
    detail::ascent_cycle(ev, b, ws, 1e-9);
    detail::polish_round(ev, b, ws, 1e-9);
    if (ws.v < cert.v - 1e-6)
        throw ConvergenceFailure("certified witness fails to reproduce its value");
    diag.spread = std::max(0.0, best_v - std::max(cert.v, ws.v));
    if (diag.spread > 1e-6)
        throw ConvergenceFailure("ascent and certified maximum disagree beyond 1e-6");
    finals.push_back(ws);
    if (ws.v > best_v) best_v = ws.v;

    // Lexicographically smallest argmax among refined runs within 1e-8.
    bool have = false;
    for (const auto& s : finals) {
        if (s.v < best_v - 1e-8) continue;
        if (!have || s.t.lex_less(best_t)) {
            best_t = s.t;
            have = true;
        }
    }
    // Final tighten from the winner.
    detail::AscentState s{best_t, ev.value(best_t)};
    double g0 = s.v;
    detail::ascent_cycle(ev, b, s, 1e-9);
    detail::polish_round(ev, b, s, 1e-9);
    detail::ascent_cycle(ev, b, s, 1e-9);
    diag.last_gain = s.v - g0;
    diag.evals = ev.evals();
    return finish(s.t, diag);
}

struct BruteForceOptions {
    long long max_lattice_points = 200'000'000;
    long long max_tuple_evals = 20'000'000'000LL;
};

namespace detail {

struct CloudPoint {
    double h;
    double h_r;
};

// Entropy cloud of all lattice probability vectors with denominator K,
// reduced to its Pareto frontier. min(d1..d6) is nondecreasing in every
// profile coordinate, so the tuple maximum over the frontier equals the
// maximum over the whole lattice exactly.
inline std::vector<CloudPoint> lattice_pareto(const CarpetSpec& spec, int K,
                                              const BruteForceOptions& opts) {
    const int D = spec.alphabet_size();
    // C(K + D - 1, D - 1) compositions
    double proj = 1;
    for (int i = 1; i < D; ++i)
        proj *= static_cast<double>(K + i) / static_cast<double>(i);
    if (proj > static_cast<double>(opts.max_lattice_points))
        throw ResourceLimit("lattice enumeration exceeds the configured cap");

    std::vector<double> qlogq(static_cast<std::size_t>(K) + 1, 0.0);
    for (int q = 1; q <= K; ++q)
        qlogq[static_cast<std::size_t>(q)] = static_cast<double>(q) * std::log(static_cast<double>(q));
    const double logK = std::log(static_cast<double>(K));

    std::vector<CloudPoint> cloud;
    std::vector<int> counts(static_cast<std::size_t>(D), 0);
    std::vector<int> rowsum(static_cast<std::size_t>(spec.num_rows()), 0);
    // recursive composition enumeration
    auto emit = [&]() {
        double sh = 0;
        for (int i = 0; i < D; ++i) sh += qlogq[static_cast<std::size_t>(counts[static_cast<std::size_t>(i)])];
        std::fill(rowsum.begin(), rowsum.end(), 0);
        for (int i = 0; i < D; ++i) rowsum[static_cast<std::size_t>(spec.symbol_row(i))] += counts[static_cast<std::size_t>(i)];
        double sr = 0;
        for (int r = 0; r < spec.num_rows(); ++r) sr += qlogq[static_cast<std::size_t>(rowsum[static_cast<std::size_t>(r)])];
        double invK = 1.0 / static_cast<double>(K);
        cloud.push_back({logK - sh * invK, logK - sr * invK});
    };
    auto rec = [&](auto&& self, int idx, int rem) -> void {
        if (idx == D - 1) {
            counts[static_cast<std::size_t>(idx)] = rem;
            emit();
            return;
        }
        for (int q = 0; q <= rem; ++q) {
            counts[static_cast<std::size_t>(idx)] = q;
            self(self, idx + 1, rem - q);
        }
    };
    rec(rec, 0, K);

    std::sort(cloud.begin(), cloud.end(), [](const CloudPoint& a, const CloudPoint& c) {
        if (a.h != c.h) return a.h > c.h;
        return a.h_r > c.h_r;
    });
    std::vector<CloudPoint> front;
    double best_hr = -1;
    for (const auto& p : cloud) {
        if (p.h_r > best_hr) {
            front.push_back(p);
            best_hr = p.h_r;
        }
    }
    return front;  // h strictly decreasing, h_r strictly increasing
}

}  // namespace detail

// Exact maximum of min(d1..d6) over all 4-tuples of lattice vectors with
// denominator resolution; a lower bound for the continuous maximum and an
// independent check of maximize().
inline double brute_force(const CarpetSpec& spec, const DimParams& params, int resolution,
                          const BruteForceOptions& opts = {}) {
    if (resolution < 1) throw DomainError("resolution must be >= 1");
    auto front = detail::lattice_pareto(spec, resolution, opts);
    const std::size_t P = front.size();
    double tuples = static_cast<double>(P);
    tuples = tuples * tuples * tuples * tuples;
    if (tuples > static_cast<double>(opts.max_tuple_evals))
        throw ResourceLimit("tuple evaluation count exceeds the configured cap");

    const double tau = spec.tau();
    const double logN = spec.log_n();
    const double logM = spec.log_m();
    const double a = params.alpha;
    const double H = params.kind == TargetKind::ball ? params.H : 0.0;
    const auto w = alpha_weights(a, tau);
    const double den2 = 1.0 / ((1.0 + a) * logN);
    const double den3 = 1.0 / ((tau + a) * logN);
    const double den4 = 1.0 / (tau * (1.0 + a) * logN);
    const double den5 = 1.0 / (tau * (tau + a) * logN);
    const double hterm = a * (1.0 - 1.0 / tau) * H;

    // d1 and d6 are the same function of their argument.
    std::vector<double> d16(P);
    for (std::size_t i = 0; i < P; ++i)
        d16[i] = (front[i].h + (tau - 1.0) * front[i].h_r) / logM;
    std::vector<std::size_t> by16(P);
    for (std::size_t i = 0; i < P; ++i) by16[i] = i;
    std::sort(by16.begin(), by16.end(),
              [&](std::size_t x, std::size_t y) { return d16[x] > d16[y]; });

    auto eval = [&](std::size_t im, std::size_t i1, std::size_t i2, std::size_t ip) {
        double lead_h = w.lead * front[im].h;
        double d2 = (lead_h + w.rest * front[i1].h_r) * den2;
        double head = lead_h + w.rest * front[i1].h;
        double d3 = (head + (tau - 1.0) * front[i2].h_r) * den3;
        double d4 = (head + (tau - 1.0) * front[i2].h_r + a * (tau - 1.0) * front[ip].h_r + hterm) * den4;
        double d5 = (head + (tau - 1.0) * front[i2].h + (tau + a) * (tau - 1.0) * front[ip].h_r + hterm) * den5;
        double v = std::min(std::min(d16[im], d16[ip]), std::min(d2, d3));
        return std::min(v, std::min(d4, d5));
    };

    // Diagonal tuples seed the incumbent so the pruning below bites early.
    double best = -1e300;
    for (std::size_t i = 0; i < P; ++i) best = std::max(best, eval(i, i, i, i));

    // Frontier order: h descending, h_r ascending. d16 descending along by16
    // turns the two outer prunes into breaks; d2 descends along reversed
    // frontier order. When rest == 0 neither d2 nor the head depends on i1.
    const std::size_t n1 = w.rest == 0.0 ? 1 : P;
    for (std::size_t jm = 0; jm < P; ++jm) {
        const std::size_t im = by16[jm];
        if (d16[im] <= best) break;
        const double lead_h = w.lead * front[im].h;
        for (std::size_t jp = 0; jp < P; ++jp) {
            const std::size_t ip = by16[jp];
            if (d16[ip] <= best) break;
            double m16 = std::min(d16[im], d16[ip]);
            const double t4p = a * (tau - 1.0) * front[ip].h_r + hterm;
            const double t5p = (tau + a) * (tau - 1.0) * front[ip].h_r + hterm;
            for (std::size_t j1 = 0; j1 < n1; ++j1) {
                const std::size_t i1 = P - 1 - j1;  // h_r descending
                double d2 = (lead_h + w.rest * front[i1].h_r) * den2;
                if (d2 <= best) break;  // h_r only shrinks from here
                double m126 = std::min(m16, d2);
                if (m126 <= best) continue;
                const double head = lead_h + w.rest * front[i1].h;
                for (std::size_t i2 = 0; i2 < P; ++i2) {
                    double d3 = (head + (tau - 1.0) * front[i2].h_r) * den3;
                    double d4 = (head + (tau - 1.0) * front[i2].h_r + t4p) * den4;
                    double d5 = (head + (tau - 1.0) * front[i2].h + t5p) * den5;
                    double v = std::min(m126, std::min(d3, std::min(d4, d5)));
                    if (v > best) best = v;
                }
            }
        }
    }
    return best;
}

// Full-torus ball-target closed form min{(tau+1)/(alpha+1), 2 tau/(tau+alpha)}.
inline double closed_form_torus(int N, int M, double alpha) {
    if (N < 2 || M <= N) throw MalformedCarpet("torus bases need M > N >= 2");
    if (!(alpha >= 0)) throw DomainError("alpha must be >= 0");
    double tau = std::log(static_cast<double>(M)) / std::log(static_cast<double>(N));
    return std::min((tau + 1.0) / (alpha + 1.0), 2.0 * tau / (tau + alpha));
}

struct ThresholdOptions {
    int scan_points = 20;
    double tol = 1e-8;
};

// Smallest certified A with maximize(alpha) = log D / ((1+alpha) log N) for
// alpha > A: the analytic candidate max{tau - 1, log D / log R - 1} is
// verified on a geometric grid up to 10 A.
inline double large_alpha_threshold(const CarpetSpec& spec, const ThresholdOptions& opts = {}) {
    if (spec.num_rows() < 2)
        throw CertificationFailure(
            "single-row carpets never enter the pure large-alpha regime");
    const double logD = spec.log_alphabet();
    const double logR = spec.log_rows();
    const double A = std::max(spec.tau() - 1.0, logD / logR - 1.0);
    for (int i = 1; i <= opts.scan_points; ++i) {
        double alpha = A * std::pow(10.0, static_cast<double>(i) / static_cast<double>(opts.scan_points));
        double got = maximize(spec, cylinder_params(alpha)).value;
        double want = logD / ((1.0 + alpha) * spec.log_n());
        if (std::fabs(got - want) > opts.tol)
            throw CertificationFailure("large-alpha closed form failed the scan");
    }
    return A;
}

}  // namespace carpetdim
