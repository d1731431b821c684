#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

// Row distribution proportional to T_a^beta. beta = 0 gives uniform rows;
// beta = 1 the rows of the symbol-uniform measure; beta = 1/tau the rows of
// the dimension-maximal measure.
inline std::vector<double> tilted_rows(const CarpetSpec& spec, double beta) {
    const int R = spec.num_rows();
    double lmax = 0;
    for (int r = 0; r < R; ++r) lmax = std::max(lmax, spec.log_fiber(r));
    std::vector<double> w(static_cast<std::size_t>(R));
    double z = 0;
    for (int r = 0; r < R; ++r) {
        w[static_cast<std::size_t>(r)] = std::exp(beta * (spec.log_fiber(r) - lmax));
        z += w[static_cast<std::size_t>(r)];
    }
    for (double& x : w) x /= z;
    return w;
}

struct FrontierPoint {
    double z = 0;     // row entropy
    double beta = 0;  // tilt achieving it
    double psi = 0;   // maximal full entropy given h_r = z
    std::vector<double> rows;
};

// Evaluator for the entropy frontier
//   psi(z) = max{ h(p) : h_r(p) = z },  z in [0, log R],
// realized by within-row-uniform measures with exponentially tilted rows.
// Caches the per-carpet constants; all methods are const and thread-safe.
class Frontier {
public:
    static constexpr double kBetaMax = 512.0;
    static constexpr double kResidualTol = 1e-13;  // on H(beta) - z

    explicit Frontier(const CarpetSpec& spec)
        : logT_(spec.num_rows()), R_(spec.num_rows()) {
        for (int r = 0; r < R_; ++r) logT_[static_cast<std::size_t>(r)] = spec.log_fiber(r);
        logTmax_ = *std::max_element(logT_.begin(), logT_.end());
        log_r_ = spec.log_rows();
        log_d_ = spec.log_alphabet();
        all_equal_ = spec.all_fibers_equal();
        sharp2_ = spec.max_fiber_multiplicity();
        // closed forms for the distinguished row entropies
        double sum_t = 0, sum_tlog = 0, sum_log = 0, zpow = 0, zpow_log = 0;
        double tau = spec.tau();
        for (int r = 0; r < R_; ++r) {
            double t = static_cast<double>(spec.fiber_count(r));
            sum_t += t;
            sum_tlog += t * logT_[static_cast<std::size_t>(r)];
            sum_log += logT_[static_cast<std::size_t>(r)];
            double p = std::exp(logT_[static_cast<std::size_t>(r)] / tau);
            zpow += p;
            zpow_log += p * logT_[static_cast<std::size_t>(r)];
        }
        z_lo_ = log_d_ - sum_tlog / sum_t;                       // h_r of uniform symbols
        z_dim_ = std::log(zpow) - (zpow_log / zpow) / tau;       // h_r of p_d
        h_pR_ = log_r_ + sum_log / static_cast<double>(R_);      // h of p_R
    }

    double z_lo() const { return z_lo_; }     // h_r(p_D), left end of the tilted branch
    double z_dim() const { return z_dim_; }   // h_r(p_d)
    double z_hi() const { return log_r_; }    // log R
    double h_pR() const { return h_pR_; }
    double log_d() const { return log_d_; }

    // H and E[log T] of the tilt at beta, plus Var for Newton steps.
    struct TiltStats {
        double H;
        double E;
        double Var;
    };

    TiltStats tilt_stats(double beta) const {
        double z = 0, e = 0, v = 0;
        double buf[64];
        double* w = buf;
        std::vector<double> heap;
        if (R_ > 64) {
            heap.resize(static_cast<std::size_t>(R_));
            w = heap.data();
        }
        for (int r = 0; r < R_; ++r) {
            w[r] = std::exp(beta * (logT_[static_cast<std::size_t>(r)] - logTmax_));
            z += w[r];
        }
        for (int r = 0; r < R_; ++r) e += w[r] * logT_[static_cast<std::size_t>(r)];
        e /= z;
        for (int r = 0; r < R_; ++r) {
            double d = logT_[static_cast<std::size_t>(r)] - e;
            v += w[r] * d * d;
        }
        v /= z;
        double logZ = std::log(z) + beta * logTmax_;
        return TiltStats{logZ - beta * e, e, v};
    }

    // Solve H(tilted(beta)) = z on [0, kBetaMax]. H is continuous and
    // nonincreasing, H(0) = log R. Returns false when even beta = kBetaMax
    // leaves H above z, i.e. z is below log(#max rows) and the entropy
    // constraint never binds. hint warm-starts the Newton iteration.
    bool solve_beta(double z, double& beta_out, double hint = 1.0) const {
        if (all_equal_) {
            beta_out = 0;
            return std::fabs(z - log_r_) <= 1e-9;
        }
        if (z >= log_r_) {
            beta_out = 0;
            return true;
        }
        double lo = 0.0, hi = kBetaMax;
        TiltStats s_hi = tilt_stats(hi);
        if (s_hi.H > z + 1e-10) return false;
        double b = std::clamp(hint, lo, hi);
        for (int it = 0; it < 200; ++it) {
            TiltStats s = tilt_stats(b);
            double g = s.H - z;
            if (std::fabs(g) <= kResidualTol) {
                beta_out = b;
                return true;
            }
            if (g > 0)
                lo = b;  // H too big -> need larger beta
            else
                hi = b;
            double gprime = -b * s.Var;
            double nb = gprime < -1e-300 ? b - g / gprime : 0.5 * (lo + hi);
            if (!(nb > lo && nb < hi)) nb = 0.5 * (lo + hi);
            if (hi - lo <= 1e-16 * (1.0 + hi)) {
                beta_out = 0.5 * (lo + hi);
                return true;
            }
            b = nb;
        }
        beta_out = b;
        return true;
    }

    // psi(z) for z in [0, log R].
    double psi(double z, double hint = 1.0) const {
        if (z < -1e-12 || z > log_r_ + 1e-12)
            throw DomainError("psi argument outside [0, log R]");
        z = std::clamp(z, 0.0, log_r_);
        if (all_equal_) return z + logTmax_;
        double beta;
        if (!solve_beta(z, beta, hint)) return z + logTmax_;  // non-binding branch
        TiltStats s = tilt_stats(beta);
        return z + s.E;
    }

    FrontierPoint point(const CarpetSpec& spec, double z) const {
        if (z < -1e-12 || z > log_r_ + 1e-12)
            throw DomainError("frontier argument outside [0, log R]");
        z = std::clamp(z, 0.0, log_r_);
        FrontierPoint fp;
        fp.z = z;
        if (all_equal_) {
            fp.beta = 0;
            fp.psi = z + logTmax_;
            fp.rows = tilted_rows(spec, 0.0);
            return fp;
        }
        double beta;
        if (!solve_beta(z, beta)) {
            fp.beta = kBetaMax;
            fp.psi = z + logTmax_;
            fp.rows = tilted_rows(spec, kBetaMax);
            return fp;
        }
        fp.beta = beta;
        TiltStats s = tilt_stats(beta);
        fp.psi = z + s.E;
        fp.rows = tilted_rows(spec, beta);
        return fp;
    }

    // phi(x) = max{ h_r(p) : h(p) = x } on [0, log D]; three pieces:
    // the diagonal up to log R, the plateau log R up to h(p_R), then the
    // inverse of the strictly decreasing branch of psi.
    double phi(double x) const {
        if (x < -1e-12 || x > log_d_ + 1e-12)
            throw DomainError("phi argument outside [0, log D]");
        x = std::clamp(x, 0.0, log_d_);
        if (x <= log_r_) return x;
        if (x <= h_pR_) return log_r_;
        if (all_equal_) return log_r_;  // h_pR_ == log_d_, only x == log D lands here
        // On beta in [0, 1], psi(z(beta)) = H(beta) + E(beta) increases in
        // beta from h(p_R) to log D; bisect on beta, return z = H(beta).
        // No early residual exit: d(H+E)/dbeta = (1-beta) Var vanishes at
        // beta = 1, so a small residual in x still allows an O(sqrt) error
        // in beta. H itself is well conditioned in beta everywhere.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 64 && hi - lo > 1e-17; ++it) {
            double b = 0.5 * (lo + hi);
            TiltStats s = tilt_stats(b);
            if (s.H + s.E < x)
                lo = b;
            else
                hi = b;
        }
        return tilt_stats(0.5 * (lo + hi)).H;
    }

    // Within-row-uniform measure with h_r = z, h = psi(z); only defined on
    // the optimizer branch z in [h_r(p_D), log R].
    ProbVector lift(const CarpetSpec& spec, double z) const {
        if (z < z_lo_ - 1e-9 || z > log_r_ + 1e-9)
            throw DomainError("lift argument outside [h_r(p_D), log R]");
        z = std::clamp(z, z_lo_, log_r_);
        double beta = 0;
        if (!all_equal_) solve_beta(z, beta);
        auto rows = tilted_rows(spec, beta);
        std::vector<double> w(static_cast<std::size_t>(spec.alphabet_size()));
        for (int r = 0; r < spec.num_rows(); ++r) {
            double per = rows[static_cast<std::size_t>(r)] / static_cast<double>(spec.fiber_count(r));
            for (int j = 0; j < spec.fiber_count(r); ++j)
                w[static_cast<std::size_t>(spec.symbol_index(r, j))] = per;
        }
        return ProbVector::from_weights(spec, std::move(w));
    }

private:
    std::vector<double> logT_;
    int R_;
    double logTmax_ = 0, log_r_ = 0, log_d_ = 0;
    double z_lo_ = 0, z_dim_ = 0, h_pR_ = 0;
    bool all_equal_ = false;
    int sharp2_ = 0;
};

// One-off convenience wrappers.
inline double psi(const CarpetSpec& spec, double z) { return Frontier(spec).psi(z); }
inline double phi(const CarpetSpec& spec, double h) { return Frontier(spec).phi(h); }
inline ProbVector lift(const CarpetSpec& spec, double z) { return Frontier(spec).lift(spec, z); }
inline FrontierPoint frontier_point(const CarpetSpec& spec, double z) {
    return Frontier(spec).point(spec, z);
}

}  // namespace carpetdim
