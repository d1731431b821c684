// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Runs everything from the library surface; raw oracles are re-derived
// here rather than shared with the unit suite.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <carpetdim/carpetdim.hpp>

using namespace carpetdim;

namespace {

// optima collected by criteria 1-4, re-checked by criterion 5
struct OptCase {
    CarpetSpec spec;
    DimParams params;
    OptResult res;
};
std::vector<OptCase> g_optima;

struct Verdict {
    bool ok = false;
    std::string note;
};

std::string fmtg(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const CarpetSpec kFig = CarpetSpec::from_fiber_counts(3, 8, {5, 2, 8});
const CarpetSpec kTorus = CarpetSpec::full_torus(2, 4);
const CarpetSpec kA = CarpetSpec::from_fiber_counts(2, 4, {2, 1});  // D = 3, tau = 2
const CarpetSpec kB = CarpetSpec::from_fiber_counts(2, 3, {2, 1});  // D = 3, tau irrational

double ball_mid_H(const CarpetSpec& spec) {
    return 0.5 * (std::log(static_cast<double>(spec.min_fiber_count())) +
                  std::log(static_cast<double>(spec.max_fiber_count())));
}

// 1. torus ball targets against the two-branch closed form
Verdict torus_closed_form() {
    const double H = std::log(4.0);
    const double tau = kTorus.tau();
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        double alpha = 0.01 * std::pow(1000.0, static_cast<double>(i) / 49.0);
        auto params = ball_params(kTorus, alpha, H);
        auto r = maximize(kTorus, params);
        g_optima.push_back({kTorus, params, r});
        double want = std::min((tau + 1.0) / (alpha + 1.0), 2.0 * tau / (tau + alpha));
        worst = std::max(worst, std::fabs(r.value - want));
    }
    return {worst <= 1e-5, "50 alphas in [0.01,10], worst |gap| " + fmtg(worst)};
}

// 2. large-alpha closed form above the certified threshold, both kinds
Verdict large_alpha_form() {
    double worst = 0;
    int checks = 0;
    for (const auto& spec : {kFig, kTorus, kA}) {
        double A = large_alpha_threshold(spec);
        double H = ball_mid_H(spec);
        for (int i = 1; i <= 20; ++i) {
            double alpha = A * (1.0 + 0.45 * static_cast<double>(i));
            double want = spec.log_alphabet() / ((1.0 + alpha) * spec.log_n());
            for (auto params : {cylinder_params(alpha), ball_params(spec, alpha, H)}) {
                auto r = maximize(spec, params);
                g_optima.push_back({spec, params, r});
                worst = std::max(worst, std::fabs(r.value - want));
                ++checks;
            }
        }
    }
    return {worst <= 1e-6,
            "3 carpets, " + std::to_string(checks) + " checks, worst |gap| " + fmtg(worst)};
}

// 3. alpha -> 0 limit on random carpets, plus the Bernoulli closed form
Verdict small_alpha_limit() {
    CounterRng rng{20260822};
    std::uint64_t ctr = 0;
    int made = 0;
    double worst_dim = 0, worst_bern = 0;
    while (made < 5) {
        int N = 2 + static_cast<int>(rng.uniform(0, ++ctr) * 4.0);
        int M = N + 1 + static_cast<int>(rng.uniform(0, ++ctr) * 9.0);
        int R = 2 + static_cast<int>(rng.uniform(0, ++ctr) * static_cast<double>(N - 1));
        std::vector<int> counts(static_cast<std::size_t>(R));
        int D = 0;
        for (auto& c : counts) {
            c = 1 + static_cast<int>(rng.uniform(0, ++ctr) * static_cast<double>(M));
            D += c;
        }
        if (D > 20) continue;
        auto spec = CarpetSpec::from_fiber_counts(N, M, counts);
        double cap = mcmullen_dimension(spec);
        auto params = cylinder_params(1e-6);
        auto r = maximize(spec, params);
        g_optima.push_back({spec, params, r});
        worst_dim = std::max(worst_dim, std::fabs(r.value - cap));
        double bern = bernoulli_dimension(spec, distinguished_measures(spec).p_d);
        worst_bern = std::max(worst_bern, std::fabs(bern - cap));
        ++made;
    }
    return {worst_dim <= 1e-4 && worst_bern <= 1e-10,
            "5 carpets, |DIM(1e-6)-McMullen| " + fmtg(worst_dim) + ", |bernoulli-closed| " +
                fmtg(worst_bern)};
}

// 4. brute-force oracle vs reduced maximization, both kinds
Verdict oracle_equivalence() {
    double worst = 0, worst_over = -1e300;
    for (const auto& spec : {kA, kB}) {
        double H = ball_mid_H(spec);
        for (double alpha : {0.3, 1.0, 3.0}) {
            for (auto params : {cylinder_params(alpha), ball_params(spec, alpha, H)}) {
                double bf = brute_force(spec, params, 30);
                auto r = maximize(spec, params);
                g_optima.push_back({spec, params, r});
                worst = std::max(worst, std::fabs(bf - r.value));
                worst_over = std::max(worst_over, bf - r.value);
            }
        }
    }
    return {worst <= 3e-2 && worst_over <= 1e-9,
            "K=30, worst |gap| " + fmtg(worst) + ", worst overshoot " + fmtg(worst_over)};
}

// 5. structure of the optima collected above: strict drop and 6 => 5
Verdict maximizer_structure() {
    int checked = 0;
    bool drop_ok = true, imp_ok = true;
    for (const auto& c : g_optima) {
        if (c.params.alpha < 0.1) continue;
        ++checked;
        double cap = mcmullen_dimension(c.spec);
        if (!(c.res.value < cap - 1e-6)) drop_ok = false;
        const auto& d = c.res.breakdown.d;
        double dj = c.res.breakdown.dj;
        bool a6 = d[5] <= dj + 1e-6;
        bool a5 = d[4] <= dj + 1e-6;
        if (a6 && !a5) imp_ok = false;
    }
    return {checked > 0 && drop_ok && imp_ok,
            std::to_string(checked) + " optima, drop " + (drop_ok ? "ok" : "VIOLATED") +
                ", 6=>5 " + (imp_ok ? "ok" : "VIOLATED")};
}

// 6. frontier: endpoints, phi o psi, lattice oracle, concavity
Verdict frontier_checks() {
    double worst_end = 0, worst_inv = 0, worst_lat = 0, worst_conc = -1e300;
    for (const auto& spec : {kA, kB, kFig, kTorus}) {
        Frontier f(spec);
        auto dm = distinguished_measures(spec);
        worst_end = std::max(worst_end, std::fabs(f.psi(f.z_hi()) - entropy(dm.p_R)));
        worst_end = std::max(worst_end, std::fabs(f.psi(f.z_lo()) - spec.log_alphabet()));
        for (int i = 0; i < 100; ++i) {
            double z = f.z_lo() + (f.z_hi() - f.z_lo()) * static_cast<double>(i) / 99.0;
            worst_inv = std::max(worst_inv, std::fabs(f.phi(f.psi(z)) - z));
        }
        // concavity second differences, psi and the d1/d6 composite
        const int G = 200;
        if (f.z_hi() - f.z_lo() > 1e-12) {
            std::vector<double> ps(G + 1), comp(G + 1);
            for (int i = 0; i <= G; ++i) {
                double z = f.z_lo() + (f.z_hi() - f.z_lo()) * static_cast<double>(i) / G;
                ps[static_cast<std::size_t>(i)] = f.psi(z);
                comp[static_cast<std::size_t>(i)] =
                    (f.psi(z) + (spec.tau() - 1.0) * z) / spec.log_m();
            }
            for (int i = 1; i < G; ++i) {
                worst_conc = std::max(worst_conc, ps[static_cast<std::size_t>(i + 1)] -
                                                      2 * ps[static_cast<std::size_t>(i)] +
                                                      ps[static_cast<std::size_t>(i - 1)]);
                worst_conc = std::max(worst_conc, comp[static_cast<std::size_t>(i + 1)] -
                                                      2 * comp[static_cast<std::size_t>(i)] +
                                                      comp[static_cast<std::size_t>(i - 1)]);
            }
        }
    }
    // lattice oracle over row distributions, R <= 3
    for (const auto& spec : {kA, kB, kFig}) {
        Frontier f(spec);
        const int R = spec.num_rows();
        const int K = ((800 + R - 1) / R) * R;
        std::vector<double> qlogq(static_cast<std::size_t>(K) + 1, 0.0);
        for (int q = 1; q <= K; ++q)
            qlogq[static_cast<std::size_t>(q)] =
                static_cast<double>(q) * std::log(static_cast<double>(q));
        const double logK = std::log(static_cast<double>(K));
        std::vector<std::pair<double, double>> cloud;  // (H, H + E)
        std::vector<int> parts(static_cast<std::size_t>(R), 0);
        auto emit = [&]() {
            double H = 0, E = 0;
            for (int r = 0; r < R; ++r) {
                int q = parts[static_cast<std::size_t>(r)];
                H -= qlogq[static_cast<std::size_t>(q)] / K;
                E += static_cast<double>(q) / K * spec.log_fiber(r);
            }
            H += logK;
            cloud.emplace_back(H, H + E);
        };
        std::function<void(int, int)> rec = [&](int r, int left) {
            if (r == R - 1) {
                parts[static_cast<std::size_t>(r)] = left;
                emit();
                return;
            }
            for (int q = 0; q <= left; ++q) {
                parts[static_cast<std::size_t>(r)] = q;
                rec(r + 1, left - q);
            }
        };
        rec(0, K);
        for (int i = 0; i <= 50; ++i) {
            double z = f.z_lo() + (f.z_hi() - f.z_lo()) * static_cast<double>(i) / 50.0;
            double lo = -1e300;
            for (const auto& [H, val] : cloud)
                if (H >= z) lo = std::max(lo, val);
            double exact = f.psi(z);
            if (exact < lo - 1e-9) return {false, "lattice point above psi at z=" + fmtg(z)};
            worst_lat = std::max(worst_lat, exact - lo);
        }
    }
    bool ok = worst_end <= 1e-8 && worst_inv <= 1e-8 && worst_lat <= 2e-3 && worst_conc <= 1e-8;
    return {ok, "endpoints " + fmtg(worst_end) + ", phi(psi) " + fmtg(worst_inv) + ", lattice " +
                    fmtg(worst_lat) + ", 2nd diff " + fmtg(worst_conc)};
}

// 7. d4/d5 combination identity on random tuples
Verdict combination_identity() {
    const std::array<CarpetSpec, 3> specs = {kTorus, kFig,
                                             CarpetSpec::from_fiber_counts(4, 16, {3, 1, 4, 2})};
    CounterRng rng{7};
    std::uint64_t ctr = 0;
    double worst = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const CarpetSpec& spec = specs[static_cast<std::size_t>(rep % 3)];
        const double logR = spec.log_rows();
        const double logD = spec.log_alphabet();
        std::array<EntropyProfile, 4> pr;
        for (auto& e : pr) {
            e.h_r = rng.uniform(0, ++ctr) * logR;
            e.h = e.h_r + rng.uniform(0, ++ctr) * (logD - e.h_r);
        }
        double alpha = rng.uniform(0, ++ctr) * 8.0;
        double lo = std::log(static_cast<double>(spec.min_fiber_count()));
        double hi = std::log(static_cast<double>(spec.max_fiber_count()));
        double H = lo + rng.uniform(0, ++ctr) * (hi - lo);
        auto params = rep % 2 ? ball_params(spec, alpha, H) : cylinder_params(alpha);
        auto b = dim_functions(spec, params, pr);
        double tau = spec.tau();
        double lhs = (tau + alpha) / (tau - 1.0) * b.d[4] - (1.0 + alpha) / (tau - 1.0) * b.d[3];
        double rhs = (pr[2].h - pr[2].h_r) / spec.log_m() + tau * pr[3].h_r / spec.log_m();
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return {worst <= 1e-10, "10^4 tuples, worst |lhs-rhs| " + fmtg(worst)};
}

// square-measure total over all depth-q approximate squares
double total_square_measure(const PiecewiseBernoulliSchedule& sched, long long q) {
    const CarpetSpec& spec = sched.spec();
    const int D = spec.alphabet_size();
    const int R = spec.num_rows();
    const long long k = spec.floor_div_tau(q);
    std::vector<int> digit(static_cast<std::size_t>(q), 0);
    std::vector<std::int32_t> ids(static_cast<std::size_t>(q));
    double total = 0;
    for (;;) {
        for (long long i = 0; i < q; ++i) {
            if (i < k)
                ids[static_cast<std::size_t>(i)] = digit[static_cast<std::size_t>(i)];
            else
                ids[static_cast<std::size_t>(i)] =
                    spec.symbol_index(digit[static_cast<std::size_t>(i)], 0);
        }
        double lm = log_measure_square(sched, SymbolicWord::from_ids(spec, ids), q);
        if (!std::isinf(lm)) total += std::exp(lm);
        long long i = q - 1;
        for (; i >= 0; --i) {
            int radix = i < k ? D : R;
            if (++digit[static_cast<std::size_t>(i)] < radix) break;
            digit[static_cast<std::size_t>(i)] = 0;
        }
        if (i < 0) break;
    }
    return total;
}

// 8. square measures add to one across schedule shapes
Verdict measure_totals() {
    double worst = 0;
    for (const auto& spec : {kA, kB}) {
        auto p1 = ProbVector::from_weights(spec, {0.5, 0.3, 0.2});
        auto p2 = ProbVector::from_weights(spec, {0.1, 0.2, 0.7});
        std::vector<PiecewiseBernoulliSchedule> schedules;
        schedules.emplace_back(spec, std::vector<ScheduleBlock>{}, p1);
        schedules.emplace_back(spec, std::vector<ScheduleBlock>{ScheduleBlock::bernoulli(3, p2)},
                               p1);
        schedules.emplace_back(
            spec,
            std::vector<ScheduleBlock>{ScheduleBlock::bernoulli(2, p1),
                                       ScheduleBlock::point_mass({2, 0, 1})},
            p2);
        for (const auto& s : schedules)
            for (long long q = 1; q <= 8; ++q)
                worst = std::max(worst, std::fabs(total_square_measure(s, q) - 1.0));
    }
    return {worst <= 1e-9, "2 carpets x 3 schedules, q <= 8, worst |total-1| " + fmtg(worst)};
}

// 9. scale table at n = 10^4
Verdict scale_table_check() {
    double worst = 0;
    for (const auto& spec : {kTorus, kFig}) {
        auto params = cylinder_params(1.0);
        auto quad = maximize(spec, params).vectors;
        SimulateOptions opts;
        opts.words = 200;
        auto res = scale_table(spec, params, quad, 10000, opts);
        for (const auto& row : res.table)
            worst = std::max(worst, std::fabs(row.simulated - row.predicted));
    }
    return {worst <= 5e-2, "torus + (3,8,(5,2,8)), n=10^4, 200 words, worst |sim-pred| " +
                               fmtg(worst)};
}

// 10. counting against raw enumeration, the type bound, and the crossbound
Verdict counting_checks() {
    for (const auto& spec : {kA, kB}) {
        const int D = spec.alphabet_size();
        Frontier f(spec);
        for (int n = 4; n <= 10; ++n) {
            long long total = 1;
            for (int i = 0; i < n; ++i) total *= D;
            std::vector<double> hs(static_cast<std::size_t>(total)),
                zs(static_cast<std::size_t>(total));
            std::vector<std::int32_t> ids(static_cast<std::size_t>(n), 0);
            for (long long code = 0; code < total; ++code) {
                long long c = code;
                for (int i = 0; i < n; ++i) {
                    ids[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(c % D);
                    c /= D;
                }
                auto e = word_entropy(SymbolicWord::from_ids(spec, ids));
                hs[static_cast<std::size_t>(code)] = e.h;
                zs[static_cast<std::size_t>(code)] = e.h_r;
            }
            for (double h : {0.25, 0.6, 1.0}) {
                long long raw = 0;
                for (long long code = 0; code < total; ++code)
                    if (hs[static_cast<std::size_t>(code)] <= h + 1e-9) ++raw;
                if (u128_to_string(count_entropy_bounded(spec, n, h)) != std::to_string(raw))
                    return {false, "pair count mismatch at n=" + std::to_string(n)};
            }
            for (double zq : {0.2, 0.5, 0.65}) {
                double z = zq * spec.log_rows();
                long long raw = 0;
                for (long long code = 0; code < total; ++code)
                    if (zs[static_cast<std::size_t>(code)] >= z - 1e-9) ++raw;
                if (u128_to_string(count_rowentropy_above(spec, n, z)) != std::to_string(raw))
                    return {false, "row count mismatch at n=" + std::to_string(n)};
            }
            // crossbound lives on psi's decreasing branch [h_r(p_D), log R]
            for (double zq : {0.0, 0.5, 0.9}) {
                double z = f.z_lo() + zq * (f.z_hi() - f.z_lo());
                double cap = f.psi(z) + 1e-9;
                for (long long code = 0; code < total; ++code)
                    if (zs[static_cast<std::size_t>(code)] >= z &&
                        hs[static_cast<std::size_t>(code)] > cap)
                        return {false, "crossbound violated at n=" + std::to_string(n)};
            }
        }
        for (int n = 4; n <= 12; ++n)
            for (double h : {0.3, 0.8, 1.05}) {
                double got = std::stod(u128_to_string(count_entropy_bounded(spec, n, h)));
                if (got > types_bound(spec, n, h) * (1 + 1e-12))
                    return {false, "type bound violated at n=" + std::to_string(n)};
            }
    }
    return {true, "raw n<=10, bound n<=12, crossbound n<=10, 2 carpets"};
}

// 11. published-curve reproduction: emitted CSV, shape, endpoints
Verdict figure_sweep() {
    auto spec = figure5_carpet();
    auto rows = run_sweep(spec, figure5_params(spec), figure5_alphas());
    {
        std::ofstream out("acceptance_figure5.csv");
        if (!out) return {false, "cannot write acceptance_figure5.csv"};
        write_sweep_csv(out, rows);
    }
    // re-read: the emitted artifact is what gets checked
    std::ifstream in("acceptance_figure5.csv");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> alphas, vals;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        alphas.push_back(std::stod(cell));
        std::getline(ls, cell, ',');
        vals.push_back(std::stod(cell));
    }
    if (vals.size() != 600) return {false, "expected 600 rows, got " + std::to_string(vals.size())};
    double jump = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        if (vals[i + 1] > vals[i] + 1e-12) return {false, "not nonincreasing at row " + std::to_string(i)};
        jump = std::max(jump, vals[i] - vals[i + 1]);
    }
    double left = std::fabs(vals.front() - mcmullen_dimension(spec));
    double want_tail = spec.log_alphabet() / ((1.0 + alphas.back()) * spec.log_n());
    double right = std::fabs(vals.back() - want_tail);
    bool ok = jump <= 5e-3 && left <= 1e-3 && right <= 1e-4;
    return {ok, "600 points, max jump " + fmtg(jump) + ", left gap " + fmtg(left) +
                    ", right gap " + fmtg(right)};
}

int run(int idx, const char* name, Verdict (*fn)()) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = fn();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-22s %s (%.1fs)\n", v.ok ? "PASS" : "FAIL", idx, name,
                v.note.c_str(), secs);
    std::fflush(stdout);
    return v.ok ? 0 : 1;
}

}  // namespace

int main() {
    int fails = 0;
    fails += run(1, "torus closed form", torus_closed_form);
    fails += run(2, "large-alpha form", large_alpha_form);
    fails += run(3, "small-alpha limit", small_alpha_limit);
    fails += run(4, "oracle equivalence", oracle_equivalence);
    fails += run(5, "maximizer structure", maximizer_structure);
    fails += run(6, "frontier", frontier_checks);
    fails += run(7, "combination identity", combination_identity);
    fails += run(8, "measure totals", measure_totals);
    fails += run(9, "scale table", scale_table_check);
    fails += run(10, "counting", counting_checks);
    fails += run(11, "figure sweep", figure_sweep);
    if (fails) std::printf("%d criterion(s) failed\n", fails);
    return fails ? 1 : 0;
}
