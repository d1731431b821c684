#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/errors.hpp"
#include "carpetdim/parallel.hpp"
#include "carpetdim/rng.hpp"
#include "carpetdim/word.hpp"

namespace carpetdim {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// One block of a piecewise product measure. Point-mass and column-locked
// blocks carry one entry per position; their length is implicit.
struct ScheduleBlock {
    enum class Kind { bernoulli, point_mass, column_locked };
    Kind kind = Kind::bernoulli;
    long long length = 0;
    std::vector<double> weights;        // bernoulli, size D
    std::vector<std::int32_t> symbols;  // point_mass
    std::vector<std::int32_t> rows;     // column_locked

    static ScheduleBlock bernoulli(long long len, const ProbVector& p) {
        ScheduleBlock b;
        b.kind = Kind::bernoulli;
        b.length = len;
        b.weights.assign(p.weights().begin(), p.weights().end());
        return b;
    }
    static ScheduleBlock point_mass(std::vector<std::int32_t> symbols) {
        ScheduleBlock b;
        b.kind = Kind::point_mass;
        b.length = static_cast<long long>(symbols.size());
        b.symbols = std::move(symbols);
        return b;
    }
    static ScheduleBlock column_locked(std::vector<std::int32_t> rows) {
        ScheduleBlock b;
        b.kind = Kind::column_locked;
        b.length = static_cast<long long>(rows.size());
        b.rows = std::move(rows);
        return b;
    }
};

// Product measure on words whose per-position distribution is constant on
// blocks; an optional Bernoulli tail extends it to all lengths. Pair and
// row weights are served in log space with an explicit -inf for mass 0.
class PiecewiseBernoulliSchedule {
public:
    PiecewiseBernoulliSchedule(CarpetSpec spec, std::vector<ScheduleBlock> blocks,
                               std::optional<ProbVector> tail)
        : spec_(std::move(spec)), tail_(std::move(tail)) {
        const int D = spec_.alphabet_size();
        for (auto& b : blocks) {
            if (b.length == 0) continue;  // empty blocks are legal input, dropped
            if (b.length < 0) throw DomainError("negative block length");
            switch (b.kind) {
                case ScheduleBlock::Kind::bernoulli:
                    if (static_cast<int>(b.weights.size()) != D)
                        throw DomainError("block distribution size mismatch");
                    break;
                case ScheduleBlock::Kind::point_mass:
                    for (auto s : b.symbols)
                        if (s < 0 || s >= D) throw DomainError("point mass outside the digit set");
                    break;
                case ScheduleBlock::Kind::column_locked:
                    for (auto r : b.rows)
                        if (r < 0 || r >= spec_.num_rows())
                            throw DomainError("locked column outside the row set");
                    break;
            }
            blocks_.push_back(std::move(b));
        }
        if (tail_ && static_cast<int>(tail_->size()) != D)
            throw DomainError("tail distribution size mismatch");
        long long end = 0;
        for (const auto& b : blocks_) {
            end += b.length;
            ends_.push_back(end);
        }
        caches_.resize(blocks_.size());
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            if (blocks_[i].kind == ScheduleBlock::Kind::bernoulli)
                caches_[i] = make_cache(blocks_[i].weights);
        if (tail_) {
            std::vector<double> w(tail_->weights().begin(), tail_->weights().end());
            tail_cache_ = make_cache(w);
        }
    }

    const CarpetSpec& spec() const { return spec_; }
    const std::vector<ScheduleBlock>& blocks() const { return blocks_; }
    bool has_tail() const { return tail_.has_value(); }
    long long covered() const {
        return has_tail() ? std::numeric_limits<long long>::max()
                          : (ends_.empty() ? 0 : ends_.back());
    }

    // log weight the position's distribution gives to the full pair
    double pair_log_weight(long long pos, int symbol) const {
        int bi = locate(pos);
        if (bi < 0) {
            double w = (*tail_)[static_cast<std::size_t>(symbol)];
            return w > 0 ? std::log(w) : kLogZero;
        }
        const auto& b = blocks_[static_cast<std::size_t>(bi)];
        long long off = pos - (bi == 0 ? 0 : ends_[static_cast<std::size_t>(bi - 1)]) - 1;
        switch (b.kind) {
            case ScheduleBlock::Kind::bernoulli: {
                double w = b.weights[static_cast<std::size_t>(symbol)];
                return w > 0 ? std::log(w) : kLogZero;
            }
            case ScheduleBlock::Kind::point_mass:
                return symbol == b.symbols[static_cast<std::size_t>(off)] ? 0.0 : kLogZero;
            case ScheduleBlock::Kind::column_locked: {
                int r = b.rows[static_cast<std::size_t>(off)];
                return spec_.symbol_row(symbol) == r ? -spec_.log_fiber(r) : kLogZero;
            }
        }
        return kLogZero;
    }

    // log weight of the position's row marginal
    double row_log_weight(long long pos, int row) const {
        int bi = locate(pos);
        if (bi < 0) return tail_cache_.logrow[static_cast<std::size_t>(row)];
        const auto& b = blocks_[static_cast<std::size_t>(bi)];
        long long off = pos - (bi == 0 ? 0 : ends_[static_cast<std::size_t>(bi - 1)]) - 1;
        switch (b.kind) {
            case ScheduleBlock::Kind::bernoulli:
                return caches_[static_cast<std::size_t>(bi)].logrow[static_cast<std::size_t>(row)];
            case ScheduleBlock::Kind::point_mass:
                return spec_.symbol_row(b.symbols[static_cast<std::size_t>(off)]) == row ? 0.0
                                                                                        : kLogZero;
            case ScheduleBlock::Kind::column_locked:
                return b.rows[static_cast<std::size_t>(off)] == row ? 0.0 : kLogZero;
        }
        return kLogZero;
    }

    // Running pair/row log-mass snapshots at the given sorted positions;
    // zero factors are counted separately so that window differences stay
    // well defined. Snapshot index i covers positions 1..at[i].
    struct Snapshots {
        std::vector<long long> at;
        std::vector<double> pair_sum, row_sum;
        std::vector<long long> pair_zero, row_zero;
    };

    Snapshots snapshots(const SymbolicWord& word, std::vector<long long> positions) const {
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
        if (!positions.empty() && positions.front() < 0)
            throw DomainError("negative snapshot position");
        Snapshots out;
        out.at = positions;
        if (positions.empty()) return out;
        const long long last = positions.back();
        if (word.size() < last) throw WordTooShort("word shorter than the deepest scale");
        if (covered() < last) throw ScheduleTooShort("schedule ends before the deepest scale");

        const std::int32_t* ids = word.ids().data();
        double ps = 0, rs = 0;
        long long pz = 0, rz = 0;
        std::size_t ci = 0;
        auto snap = [&](long long pos) {
            while (ci < out.at.size() && out.at[ci] == pos) {
                out.pair_sum.push_back(ps);
                out.row_sum.push_back(rs);
                out.pair_zero.push_back(pz);
                out.row_zero.push_back(rz);
                ++ci;
            }
        };
        snap(0);
        long long pos = 0;
        for (std::size_t bi = 0; bi <= blocks_.size() && pos < last; ++bi) {
            long long block_end;
            const ScheduleBlock* b = nullptr;
            const BlockCache* cache = nullptr;
            if (bi < blocks_.size()) {
                b = &blocks_[bi];
                cache = &caches_[bi];
                block_end = std::min(ends_[bi], last);
            } else {
                cache = &tail_cache_;
                block_end = last;
            }
            if (b == nullptr || b->kind == ScheduleBlock::Kind::bernoulli) {
                for (; pos < block_end;) {
                    ++pos;
                    int s = ids[pos - 1];
                    double lp = cache->logp[static_cast<std::size_t>(s)];
                    if (lp == kLogZero)
                        ++pz;
                    else
                        ps += lp;
                    double lr = cache->logrow[static_cast<std::size_t>(spec_.symbol_row(s))];
                    if (lr == kLogZero)
                        ++rz;
                    else
                        rs += lr;
                    snap(pos);
                }
            } else if (b->kind == ScheduleBlock::Kind::point_mass) {
                long long start = bi == 0 ? 0 : ends_[bi - 1];
                for (; pos < block_end;) {
                    ++pos;
                    int s = ids[pos - 1];
                    int want = b->symbols[static_cast<std::size_t>(pos - start - 1)];
                    if (s != want) ++pz;
                    if (spec_.symbol_row(s) != spec_.symbol_row(want)) ++rz;
                    snap(pos);
                }
            } else {
                long long start = bi == 0 ? 0 : ends_[bi - 1];
                for (; pos < block_end;) {
                    ++pos;
                    int s = ids[pos - 1];
                    int want = b->rows[static_cast<std::size_t>(pos - start - 1)];
                    if (spec_.symbol_row(s) == want)
                        ps -= spec_.log_fiber(want);
                    else {
                        ++pz;
                        ++rz;
                    }
                    snap(pos);
                }
            }
        }
        return out;
    }

    // One symbol id per position, drawn independently from the block
    // distributions. counter = position, so draws are position-stable.
    std::vector<std::int32_t> sample_ids(long long length, std::uint64_t seed,
                                         std::uint64_t stream) const {
        if (length < 1) throw DomainError("sample length must be >= 1");
        if (covered() < length) throw ScheduleTooShort("schedule ends before the sample length");
        CounterRng rng{seed};
        std::vector<std::int32_t> ids(static_cast<std::size_t>(length));
        long long pos = 0;
        for (std::size_t bi = 0; bi <= blocks_.size() && pos < length; ++bi) {
            long long block_end;
            const ScheduleBlock* b = nullptr;
            const BlockCache* cache = nullptr;
            if (bi < blocks_.size()) {
                b = &blocks_[bi];
                cache = &caches_[bi];
                block_end = std::min(ends_[bi], length);
            } else {
                cache = &tail_cache_;
                block_end = length;
            }
            if (b == nullptr || b->kind == ScheduleBlock::Kind::bernoulli) {
                const double* cum = cache->cum.data();
                const int D = spec_.alphabet_size();
                for (; pos < block_end;) {
                    ++pos;
                    double u = rng.uniform(stream, static_cast<std::uint64_t>(pos));
                    int s = 0;
                    while (s < D - 1 && u >= cum[s]) ++s;
                    ids[static_cast<std::size_t>(pos - 1)] = static_cast<std::int32_t>(s);
                }
            } else if (b->kind == ScheduleBlock::Kind::point_mass) {
                long long start = bi == 0 ? 0 : ends_[bi - 1];
                for (; pos < block_end;) {
                    ++pos;
                    ids[static_cast<std::size_t>(pos - 1)] =
                        b->symbols[static_cast<std::size_t>(pos - start - 1)];
                }
            } else {
                long long start = bi == 0 ? 0 : ends_[bi - 1];
                for (; pos < block_end;) {
                    ++pos;
                    int r = b->rows[static_cast<std::size_t>(pos - start - 1)];
                    int t = spec_.fiber_count(r);
                    double u = rng.uniform(stream, static_cast<std::uint64_t>(pos));
                    int j = std::min(t - 1, static_cast<int>(u * static_cast<double>(t)));
                    ids[static_cast<std::size_t>(pos - 1)] =
                        static_cast<std::int32_t>(spec_.symbol_index(r, j));
                }
            }
        }
        return ids;
    }

private:
    struct BlockCache {
        std::vector<double> logp;    // per symbol
        std::vector<double> logrow;  // per row marginal
        std::vector<double> cum;     // sampling CDF per symbol
    };

    BlockCache make_cache(const std::vector<double>& w) const {
        BlockCache c;
        const int D = spec_.alphabet_size();
        const int R = spec_.num_rows();
        c.logp.resize(static_cast<std::size_t>(D));
        c.cum.resize(static_cast<std::size_t>(D));
        std::vector<double> rowmass(static_cast<std::size_t>(R), 0.0);
        double acc = 0;
        for (int s = 0; s < D; ++s) {
            double x = w[static_cast<std::size_t>(s)];
            c.logp[static_cast<std::size_t>(s)] = x > 0 ? std::log(x) : kLogZero;
            rowmass[static_cast<std::size_t>(spec_.symbol_row(s))] += x;
            acc += x;
            c.cum[static_cast<std::size_t>(s)] = acc;
        }
        c.cum[static_cast<std::size_t>(D - 1)] = 1.0;  // guard against rounding
        c.logrow.resize(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r)
            c.logrow[static_cast<std::size_t>(r)] =
                rowmass[static_cast<std::size_t>(r)] > 0
                    ? std::log(rowmass[static_cast<std::size_t>(r)])
                    : kLogZero;
        return c;
    }

    // block index containing 1-based pos, or -1 for the tail
    int locate(long long pos) const {
        if (pos < 1) throw DomainError("positions are 1-based");
        auto it = std::lower_bound(ends_.begin(), ends_.end(), pos);
        if (it == ends_.end()) {
            if (!tail_) throw ScheduleTooShort("position beyond the last block");
            return -1;
        }
        return static_cast<int>(it - ends_.begin());
    }

    CarpetSpec spec_;
    std::vector<ScheduleBlock> blocks_;
    std::optional<ProbVector> tail_;
    std::vector<long long> ends_;
    std::vector<BlockCache> caches_;
    BlockCache tail_cache_;
};

// log mu(B_q(word)): full pair weights to floor(q/tau), row marginals on
// the remaining positions up to q. -inf when any factor vanishes.
inline double log_measure_square(const PiecewiseBernoulliSchedule& schedule,
                                 const SymbolicWord& word, long long q) {
    if (q < 1) throw DomainError("square depth must be >= 1");
    long long k = schedule.spec().floor_div_tau(q);
    auto snap = schedule.snapshots(word, {k, q});
    std::size_t ik = 0;  // tau > 1 forces k < q
    std::size_t iq = snap.at.size() - 1;
    if (snap.pair_zero[ik] > 0) return kLogZero;
    if (snap.row_zero[iq] - snap.row_zero[ik] > 0) return kLogZero;
    return snap.pair_sum[ik] + (snap.row_sum[iq] - snap.row_sum[ik]);
}

// d_m = log mu(B_m) / (-m log N) for each requested scale, via one pass
// over the word.
inline std::vector<std::pair<long long, double>> local_dimension_curve(
    const PiecewiseBernoulliSchedule& schedule, const SymbolicWord& word,
    const std::vector<long long>& scales) {
    const CarpetSpec& spec = schedule.spec();
    std::vector<long long> cps;
    cps.reserve(scales.size() * 2);
    for (long long m : scales) {
        if (m < 1) throw DomainError("scales must be >= 1");
        cps.push_back(m);
        cps.push_back(spec.floor_div_tau(m));
    }
    auto snap = schedule.snapshots(word, cps);
    auto index_of = [&](long long pos) {
        return static_cast<std::size_t>(
            std::lower_bound(snap.at.begin(), snap.at.end(), pos) - snap.at.begin());
    };
    std::vector<std::pair<long long, double>> out;
    out.reserve(scales.size());
    for (long long m : scales) {
        std::size_t ik = index_of(spec.floor_div_tau(m));
        std::size_t im = index_of(m);
        double lm;
        if (snap.pair_zero[ik] > 0 || snap.row_zero[im] - snap.row_zero[ik] > 0)
            lm = kLogZero;
        else
            lm = snap.pair_sum[ik] + (snap.row_sum[im] - snap.row_sum[ik]);
        out.emplace_back(m, lm / (-static_cast<double>(m) * spec.log_n()));
    }
    return out;
}

inline SymbolicWord sample_word(const PiecewiseBernoulliSchedule& schedule, long long length,
                                std::uint64_t seed, std::uint64_t stream = 0) {
    return SymbolicWord::from_ids(schedule.spec(), schedule.sample_ids(length, seed, stream));
}

// The lower-bound construction's measure: p- while both regimes are
// Bernoulli, p1 on the pair/row mismatch window, the target (point masses,
// and for balls a column-locked stretch), p2 while the target still rules
// the rows, then the p+ tail.
inline PiecewiseBernoulliSchedule heuristic_schedule(const CarpetSpec& spec, long long n,
                                                     long long f_n, const SymbolicWord& target,
                                                     const std::array<ProbVector, 4>& quadruple,
                                                     TargetKind kind) {
    if (n < 0 || f_n < 0) throw DomainError("n and f_n must be >= 0");
    if (target.size() < f_n) throw TargetTooShort("target shorter than f_n");
    const ProbVector& p_minus = quadruple[0];
    const ProbVector& p_1 = quadruple[1];
    const ProbVector& p_2 = quadruple[2];
    const ProbVector& p_plus = quadruple[3];

    std::vector<ScheduleBlock> blocks;
    long long l_minus = std::min(n, spec.floor_div_tau(n + f_n));
    if (l_minus > 0) blocks.push_back(ScheduleBlock::bernoulli(l_minus, p_minus));
    if (n - l_minus > 0) blocks.push_back(ScheduleBlock::bernoulli(n - l_minus, p_1));
    if (f_n > 0) {
        if (kind == TargetKind::cylinder) {
            std::vector<std::int32_t> syms(target.ids().begin(), target.ids().begin() + f_n);
            blocks.push_back(ScheduleBlock::point_mass(std::move(syms)));
        } else {
            long long fx = spec.floor_div_tau(f_n);
            if (fx > 0) {
                std::vector<std::int32_t> syms(target.ids().begin(), target.ids().begin() + fx);
                blocks.push_back(ScheduleBlock::point_mass(std::move(syms)));
            }
            if (f_n - fx > 0) {
                std::vector<std::int32_t> rows;
                rows.reserve(static_cast<std::size_t>(f_n - fx));
                for (long long t = fx + 1; t <= f_n; ++t)
                    rows.push_back(spec.symbol_row(target.id(t)));
                blocks.push_back(ScheduleBlock::column_locked(std::move(rows)));
            }
        }
    }
    long long l2 = spec.floor_mul_tau(n) - n;
    if (l2 > 0) blocks.push_back(ScheduleBlock::bernoulli(l2, p_2));
    return PiecewiseBernoulliSchedule(spec, std::move(blocks), p_plus);
}

struct ScaleRow {
    long long m = 0;
    double predicted = 0;
    double simulated = 0;
};

struct SimulationResult {
    long long n = 0, f = 0;
    std::array<ScaleRow, 6> table{};
    std::vector<std::pair<long long, double>> curve;  // Monte-Carlo means, six scales included
};

struct SimulateOptions {
    int words = 200;            // Monte-Carlo sample size (>= 100 for the table contract)
    std::uint64_t seed = 1;
    long long m6_factor = 150;  // m6 >= factor * n, see note below
    int curve_points = 0;       // extra thinned curve scales; 0 = table scales only
};

namespace detail {

// Ball targets need row frequencies whose mean log fiber count is H; the
// exponential tilt T_a^beta is monotone in beta, so bisect.
inline std::vector<double> target_row_dist(const CarpetSpec& spec, double H) {
    const int R = spec.num_rows();
    auto dist = [&](double beta) {
        std::vector<double> w(static_cast<std::size_t>(R));
        double lmax = -1e300;
        for (int r = 0; r < R; ++r) lmax = std::max(lmax, beta * spec.log_fiber(r));
        double z = 0;
        for (int r = 0; r < R; ++r) {
            w[static_cast<std::size_t>(r)] = std::exp(beta * spec.log_fiber(r) - lmax);
            z += w[static_cast<std::size_t>(r)];
        }
        for (auto& x : w) x /= z;
        return w;
    };
    auto mean_logT = [&](double beta) {
        auto w = dist(beta);
        double e = 0;
        for (int r = 0; r < R; ++r) e += w[static_cast<std::size_t>(r)] * spec.log_fiber(r);
        return e;
    };
    if (spec.all_fibers_equal()) return dist(0.0);
    double lo = -512.0, hi = 512.0;
    if (H <= mean_logT(lo)) return dist(lo);
    if (H >= mean_logT(hi)) return dist(hi);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mean_logT(mid) < H ? lo : hi) = mid;
    }
    return dist(0.5 * (lo + hi));
}

inline SymbolicWord synthesize_target(const CarpetSpec& spec, const DimParams& params,
                                      long long f, std::uint64_t seed) {
    constexpr std::uint64_t kTargetStream = 1'000'000'007ULL;
    CounterRng rng{seed};
    std::vector<std::int32_t> ids;
    ids.reserve(static_cast<std::size_t>(f));
    if (params.kind == TargetKind::cylinder) {
        const int D = spec.alphabet_size();
        for (long long t = 1; t <= f; ++t) {
            double u = rng.uniform(kTargetStream, static_cast<std::uint64_t>(t));
            int s = std::min(D - 1, static_cast<int>(u * static_cast<double>(D)));
            ids.push_back(static_cast<std::int32_t>(s));
        }
    } else {
        auto rowdist = target_row_dist(spec, params.H);
        std::vector<double> cum(rowdist.size());
        double acc = 0;
        for (std::size_t r = 0; r < rowdist.size(); ++r) {
            acc += rowdist[r];
            cum[r] = acc;
        }
        cum.back() = 1.0;
        const int R = spec.num_rows();
        for (long long t = 1; t <= f; ++t) {
            double u = rng.uniform(kTargetStream, static_cast<std::uint64_t>(t));
            int r = 0;
            while (r < R - 1 && u >= cum[static_cast<std::size_t>(r)]) ++r;
            double v = rng.uniform(kTargetStream + 1, static_cast<std::uint64_t>(t));
            int tcount = spec.fiber_count(r);
            int j = std::min(tcount - 1, static_cast<int>(v * static_cast<double>(tcount)));
            ids.push_back(static_cast<std::int32_t>(spec.symbol_index(r, j)));
        }
    }
    return SymbolicWord::from_ids(spec, std::move(ids));
}

}  // namespace detail

// Predicted-vs-simulated local dimensions at the six characteristic scales
// of the lower-bound measure, f = round(alpha n).
//
// m2..m5 are forced by the construction. m1 = n/4 sits inside the p- regime.
// m6 must reach far enough past m5 that the o(1) carryover of the non-tail
// blocks (point-mass stretches contribute zero entropy) is below the 5e-2
// acceptance band; 4 ceil(tau(tau n + f)) leaves a deficit of roughly
// 3n/m6 nats/logN on a torus, so m6 also gets a floor of m6_factor * n.
inline SimulationResult simulate_schedule(const CarpetSpec& spec, const DimParams& params,
                                          const std::array<ProbVector, 4>& quadruple,
                                          long long n, const SimulateOptions& opts = {}) {
    if (n < 4) throw DomainError("n too small for distinct scales");
    if (opts.words < 1) throw DomainError("need at least one sampled word");
    const long long f = std::llround(params.alpha * static_cast<double>(n));
    std::array<long long, 6> m;
    m[0] = n / 4;
    m[1] = n + f;
    m[2] = spec.floor_mul_tau(n) + f;
    m[3] = spec.floor_mul_tau(n + f);
    m[4] = spec.floor_tau_tau(n, f);
    m[5] = std::max(4 * spec.ceil_tau_tau(n, f), opts.m6_factor * n);
    for (int i = 0; i + 1 < 6; ++i)
        if (m[static_cast<std::size_t>(i)] >= m[static_cast<std::size_t>(i + 1)])
            throw DomainError("scales collide; n (or alpha) too small");

    std::array<EntropyProfile, 4> profiles{
        profile_of(spec, quadruple[0]), profile_of(spec, quadruple[1]),
        profile_of(spec, quadruple[2]), profile_of(spec, quadruple[3])};
    DimBreakdown predicted = dim_functions(spec, params, profiles);

    SymbolicWord target = detail::synthesize_target(spec, params, f, opts.seed);
    auto schedule = heuristic_schedule(spec, n, f, target, quadruple, params.kind);

    std::vector<long long> scales(m.begin(), m.end());
    if (opts.curve_points > 0) {
        long long stride = std::max<long long>(1, m[5] / opts.curve_points);
        for (long long x = stride; x <= m[5]; x += stride) scales.push_back(x);
    }
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

    // Words run in parallel; each lands in its own row and the reduction
    // walks rows in word order, so the sums match the sequential ones bit
    // for bit on any worker count.
    const auto nw = static_cast<std::size_t>(opts.words);
    std::vector<std::vector<double>> per_word(nw);
    detail::parallel_for(nw, [&](std::size_t w) {
        SymbolicWord word = sample_word(schedule, m[5], opts.seed, static_cast<std::uint64_t>(w));
        auto curve = local_dimension_curve(schedule, word, scales);
        auto& row = per_word[w];
        row.reserve(scales.size());
        for (const auto& [sc, dm] : curve) row.push_back(dm);
    });
    std::vector<double> mean(scales.size(), 0.0);
    for (const auto& row : per_word)
        for (std::size_t i = 0; i < scales.size(); ++i) mean[i] += row[i];
    for (auto& x : mean) x /= static_cast<double>(opts.words);

    SimulationResult res;
    res.n = n;
    res.f = f;
    res.curve.reserve(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) res.curve.emplace_back(scales[i], mean[i]);
    for (int i = 0; i < 6; ++i) {
        auto it = std::lower_bound(scales.begin(), scales.end(), m[static_cast<std::size_t>(i)]);
        res.table[static_cast<std::size_t>(i)] = {
            m[static_cast<std::size_t>(i)], predicted.d[static_cast<std::size_t>(i)],
            mean[static_cast<std::size_t>(it - scales.begin())]};
    }
    return res;
}

inline SimulationResult scale_table(const CarpetSpec& spec, const DimParams& params,
                                    const std::array<ProbVector, 4>& quadruple, long long n,
                                    const SimulateOptions& opts = {}) {
    SimulateOptions o = opts;
    o.curve_points = 0;
    return simulate_schedule(spec, params, quadruple, n, o);
}

}  // namespace carpetdim
