#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carpetdim/errors.hpp"

namespace carpetdim {

// Self-affine carpet alphabet: horizontal base N, vertical base M with
// M > N >= 2, a set of columns S inside {1..N} and per-column fiber sets
// P_a inside {1..M}. Symbols are the pairs (a, b), a in S, b in P_a,
// flattened row-major into ids 0..D-1.
class CarpetSpec {
public:
    // rows: (column value, fiber values); validated and sorted copies kept.
    static CarpetSpec create(int N, int M,
                             std::vector<std::pair<int, std::vector<int>>> rows) {
        if (N < 2) throw MalformedCarpet("horizontal base must be >= 2");
        if (M <= N) throw MalformedCarpet("vertical base must exceed horizontal base");
        if (rows.empty()) throw MalformedCarpet("at least one column required");
        std::sort(rows.begin(), rows.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        CarpetSpec s;
        s.n_ = N;
        s.m_ = M;
        for (auto& [col, fibers] : rows) {
            if (col < 1 || col > N) throw MalformedCarpet("column out of range");
            if (!s.columns_.empty() && col == s.columns_.back())
                throw MalformedCarpet("duplicate column");
            if (fibers.empty()) throw MalformedCarpet("empty fiber set");
            std::sort(fibers.begin(), fibers.end());
            for (std::size_t j = 0; j < fibers.size(); ++j) {
                if (fibers[j] < 1 || fibers[j] > M) throw MalformedCarpet("fiber out of range");
                if (j > 0 && fibers[j] == fibers[j - 1]) throw MalformedCarpet("duplicate fiber");
            }
            s.columns_.push_back(col);
            s.fibers_.push_back(std::move(fibers));
        }
        s.finish();
        return s;
    }

    static CarpetSpec full_torus(int N, int M) {
        std::vector<std::pair<int, std::vector<int>>> rows;
        std::vector<int> all(static_cast<std::size_t>(M));
        std::iota(all.begin(), all.end(), 1);
        for (int a = 1; a <= N; ++a) rows.emplace_back(a, all);
        return create(N, M, std::move(rows));
    }

    // Columns 1..counts.size(), fibers 1..counts[i]; the usual test shape.
    static CarpetSpec from_fiber_counts(int N, int M, const std::vector<int>& counts) {
        std::vector<std::pair<int, std::vector<int>>> rows;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] < 1) throw MalformedCarpet("fiber count must be positive");
            std::vector<int> f(static_cast<std::size_t>(counts[i]));
            std::iota(f.begin(), f.end(), 1);
            rows.emplace_back(static_cast<int>(i) + 1, std::move(f));
        }
        return create(N, M, std::move(rows));
    }

    int base_n() const { return n_; }
    int base_m() const { return m_; }
    int num_rows() const { return static_cast<int>(columns_.size()); }    // R
    int alphabet_size() const { return d_; }                              // D
    int fiber_count(int r) const { return static_cast<int>(fibers_[static_cast<std::size_t>(r)].size()); }
    int column_value(int r) const { return columns_[static_cast<std::size_t>(r)]; }
    int fiber_value(int r, int j) const { return fibers_[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]; }

    double tau() const { return tau_; }
    double log_n() const { return log_n_; }
    double log_m() const { return log_m_; }
    double log_fiber(int r) const { return log_fiber_[static_cast<std::size_t>(r)]; }
    double log_alphabet() const { return std::log(static_cast<double>(d_)); }  // log D
    double log_rows() const { return std::log(static_cast<double>(num_rows())); }  // log R

    int max_fiber_count() const { return max_fiber_; }
    int min_fiber_count() const { return min_fiber_; }
    // number of rows attaining the maximal fiber count
    int max_fiber_multiplicity() const { return max_fiber_rows_; }
    bool all_fibers_equal() const { return max_fiber_ == min_fiber_; }

    int symbol_index(int r, int j) const { return row_offset_[static_cast<std::size_t>(r)] + j; }
    int symbol_row(int s) const { return sym_row_[static_cast<std::size_t>(s)]; }
    int symbol_fiber(int s) const { return s - row_offset_[static_cast<std::size_t>(sym_row_[static_cast<std::size_t>(s)])]; }
    int row_offset(int r) const { return row_offset_[static_cast<std::size_t>(r)]; }

    // Exact floors of n/tau and n*tau. When tau = v/u (N, M powers of a
    // common base) the floor is integer arithmetic; a double rounding of
    // e.g. tau = 3/2 would otherwise misfloor exact multiples.
    bool tau_is_rational() const { return tau_num_ != 0; }
    long long floor_div_tau(long long n) const {
        if (n < 0) throw DomainError("negative depth");
        if (tau_num_ != 0) {
            return static_cast<long long>(
                (static_cast<__int128>(n) * tau_den_) / tau_num_);
        }
        return static_cast<long long>(std::floor(static_cast<double>(n) / tau_));
    }
    long long floor_mul_tau(long long n) const {
        if (n < 0) throw DomainError("negative depth");
        if (tau_num_ != 0) {
            return static_cast<long long>(
                (static_cast<__int128>(n) * tau_num_) / tau_den_);
        }
        return static_cast<long long>(std::floor(static_cast<double>(n) * tau_));
    }
    // floor(tau * (tau*n + f)) and ceil of the same, both on the real value
    long long floor_tau_tau(long long n, long long f) const {
        if (tau_num_ != 0) {
            __int128 num = static_cast<__int128>(tau_num_) *
                           (static_cast<__int128>(tau_num_) * n + static_cast<__int128>(f) * tau_den_);
            __int128 den = static_cast<__int128>(tau_den_) * tau_den_;
            return static_cast<long long>(num / den);
        }
        return static_cast<long long>(std::floor(tau_ * (tau_ * static_cast<double>(n) + static_cast<double>(f))));
    }
    long long ceil_tau_tau(long long n, long long f) const {
        if (tau_num_ != 0) {
            __int128 num = static_cast<__int128>(tau_num_) *
                           (static_cast<__int128>(tau_num_) * n + static_cast<__int128>(f) * tau_den_);
            __int128 den = static_cast<__int128>(tau_den_) * tau_den_;
            return static_cast<long long>((num + den - 1) / den);
        }
        return static_cast<long long>(std::ceil(tau_ * (tau_ * static_cast<double>(n) + static_cast<double>(f))));
    }

private:
    void finish() {
        d_ = 0;
        row_offset_.clear();
        for (auto& f : fibers_) {
            row_offset_.push_back(d_);
            d_ += static_cast<int>(f.size());
        }
        sym_row_.resize(static_cast<std::size_t>(d_));
        for (int r = 0; r < num_rows(); ++r)
            for (int j = 0; j < fiber_count(r); ++j)
                sym_row_[static_cast<std::size_t>(symbol_index(r, j))] = r;
        log_n_ = std::log(static_cast<double>(n_));
        log_m_ = std::log(static_cast<double>(m_));
        tau_ = log_m_ / log_n_;
        log_fiber_.clear();
        max_fiber_ = 0;
        min_fiber_ = m_ + 1;
        for (int r = 0; r < num_rows(); ++r) {
            int t = fiber_count(r);
            log_fiber_.push_back(std::log(static_cast<double>(t)));
            max_fiber_ = std::max(max_fiber_, t);
            min_fiber_ = std::min(min_fiber_, t);
        }
        max_fiber_rows_ = 0;
        for (int r = 0; r < num_rows(); ++r)
            if (fiber_count(r) == max_fiber_) ++max_fiber_rows_;
        detect_rational_tau();
    }

    // N = c^u, M = c^v for the smallest base c makes tau = v/u exactly.
    void detect_rational_tau() {
        tau_num_ = tau_den_ = 0;
        for (int c = 2; c <= n_; ++c) {
            auto power_of = [c](int x) -> int {
                int e = 0;
                long long p = 1;
                while (p < x) { p *= c; ++e; }
                return p == x ? e : 0;
            };
            int u = power_of(n_);
            if (u == 0) continue;
            int v = power_of(m_);
            if (v == 0) continue;
            tau_num_ = v;   // tau = v/u
            tau_den_ = u;
            tau_ = static_cast<double>(v) / static_cast<double>(u);
            return;
        }
    }

    int n_ = 0, m_ = 0, d_ = 0;
    std::vector<int> columns_;
    std::vector<std::vector<int>> fibers_;
    std::vector<int> row_offset_;
    std::vector<int> sym_row_;
    std::vector<double> log_fiber_;
    double tau_ = 0, log_n_ = 0, log_m_ = 0;
    long long tau_num_ = 0, tau_den_ = 0;
    int max_fiber_ = 0, min_fiber_ = 0, max_fiber_rows_ = 0;
};

// Probability vector on the carpet alphabet. Invariants: size D,
// components >= 0, sum within 1e-12 of 1.
class ProbVector {
public:
    static constexpr double kSumTolerance = 1e-12;

    static ProbVector from_weights(const CarpetSpec& spec, std::vector<double> w) {
        if (static_cast<int>(w.size()) != spec.alphabet_size())
            throw DomainError("weight vector size must equal alphabet size");
        double sum = 0;
        for (double x : w) {
            if (!(x >= 0)) throw DomainError("negative or NaN weight");
            sum += x;
        }
        if (std::fabs(sum - 1.0) > kSumTolerance)
            throw DomainError("weights must sum to 1 within 1e-12");
        ProbVector p;
        p.w_ = std::move(w);
        return p;
    }

    double operator[](std::size_t i) const { return w_[i]; }
    int size() const { return static_cast<int>(w_.size()); }
    std::span<const double> weights() const { return w_; }

private:
    std::vector<double> w_;
};

// Shannon entropy in nats, 0 log 0 = 0.
inline double entropy(std::span<const double> w) {
    double h = 0;
    for (double x : w)
        if (x > 0) h -= x * std::log(x);
    return h;
}

inline double entropy(const ProbVector& p) { return entropy(p.weights()); }

inline std::vector<double> row_marginals(const CarpetSpec& spec, const ProbVector& p) {
    std::vector<double> rows(static_cast<std::size_t>(spec.num_rows()), 0.0);
    for (int r = 0; r < spec.num_rows(); ++r)
        for (int j = 0; j < spec.fiber_count(r); ++j)
            rows[static_cast<std::size_t>(r)] += p[static_cast<std::size_t>(spec.symbol_index(r, j))];
    return rows;
}

inline double row_entropy(const CarpetSpec& spec, const ProbVector& p) {
    auto rows = row_marginals(spec, p);
    return entropy(rows);
}

// dim(p) = (h(p) + (tau - 1) h_r(p)) / log M
inline double bernoulli_dimension(const CarpetSpec& spec, const ProbVector& p) {
    return (entropy(p) + (spec.tau() - 1.0) * row_entropy(spec, p)) / spec.log_m();
}

// H(nu) = sum_a nu_a log T_a for the row marginal nu of p; the size
// exponent a Bernoulli-random ball target contributes.
inline double bernoulli_H(const CarpetSpec& spec, const ProbVector& p) {
    auto rows = row_marginals(spec, p);
    double s = 0;
    for (int r = 0; r < spec.num_rows(); ++r) s += rows[static_cast<std::size_t>(r)] * spec.log_fiber(r);
    return s;
}

struct DistinguishedMeasures {
    ProbVector p_D;  // uniform on symbols
    ProbVector p_R;  // uniform rows, uniform fibers within each row
    ProbVector p_d;  // the dimension-maximal measure
};

inline DistinguishedMeasures distinguished_measures(const CarpetSpec& spec) {
    const int D = spec.alphabet_size();
    const int R = spec.num_rows();
    std::vector<double> wD(static_cast<std::size_t>(D)), wR(static_cast<std::size_t>(D)), wd(static_cast<std::size_t>(D));
    double Z = 0;
    std::vector<double> td(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        // T_a^(1/tau - 1) per symbol; the row weight is T_a^(1/tau) / Z
        td[static_cast<std::size_t>(r)] = std::exp((1.0 / spec.tau() - 1.0) * spec.log_fiber(r));
        Z += static_cast<double>(spec.fiber_count(r)) * td[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < R; ++r) {
        for (int j = 0; j < spec.fiber_count(r); ++j) {
            std::size_t s = static_cast<std::size_t>(spec.symbol_index(r, j));
            wD[s] = 1.0 / static_cast<double>(D);
            wR[s] = 1.0 / (static_cast<double>(R) * static_cast<double>(spec.fiber_count(r)));
            wd[s] = td[static_cast<std::size_t>(r)] / Z;
        }
    }
    return DistinguishedMeasures{ProbVector::from_weights(spec, std::move(wD)),
                                 ProbVector::from_weights(spec, std::move(wR)),
                                 ProbVector::from_weights(spec, std::move(wd))};
}

// log_N sum_a T_a^(1/tau); equals dim(p_d).
inline double mcmullen_dimension(const CarpetSpec& spec) {
    double Z = 0;
    for (int r = 0; r < spec.num_rows(); ++r)
        Z += std::exp(spec.log_fiber(r) / spec.tau());
    return std::log(Z) / spec.log_n();
}

}  // namespace carpetdim
