#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

using u128 = unsigned __int128;

inline std::string u128_to_string(u128 x) {
    if (x == 0) return "0";
    std::string s;
    while (x > 0) {
        s += static_cast<char>('0' + static_cast<int>(x % 10));
        x /= 10;
    }
    return {s.rbegin(), s.rend()};
}

struct CountOptions {
    double max_type_classes = 1e8;  // cap on enumerated integer compositions
};

namespace detail {

inline u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ResourceLimit("count exceeds 128-bit range");
    return r;
}

inline u128 checked_add(u128 a, u128 b) {
    u128 r = a + b;
    if (r < a) throw ResourceLimit("count exceeds 128-bit range");
    return r;
}

inline u128 binomial_u128(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (long long i = 1; i <= k; ++i) {
        // r * (n - k + i) is divisible by i at every step
        r = checked_mul(r, static_cast<u128>(n - k + i));
        r /= static_cast<u128>(i);
    }
    return r;
}

inline u128 pow_u128(long long base, long long e) {
    u128 r = 1;
    for (long long i = 0; i < e; ++i) r = checked_mul(r, static_cast<u128>(base));
    return r;
}

inline double composition_count(long long n, int parts) {
    double r = 1;
    for (int i = 1; i < parts; ++i)
        r *= static_cast<double>(n + i) / static_cast<double>(i);
    return r;
}

// Enumerates compositions of n into `parts` nonnegative counts, carrying
// the running multinomial coefficient; visit(counts, multinomial).
template <typename Visit>
void for_each_type(long long n, int parts, Visit&& visit) {
    std::vector<long long> counts(static_cast<std::size_t>(parts), 0);
    auto rec = [&](auto&& self, int idx, long long rem, u128 coeff) -> void {
        if (idx == parts - 1) {
            counts[static_cast<std::size_t>(idx)] = rem;
            visit(counts, coeff);  // C(rem, rem) = 1
            return;
        }
        for (long long k = 0; k <= rem; ++k) {
            counts[static_cast<std::size_t>(idx)] = k;
            self(self, idx + 1, rem - k, checked_mul(coeff, binomial_u128(rem, k)));
        }
    };
    rec(rec, 0, n, 1);
}

}  // namespace detail

// Exact number of words in Q^n whose empirical pair entropy is <= h, by
// summing multinomials over type classes. The entropy comparison carries
// a 1e-9 slack so that types meant to sit exactly on the bound (h = log D
// and friends) are not lost to rounding.
inline u128 count_entropy_bounded(const CarpetSpec& spec, long long n, double h,
                                  const CountOptions& opts = {}) {
    if (n < 1) throw DomainError("word length must be >= 1");
    if (h < 0) throw DomainError("entropy bound must be >= 0");
    const int D = spec.alphabet_size();
    if (detail::composition_count(n, D) > opts.max_type_classes)
        throw ResourceLimit("type-class enumeration exceeds the configured cap");
    std::vector<double> klogk(static_cast<std::size_t>(n) + 1, 0.0);
    for (long long k = 1; k <= n; ++k)
        klogk[static_cast<std::size_t>(k)] = static_cast<double>(k) * std::log(static_cast<double>(k));
    const double logn = std::log(static_cast<double>(n));
    u128 total = 0;
    detail::for_each_type(n, D, [&](const std::vector<long long>& counts, u128 coeff) {
        double s = 0;
        for (long long k : counts) s += klogk[static_cast<std::size_t>(k)];
        double entropy = logn - s / static_cast<double>(n);
        if (entropy <= h + 1e-9) total = detail::checked_add(total, coeff);
    });
    return total;
}

// Exact number of words in Q^n whose empirical row entropy is >= z: row
// types weighted by the fiber choices T_a^{k_a}.
inline u128 count_rowentropy_above(const CarpetSpec& spec, long long n, double z,
                                   const CountOptions& opts = {}) {
    if (n < 1) throw DomainError("word length must be >= 1");
    const int R = spec.num_rows();
    if (detail::composition_count(n, R) > opts.max_type_classes)
        throw ResourceLimit("type-class enumeration exceeds the configured cap");
    std::vector<double> klogk(static_cast<std::size_t>(n) + 1, 0.0);
    for (long long k = 1; k <= n; ++k)
        klogk[static_cast<std::size_t>(k)] = static_cast<double>(k) * std::log(static_cast<double>(k));
    const double logn = std::log(static_cast<double>(n));
    u128 total = 0;
    detail::for_each_type(n, R, [&](const std::vector<long long>& counts, u128 coeff) {
        double s = 0;
        for (long long k : counts) s += klogk[static_cast<std::size_t>(k)];
        double entropy = logn - s / static_cast<double>(n);
        if (entropy < z - 1e-9) return;
        u128 ways = coeff;
        for (int r = 0; r < R; ++r)
            ways = detail::checked_mul(
                ways, detail::pow_u128(spec.fiber_count(r), counts[static_cast<std::size_t>(r)]));
        total = detail::checked_add(total, ways);
    });
    return total;
}

// (n+1)^D e^{n h}: the finite-n method-of-types upper bound that the exact
// count must respect.
inline double types_bound(const CarpetSpec& spec, long long n, double h) {
    return std::pow(static_cast<double>(n + 1), spec.alphabet_size()) *
           std::exp(static_cast<double>(n) * h);
}

}  // namespace carpetdim
