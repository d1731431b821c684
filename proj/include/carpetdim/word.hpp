#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "carpetdim/carpet.hpp"
#include "carpetdim/dimension.hpp"
#include "carpetdim/errors.hpp"

namespace carpetdim {

namespace detail {

// digit pair (column a, fiber b), 1-based, to internal symbol id; -1 if
// the pair is not an allowed digit
inline int symbol_of_pair(const CarpetSpec& spec, int a, int b) {
    for (int r = 0; r < spec.num_rows(); ++r) {
        if (spec.column_value(r) != a) continue;
        for (int j = 0; j < spec.fiber_count(r); ++j)
            if (spec.fiber_value(r, j) == b) return spec.symbol_index(r, j);
        return -1;
    }
    return -1;
}

}  // namespace detail

// Finite word over the digit set, stored as flat symbol ids against a
// fixed carpet. Positions are 1-based in the public accessors to match
// the block and scale conventions.
class SymbolicWord {
public:
    static SymbolicWord from_ids(CarpetSpec spec, std::vector<std::int32_t> ids) {
        for (std::int32_t s : ids)
            if (s < 0 || s >= spec.alphabet_size())
                throw DomainError("symbol id outside the digit set");
        return SymbolicWord(std::move(spec), std::move(ids));
    }

    // pairs are (column, fiber), 1-based
    static SymbolicWord from_pairs(CarpetSpec spec,
                                   const std::vector<std::pair<int, int>>& pairs) {
        std::vector<std::int32_t> ids;
        ids.reserve(pairs.size());
        for (auto [a, b] : pairs) {
            int s = detail::symbol_of_pair(spec, a, b);
            if (s < 0) throw DomainError("digit pair outside the digit set");
            ids.push_back(static_cast<std::int32_t>(s));
        }
        return SymbolicWord(std::move(spec), std::move(ids));
    }

    const CarpetSpec& spec() const { return spec_; }
    long long size() const { return static_cast<long long>(ids_.size()); }
    bool empty() const { return ids_.empty(); }
    std::int32_t id(long long pos) const {  // pos is 1-based
        return ids_[static_cast<std::size_t>(pos - 1)];
    }
    std::pair<int, int> pair_at(long long pos) const {
        int s = id(pos);
        int r = spec_.symbol_row(s);
        return {spec_.column_value(r), spec_.fiber_value(r, spec_.symbol_fiber(s))};
    }
    const std::vector<std::int32_t>& ids() const { return ids_; }

    SymbolicWord prefix(long long len) const {
        if (len < 0 || len > size()) throw WordTooShort("prefix longer than the word");
        return SymbolicWord(spec_, std::vector<std::int32_t>(ids_.begin(), ids_.begin() + len));
    }
    // drop-prefix shift by k positions
    SymbolicWord shifted(long long k) const {
        if (k < 0 || k > size()) throw WordTooShort("shift past the end");
        return SymbolicWord(spec_, std::vector<std::int32_t>(ids_.begin() + k, ids_.end()));
    }

private:
    SymbolicWord(CarpetSpec spec, std::vector<std::int32_t> ids)
        : spec_(std::move(spec)), ids_(std::move(ids)) {}
    CarpetSpec spec_;
    std::vector<std::int32_t> ids_;
};

// Planar point of the word's cylinder corner: (sum (a_k-1) N^-k, sum (b_k-1) M^-k).
inline std::array<double, 2> project(const CarpetSpec& spec, const SymbolicWord& word) {
    if (word.empty()) throw WordTooShort("cannot project an empty word");
    double x = 0, y = 0;
    for (long long k = word.size(); k >= 1; --k) {
        auto [a, b] = word.pair_at(k);
        x = (x + static_cast<double>(a - 1)) / static_cast<double>(spec.base_n());
        y = (y + static_cast<double>(b - 1)) / static_cast<double>(spec.base_m());
    }
    return {x, y};
}

// Approximate square of side N^-depth: the full column prefix to depth and
// the pair prefix to floor(depth/tau). Stored as internal indices.
struct ApproxSquare {
    long long depth = 0;
    std::vector<std::int32_t> column_prefix;  // row indices, length depth
    std::vector<std::int32_t> pair_prefix;    // symbol ids, length floor(depth/tau)

    bool operator==(const ApproxSquare&) const = default;
    bool operator<(const ApproxSquare& o) const {
        if (depth != o.depth) return depth < o.depth;
        if (pair_prefix != o.pair_prefix) return pair_prefix < o.pair_prefix;
        return column_prefix < o.column_prefix;
    }
};

inline ApproxSquare approx_square(const SymbolicWord& word, long long n) {
    if (n < 1) throw DomainError("square depth must be >= 1");
    if (word.size() < n) throw WordTooShort("word shorter than the square depth");
    const CarpetSpec& spec = word.spec();
    long long k = spec.floor_div_tau(n);
    ApproxSquare sq;
    sq.depth = n;
    sq.column_prefix.reserve(static_cast<std::size_t>(n));
    for (long long pos = 1; pos <= n; ++pos)
        sq.column_prefix.push_back(spec.symbol_row(word.id(pos)));
    sq.pair_prefix.assign(word.ids().begin(), word.ids().begin() + k);
    return sq;
}

// Empirical pair and row frequency entropies of the word.
inline EntropyProfile word_entropy(const SymbolicWord& word) {
    if (word.empty()) throw WordTooShort("entropy of an empty word");
    const CarpetSpec& spec = word.spec();
    std::vector<long long> pc(static_cast<std::size_t>(spec.alphabet_size()), 0);
    std::vector<long long> rc(static_cast<std::size_t>(spec.num_rows()), 0);
    for (std::int32_t s : word.ids()) {
        ++pc[static_cast<std::size_t>(s)];
        ++rc[static_cast<std::size_t>(spec.symbol_row(s))];
    }
    const double n = static_cast<double>(word.size());
    const double logn = std::log(n);
    auto ent = [&](const std::vector<long long>& c) {
        double s = 0;
        for (long long k : c)
            if (k > 0) s += static_cast<double>(k) * std::log(static_cast<double>(k));
        return logn - s / n;
    };
    return {ent(pc), ent(rc)};
}

// Number of distinct approximate squares of depth n = common word length
// induced by the set.
inline long long cover_count(const CarpetSpec& spec, const std::vector<SymbolicWord>& words) {
    if (words.empty()) return 0;
    long long n = words.front().size();
    for (const auto& w : words) {
        if (w.size() != n) throw LengthMismatch("cover words must share one length");
        if (w.spec().alphabet_size() != spec.alphabet_size())
            throw DomainError("word alphabet does not match the carpet");
    }
    if (n < 1) throw LengthMismatch("cover words must be nonempty");
    std::set<ApproxSquare> squares;
    for (const auto& w : words) squares.insert(approx_square(w, n));
    return static_cast<long long>(squares.size());
}

// "a:b" pairs, 1-based, whitespace separated
inline SymbolicWord parse_word(const CarpetSpec& spec, const std::string& text) {
    std::vector<std::pair<int, int>> pairs;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto read_int = [&]() -> int {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) throw DomainError("malformed word: expected a digit index");
        return std::stoi(text.substr(start, i - start));
    };
    skip_ws();
    while (i < text.size()) {
        int a = read_int();
        if (i >= text.size() || text[i] != ':')
            throw DomainError("malformed word: expected ':' between column and fiber");
        ++i;
        int b = read_int();
        pairs.emplace_back(a, b);
        skip_ws();
    }
    if (pairs.empty()) throw DomainError("malformed word: no pairs");
    return SymbolicWord::from_pairs(spec, pairs);
}

inline std::string format_word(const SymbolicWord& word) {
    std::string out;
    for (long long pos = 1; pos <= word.size(); ++pos) {
        auto [a, b] = word.pair_at(pos);
        if (pos > 1) out += ' ';
        out += std::to_string(a);
        out += ':';
        out += std::to_string(b);
    }
    return out;
}

}  // namespace carpetdim
