#pragma once

#include <cstdint>

namespace carpetdim {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so any position of any stream can be produced
// independently and reproducibly.
//
// Stream-split rule used throughout the library: stream = word index
// (0-based) within a batch, counter = position index (1-based) within the
// word. Auxiliary draws (e.g. target synthesis) use dedicated stream ids
// documented at the call site.
struct CounterRng {
    std::uint64_t seed = 0;

    // splitmix64 finalizer (Stafford mix13 variant).
    static constexpr std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    constexpr std::uint64_t raw(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL);
        x = mix64(x ^ (stream + 0x9e3779b97f4a7c15ULL));
        x = mix64(x ^ (counter + 0x9e3779b97f4a7c15ULL));
        return x;
    }

    // uniform in [0, 1), 53 significant bits
    constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(raw(stream, counter) >> 11) * 0x1.0p-53;
    }
};

}  // namespace carpetdim
