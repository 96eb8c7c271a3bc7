#pragma once

// Shared small utilities: closed ranges, deterministic RNG, fixed-decimal
// number formatting. Everything here is allocation-free and thread-safe.

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trilink {

// Closed interval [lo, hi].
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    Range() = default;
    Range(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo <= hi)) throw std::invalid_argument("Range: lo > hi");
    }

    bool contains(double x) const { return x >= lo && x <= hi; }
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

namespace rnd {

// SplitMix64 step. Small, fast, and identical on every platform; std::
// distributions are implementation-defined so they are avoided throughout.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives a child seed from a parent seed plus any number of words.
// Used to key independent draw streams (label, tick, tier, ...), so adding
// draws to one concern never perturbs another.
inline std::uint64_t derive(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
}

template <typename... Rest>
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t word, Rest... rest) {
    std::uint64_t s = seed ^ word;
    return derive(splitmix64(s), rest...);
}

} // namespace rnd

// Deterministic generator over a 64-bit state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return rnd::splitmix64(state_); }

    // Uniform in [0, 1).
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + u01() * (hi - lo); }
    double uniform(const Range& r) { return uniform(r.lo, r.hi); }

    bool bernoulli(double p) { return u01() < p; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

private:
    std::uint64_t state_;
};

// Locale-independent fixed-decimal formatting (CSV and report output).
inline std::string format_fixed(double value, int precision) {
    if (value == 0.0) value = 0.0;  // normalize -0.0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
    if (res.ec != std::errc{}) throw std::runtime_error("format_fixed: value out of range");
    return std::string(buf, res.ptr);
}

} // namespace trilink
