#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace nlot {

inline constexpr const char* version() { return "0.1.0"; }

// Deterministic uniform draws. mt19937_64 is bit-exact across platforms;
// std::uniform_real_distribution is not, so map the bits ourselves.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform() {  // [0, 1)
        return (gen() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t next() { return gen(); }
    int index(int n) {  // {0, ..., n-1}, n <= 2^31
        return static_cast<int>(gen() % static_cast<std::uint64_t>(n));
    }
};

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string hex_digest(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Shortest decimal form that round-trips a double; stable across runs.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    double back = 0;
    std::sscanf(buf, "%lg", &back);
    if (back == x) {
        for (int prec = 1; prec <= 16; ++prec) {
            char s[40];
            std::snprintf(s, sizeof s, "%.*g", prec, x);
            std::sscanf(s, "%lg", &back);
            if (back == x) return s;
        }
    }
    return buf;
}

}  // namespace nlot
