#pragma once

#include <cstdint>
#include <random>

namespace lbtail {

// Source of uniform draws on the open interval (0,1).
class UniformStream {
public:
    virtual ~UniformStream() = default;
    virtual double next() = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// mt19937_64-backed stream. Uniforms are built from the top 53 bits of the
// raw output, offset by half an ulp, so draws are identical on every
// platform and never hit 0 or 1 exactly.
class Mt19937Stream final : public UniformStream {
public:
    explicit Mt19937Stream(std::uint64_t seed) : engine_(seed) {}

    double next() override {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

// Independent stream for replicate r of an experiment seeded with `seed`.
// Streams for distinct (seed, r) pairs are decorrelated by double mixing.
inline Mt19937Stream replicate_stream(std::uint64_t seed,
                                      std::uint64_t replicate) {
    return Mt19937Stream(splitmix64(seed ^ splitmix64(replicate + 1)));
}

}  // namespace lbtail
