#pragma once

#include "kbh/types.hpp"

#include <cstdint>
#include <random>

namespace kbh {

// splitmix64 finaliser; used to derive independent seeds from (seed, index) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ mix64(stream + 0x5851f42d4c957f2dULL));
}

// Named streams so that independent consumers of one master seed never overlap.
enum class Stream : std::uint64_t {
    ComplementBasis = 1,
    CaseTwoResponse = 2,
    Design = 3,
    Noise = 4,
    Pipeline = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
    return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }

    Vector normal_vector(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Filled column by column so the draw order is fixed.
    Matrix normal_matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace kbh
