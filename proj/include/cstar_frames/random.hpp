#pragma once

#include <cstdint>
#include <random>

#include "linalg.hpp"

namespace cstar_frames {

/// Seed used by every sampling probe unless the caller overrides it.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed'c0de'2024ULL;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Entries with real and imaginary parts uniform in [−1, 1].
inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    return hermitian_part(random_matrix(n, n, rng));
}

/// G*·G for a random square G.
inline ComplexMatrix random_psd(std::size_t n, Rng& rng) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    return hermitian_part(g.adjoint() * g);
}

} // namespace cstar_frames
