#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"

namespace nlsnf {

/// Block-constant random Fourier multiplier: V_k = X_{block_index(k)} with
/// X_n iid uniform on [0,1). Draw n depends only on (seed, n), so a potential
/// extends consistently when the lattice grows.
struct BlockPotential {
    std::uint64_t seed = 0;
    std::vector<double> block_values;

    int n_max() const { return static_cast<int>(block_values.size()) - 1; }

    double value_at(const ModeIndex& k) const {
        const int n = block_index(k);
        if (n >= static_cast<int>(block_values.size()))
            throw std::out_of_range("block index beyond sampled potential");
        return block_values[static_cast<std::size_t>(n)];
    }
};

inline BlockPotential sample_potential(std::uint64_t seed, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    BlockPotential V;
    V.seed = seed;
    V.block_values.resize(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        V.block_values[static_cast<std::size_t>(n)] = rng_uniform(seed, static_cast<std::uint64_t>(n));
    return V;
}

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Linear frequencies omega_k = |k|^2 + (2*pi)^{-d/2} V_k over the box.
struct FrequencyTable {
    TruncatedLattice lattice;
    std::vector<double> omega;

    double at(const ModeIndex& k) const { return omega[lattice.index_of(k)]; }
};

inline FrequencyTable frequencies(const BlockPotential& V, const TruncatedLattice& lattice) {
    if (lattice.n_max() > V.n_max())
        throw std::invalid_argument("potential has fewer blocks than the lattice");
    FrequencyTable t;
    t.lattice = lattice;
    t.omega.resize(lattice.size());
    const double scale = std::pow(two_pi, -0.5 * lattice.dim());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const ModeIndex k = lattice.mode_at(i);
        t.omega[i] = static_cast<double>(k.norm2()) + scale * V.value_at(k);
    }
    return t;
}

/// Frequency table for a given lattice with V identically zero.
inline FrequencyTable free_frequencies(const TruncatedLattice& lattice) {
    BlockPotential V;
    V.block_values.assign(static_cast<std::size_t>(lattice.n_max()) + 1, 0.0);
    return frequencies(V, lattice);
}

} // namespace nlsnf
