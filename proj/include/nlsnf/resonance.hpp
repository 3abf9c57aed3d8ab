#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "polyalg.hpp"
#include "potential.hpp"
#include "rng.hpp"

namespace nlsnf {

struct SmallDivisorRecord {
    IndexPair pair;
    double omega_abs = 0.0;            // |Omega(k,l)|
    bool removal = false;              // block-count multisets differ
    double gamma_contribution = 0.0;   // |Omega| q^4 (log2 mu_1)^{2q+1}, removal pairs only
};

/// Visits every zero-momentum pair of sorted q-multisets of box modes in
/// canonical orientation (k-list <= l-list lexicographically).
inline void for_each_zero_momentum_pair(const TruncatedLattice& lat, int q,
                                        const std::function<void(const IndexPair&)>& visit) {
    std::vector<ModeIndex> modes(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) modes[i] = lat.mode_at(i);
    std::sort(modes.begin(), modes.end());

    std::map<std::array<int, 3>, std::vector<std::vector<ModeIndex>>> buckets;
    std::vector<ModeIndex> current;
    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<int>(current.size()) == q) {
            ModeIndex sum;
            sum.dim = lat.dim();
            for (const auto& m : current) sum = sum + m;
            buckets[sum.c].push_back(current);
            return;
        }
        for (std::size_t i = start; i < modes.size(); ++i) {
            current.push_back(modes[i]);
            self(self, i);
            current.pop_back();
        }
    };
    recurse(recurse, 0);

    for (const auto& [sum, lists] : buckets)
        for (std::size_t a = 0; a < lists.size(); ++a)
            for (std::size_t b = a; b < lists.size(); ++b)
                visit(IndexPair{lists[a], lists[b]});
}

/// Exhaustive scan of the small divisors at fixed q.
inline std::vector<SmallDivisorRecord> scan_small_divisors(const TruncatedLattice& lat, int q,
                                                           const FrequencyTable& omega) {
    std::vector<SmallDivisorRecord> out;
    for_each_zero_momentum_pair(lat, q, [&](const IndexPair& p) {
        SmallDivisorRecord rec;
        rec.pair = p;
        rec.omega_abs = small_divisor(p, omega);
        rec.removal = satisfies_removal(p);
        if (rec.removal) {
            const double mu1 = mu(p, 1);
            // removal forces a mode outside block 0, hence mu_1 >= 2 and log2 > 0
            if (mu1 >= 2.0)
                rec.gamma_contribution =
                    rec.omega_abs * std::pow(static_cast<double>(q), 4.0) *
                    std::pow(std::log2(mu1), 2.0 * q + 1.0);
        }
        out.push_back(std::move(rec));
    });
    return out;
}

/// Empirical non-resonance constant: the minimum of |Omega| q^4 (log2 mu_1)^{2q+1}
/// over all removal pairs with 2 <= q <= q_max; +infinity when no such pair exists.
inline double gamma_empirical(const BlockPotential& V, const TruncatedLattice& lat, int q_max) {
    if (q_max < 2) throw std::invalid_argument("q_max must be >= 2");
    const FrequencyTable omega = frequencies(V, lat);
    double best = std::numeric_limits<double>::infinity();
    for (int q = 2; q <= q_max; ++q) {
        for_each_zero_momentum_pair(lat, q, [&](const IndexPair& p) {
            if (!satisfies_removal(p)) return;
            const double mu1 = mu(p, 1);
            if (mu1 < 2.0) return;
            const double val = small_divisor(p, omega) * std::pow(static_cast<double>(q), 4.0) *
                               std::pow(std::log2(mu1), 2.0 * q + 1.0);
            if (val < best) best = val;
        });
    }
    return best;
}

namespace detail {

/// All block-count vectors (c_0, ..., c_{n_max}) with entries summing to q.
inline std::vector<std::vector<int>> count_vectors(int q, int n_max) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n_max) + 1, 0);
    auto recurse = [&](auto&& self, int pos, int left) -> void {
        if (pos == n_max) {
            cur[static_cast<std::size_t>(pos)] = left;
            out.push_back(cur);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            cur[static_cast<std::size_t>(pos)] = c;
            self(self, pos + 1, left - c);
        }
    };
    recurse(recurse, 0, q);
    return out;
}

} // namespace detail

/// Monte Carlo estimate of the probability of the bad event: some removal pair
/// (reduced to block-count vectors and integer offsets a in [-q, q]) has
/// |2a + 2 (2pi)^{-d/2} sum (c_n - c'_n) X_n| below gamma q^{-4} m^{-(2q+1)},
/// with m the largest block index carrying a nonzero count difference.
inline double mc_event_probability(double gamma, int q, int n_max, long long trials,
                                   std::uint64_t seed, int d = 1) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (q < 2) throw std::invalid_argument("q must be >= 2");

    struct Event {
        std::vector<int> delta; // c - c', nonzero
        double threshold;       // gamma q^{-4} m^{-(2q+1)}
    };
    const std::vector<std::vector<int>> cvs = detail::count_vectors(q, n_max);
    std::vector<Event> events;
    for (std::size_t a = 0; a < cvs.size(); ++a) {
        for (std::size_t b = a + 1; b < cvs.size(); ++b) {
            Event e;
            e.delta.resize(cvs[a].size());
            int max_block = 0;
            for (std::size_t n = 0; n < e.delta.size(); ++n) {
                e.delta[n] = cvs[a][n] - cvs[b][n];
                if ((cvs[a][n] > 0 || cvs[b][n] > 0) && static_cast<int>(n) > max_block)
                    max_block = static_cast<int>(n);
            }
            // equal count vectors never occur here (a != b); block 0 alone cannot
            // hold two distinct vectors, so max_block >= 1
            e.threshold = gamma * std::pow(static_cast<double>(q), -4.0) *
                          std::pow(static_cast<double>(max_block), -(2.0 * q + 1.0));
            events.push_back(std::move(e));
        }
    }

    const double scale = std::pow(two_pi, -0.5 * d);
    const std::size_t n_blocks = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> X(n_blocks);
    long long bad = 0;
    for (long long t = 0; t < trials; ++t) {
        for (std::size_t n = 0; n < n_blocks; ++n)
            X[n] = rng_uniform(seed, static_cast<std::uint64_t>(t) * n_blocks + n);
        bool hit = false;
        for (const Event& e : events) {
            double dx = 0.0;
            for (std::size_t n = 0; n < n_blocks; ++n)
                if (e.delta[n] != 0) dx += e.delta[n] * X[n];
            dx *= scale; // (2pi)^{-d/2} sum delta_n X_n, of modulus < q
            // the closest integer offset is automatically within [-q, q]
            const double dist = 2.0 * std::abs(dx - std::nearbyint(dx));
            if (dist <= e.threshold) {
                hit = true;
                break;
            }
        }
        if (hit) ++bad;
    }
    return static_cast<double>(bad) / static_cast<double>(trials);
}

} // namespace nlsnf
