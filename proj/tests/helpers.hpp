#pragma once

#include <nlsnf/nlsnf.hpp>

#include <complex>
#include <cstdint>
#include <vector>

namespace nlsnf::testing {

/// Random momentum-conserving polynomial with roughly `orbits` distinct orbits.
inline HomPoly random_poly(const TruncatedLattice& lat, int q, std::uint64_t seed, int orbits) {
    RngStream rng(seed);
    std::vector<std::pair<IndexPair, std::complex<double>>> raw;
    int tries = 0;
    while (static_cast<int>(raw.size()) < orbits && tries < 100000) {
        ++tries;
        std::vector<ModeIndex> k, l;
        ModeIndex sum;
        sum.dim = lat.dim();
        for (int j = 0; j < q; ++j) {
            ModeIndex m = lat.mode_at(static_cast<std::size_t>(rng.uniform() * lat.size()));
            k.push_back(m);
            sum = sum + m;
        }
        for (int j = 0; j < q - 1; ++j) {
            ModeIndex m = lat.mode_at(static_cast<std::size_t>(rng.uniform() * lat.size()));
            l.push_back(m);
            sum = sum - m;
        }
        if (!lat.contains(sum)) continue;
        l.push_back(sum);
        IndexPair pr = make_index_pair(k, l);
        std::complex<double> c(rng.uniform() - 0.5, rng.uniform() - 0.5);
        canonicalize(pr, c);
        if (self_conjugate(pr)) c = std::complex<double>(c.real(), 0.0);
        bool dup = false;
        for (auto& e : raw)
            if (e.first == pr) {
                dup = true;
                break;
            }
        if (!dup) raw.emplace_back(pr, c);
    }
    return make_poly(q, raw);
}

/// Random state with per-mode components uniform in [-amp/2, amp/2]^2.
inline FourierState random_state(const TruncatedLattice& lat, std::uint64_t seed, double amp) {
    RngStream rng(seed);
    FourierState u(lat);
    for (auto& a : u.amps)
        a = amp * std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return u;
}

/// Random state rescaled to a prescribed l1 norm.
inline FourierState random_state_l1(const TruncatedLattice& lat, std::uint64_t seed, double l1) {
    FourierState u = random_state(lat, seed, 1.0);
    const double n = l1_norm(u);
    for (auto& a : u.amps) a *= l1 / n;
    return u;
}

/// Random Gaussian state with <k>^{-2} profile rescaled to a prescribed H^s norm.
inline FourierState random_state_hs(const TruncatedLattice& lat, std::uint64_t seed, double s,
                                    double target) {
    FourierState u(lat);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double w = std::pow(lat.mode_at(i).bracket(), -2.0);
        u.amps[i] = w * std::complex<double>(rng_normal(seed, 2 * i), rng_normal(seed, 2 * i + 1));
    }
    const double n = hs_norm(u, s);
    for (auto& a : u.amps) a *= target / n;
    return u;
}

/// (i grad P(u), grad Q(u))_{L^2}: the independent pairing route to {P,Q}(u).
inline double bracket_pairing(const HomPoly& P, const HomPoly& Q, const FourierState& u) {
    const FourierState gp = gradient(P, u), gq = gradient(Q, u);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.amps.size(); ++i)
        acc += (std::complex<double>(0.0, 1.0) * gp.amps[i] * std::conj(gq.amps[i])).real();
    return acc;
}

/// Least-squares slope of log2(y) against log2(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log2(x[i]), ly = std::log2(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace nlsnf::testing
