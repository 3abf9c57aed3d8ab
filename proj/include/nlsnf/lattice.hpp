#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace nlsnf {

/// Integer frequency vector on the d-torus, d in {1,2,3}.
struct ModeIndex {
    std::array<int, 3> c{0, 0, 0};
    int dim = 1;

    ModeIndex() = default;
    explicit ModeIndex(int k0) : c{k0, 0, 0}, dim(1) {}
    ModeIndex(int k0, int k1) : c{k0, k1, 0}, dim(2) {}
    ModeIndex(int k0, int k1, int k2) : c{k0, k1, k2}, dim(3) {}

    long long norm2() const {
        long long s = 0;
        for (int i = 0; i < dim; ++i) s += static_cast<long long>(c[i]) * c[i];
        return s;
    }
    double norm() const { return std::sqrt(static_cast<double>(norm2())); }

    /// Japanese bracket <k> = (1+|k|^2)^{1/2}.
    double bracket() const { return std::sqrt(1.0 + static_cast<double>(norm2())); }

    bool operator==(const ModeIndex& o) const { return dim == o.dim && c == o.c; }
    bool operator<(const ModeIndex& o) const { return c < o.c; }

    ModeIndex operator+(const ModeIndex& o) const {
        ModeIndex r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] += o.c[i];
        return r;
    }
    ModeIndex operator-(const ModeIndex& o) const {
        ModeIndex r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] -= o.c[i];
        return r;
    }
};

/// Dyadic block index: n with 2^n <= |k| < 2^{n+1}, block 0 collecting |k| < 2.
/// Exact in integer arithmetic (compares |k|^2 against 4^n).
inline int block_index(const ModeIndex& k) {
    long long r2 = k.norm2();
    if (r2 < 4) return 0;
    int n = 1;
    long long lo = 4; // 4^n
    while (4 * lo <= r2) {
        lo *= 4;
        ++n;
    }
    return n;
}

/// Sup-norm box [-K_max, K_max]^d with the Euclidean dyadic block structure on top.
class TruncatedLattice {
  public:
    TruncatedLattice() = default;
    TruncatedLattice(int d, int K_max) : d_(d), K_(K_max) {
        if (d < 1 || d > 3) throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
        if (K_max < 1) throw std::invalid_argument("K_max must be positive");
        // smallest n_max with 2^{n_max} > K_max*sqrt(d), i.e. 4^{n_max} > K_max^2*d
        long long bound = static_cast<long long>(K_max) * K_max * d;
        n_max_ = 0;
        long long p = 1; // 4^{n_max}
        while (p <= bound) {
            p *= 4;
            ++n_max_;
        }
        side_ = 2 * K_max + 1;
        size_ = 1;
        for (int i = 0; i < d; ++i) size_ *= side_;
    }

    int dim() const { return d_; }
    int k_max() const { return K_; }
    int n_max() const { return n_max_; }
    std::size_t size() const { return static_cast<std::size_t>(size_); }

    bool contains(const ModeIndex& k) const {
        if (k.dim != d_) return false;
        for (int i = 0; i < d_; ++i)
            if (k.c[i] < -K_ || k.c[i] > K_) return false;
        return true;
    }

    std::size_t index_of(const ModeIndex& k) const {
        std::size_t idx = 0;
        for (int i = d_ - 1; i >= 0; --i) idx = idx * side_ + static_cast<std::size_t>(k.c[i] + K_);
        return idx;
    }

    ModeIndex mode_at(std::size_t idx) const {
        ModeIndex k;
        k.dim = d_;
        for (int i = 0; i < d_; ++i) {
            k.c[i] = static_cast<int>(idx % side_) - K_;
            idx /= side_;
        }
        return k;
    }

    /// Modes of dyadic block B_n intersected with the box.
    std::vector<ModeIndex> block_modes(int n) const {
        std::vector<ModeIndex> out;
        for (std::size_t i = 0; i < size(); ++i) {
            ModeIndex k = mode_at(i);
            if (block_index(k) == n) out.push_back(k);
        }
        return out;
    }

    bool operator==(const TruncatedLattice& o) const { return d_ == o.d_ && K_ == o.K_; }

  private:
    int d_ = 1;
    int K_ = 1;
    int n_max_ = 1;
    long long side_ = 3;
    long long size_ = 3;
};

/// Complex amplitudes u_k over the box; the phase-space point.
struct FourierState {
    TruncatedLattice lattice;
    std::vector<std::complex<double>> amps;

    FourierState() = default;
    explicit FourierState(const TruncatedLattice& lat)
        : lattice(lat), amps(lat.size(), std::complex<double>(0.0, 0.0)) {}

    std::complex<double>& at(const ModeIndex& k) { return amps[lattice.index_of(k)]; }
    const std::complex<double>& at(const ModeIndex& k) const { return amps[lattice.index_of(k)]; }

    bool finite() const {
        for (const auto& a : amps)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        return true;
    }
};

inline double mass(const FourierState& u) {
    double m = 0.0;
    for (const auto& a : u.amps) m += std::norm(a);
    return m;
}

/// Super-action J_n = sum over B_n of |u_k|^2.
inline double super_action(const FourierState& u, int n) {
    double j = 0.0;
    for (std::size_t i = 0; i < u.amps.size(); ++i)
        if (block_index(u.lattice.mode_at(i)) == n) j += std::norm(u.amps[i]);
    return j;
}

inline std::vector<double> super_actions(const FourierState& u) {
    std::vector<double> j(static_cast<std::size_t>(u.lattice.n_max()) + 1, 0.0);
    for (std::size_t i = 0; i < u.amps.size(); ++i)
        j[static_cast<std::size_t>(block_index(u.lattice.mode_at(i)))] += std::norm(u.amps[i]);
    return j;
}

/// N_s = sum_n 4^{ns} J_n; equivalent to the squared H^s norm within [2^{-2s}, 1].
inline double ns_observable(const FourierState& u, double s) {
    const std::vector<double> j = super_actions(u);
    double acc = 0.0;
    for (std::size_t n = 0; n < j.size(); ++n)
        acc += std::pow(4.0, static_cast<double>(n) * s) * j[n];
    return acc;
}

inline bool is_power_of_two(long long n) { return n >= 1 && (n & (n - 1)) == 0; }

inline int log2_exact(long long n) {
    int e = 0;
    while (n > 1) {
        n >>= 1;
        ++e;
    }
    return e;
}

/// Truncated weighted norm N_{N,s}: blockwise dyadic weights below N = 2^{n_max},
/// exact |k|^{2s} weights on |k| >= N.
inline double nns_observable(const FourierState& u, double s, long long N) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    const int nmax = log2_exact(N);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.amps.size(); ++i) {
        const ModeIndex k = u.lattice.mode_at(i);
        const double a2 = std::norm(u.amps[i]);
        if (a2 == 0.0) continue;
        const long long r2 = k.norm2();
        if (r2 >= N * N) {
            acc += std::pow(static_cast<double>(r2), s) * a2;
        } else {
            const int n = block_index(k);
            if (n < nmax) acc += std::pow(4.0, static_cast<double>(n) * s) * a2;
            // modes with |k| < N always sit in blocks n < nmax since N = 2^{nmax}
        }
    }
    return acc;
}

inline double l1_norm(const FourierState& u) {
    double acc = 0.0;
    for (const auto& a : u.amps) acc += std::abs(a);
    return acc;
}

/// Weighted l1 norm with Japanese-bracket weight <k>^eta.
inline double l1_eta_norm(const FourierState& u, double eta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.amps.size(); ++i)
        acc += std::pow(u.lattice.mode_at(i).bracket(), eta) * std::abs(u.amps[i]);
    return acc;
}

inline double hs_norm(const FourierState& u, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.amps.size(); ++i)
        acc += std::pow(u.lattice.mode_at(i).bracket(), 2.0 * s) * std::norm(u.amps[i]);
    return std::sqrt(acc);
}

/// Cauchy-Schwarz constant K_s with l1 <= K_s * H^s, summed over the box.
inline double cauchy_schwarz_constant(const TruncatedLattice& lat, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i)
        acc += std::pow(lat.mode_at(i).bracket(), -2.0 * s);
    return std::sqrt(acc);
}

} // namespace nlsnf
