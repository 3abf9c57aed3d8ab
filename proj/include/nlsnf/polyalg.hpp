#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "potential.hpp"

namespace nlsnf {

/// Monomial index (k-list, l-list) of a degree-2q term u_{k_1}..u_{k_q} conj(u_{l_1})..conj(u_{l_q}).
/// Stored with both lists sorted.
struct IndexPair {
    std::vector<ModeIndex> k;
    std::vector<ModeIndex> l;

    int q() const { return static_cast<int>(k.size()); }

    bool operator<(const IndexPair& o) const {
        if (k != o.k) return std::lexicographical_compare(k.begin(), k.end(), o.k.begin(), o.k.end());
        return std::lexicographical_compare(l.begin(), l.end(), o.l.begin(), o.l.end());
    }
    bool operator==(const IndexPair& o) const { return k == o.k && l == o.l; }
};

inline IndexPair make_index_pair(std::vector<ModeIndex> k, std::vector<ModeIndex> l) {
    std::sort(k.begin(), k.end());
    std::sort(l.begin(), l.end());
    return IndexPair{std::move(k), std::move(l)};
}

inline bool zero_momentum(const IndexPair& p) {
    ModeIndex sk, sl;
    sk.dim = sl.dim = p.k.empty() ? 1 : p.k.front().dim;
    for (const auto& m : p.k) sk = sk + m;
    for (const auto& m : p.l) sl = sl + m;
    return sk.c == sl.c;
}

inline bool self_conjugate(const IndexPair& p) { return p.k == p.l; }

/// Canonical orientation: the k-list lexicographically no greater than the l-list.
/// Swapping orientation conjugates the coefficient (reality condition).
inline bool is_canonical(const IndexPair& p) {
    return !std::lexicographical_compare(p.l.begin(), p.l.end(), p.k.begin(), p.k.end());
}

inline void canonicalize(IndexPair& p, std::complex<double>& c) {
    std::sort(p.k.begin(), p.k.end());
    std::sort(p.l.begin(), p.l.end());
    if (!is_canonical(p)) {
        std::swap(p.k, p.l);
        c = std::conj(c);
    }
}

/// Number of ordered tuples realizing a sorted multiset: q! / prod(count!).
inline double multiplicity(const std::vector<ModeIndex>& sorted) {
    double num = 1.0;
    for (std::size_t j = 2; j <= sorted.size(); ++j) num *= static_cast<double>(j);
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        double fact = 1.0, cnt = 0.0;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
            cnt += 1.0;
            fact *= cnt;
        }
        num /= fact;
        i = j;
    }
    return num;
}

inline int count_in(const std::vector<ModeIndex>& sorted, const ModeIndex& m) {
    auto rng = std::equal_range(sorted.begin(), sorted.end(), m);
    return static_cast<int>(rng.second - rng.first);
}

inline std::vector<ModeIndex> erase_one(const std::vector<ModeIndex>& sorted, const ModeIndex& m) {
    std::vector<ModeIndex> out = sorted;
    auto it = std::lower_bound(out.begin(), out.end(), m);
    out.erase(it);
    return out;
}

inline std::vector<ModeIndex> merge_sorted(const std::vector<ModeIndex>& a, const std::vector<ModeIndex>& b) {
    std::vector<ModeIndex> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline constexpr std::size_t default_orbit_budget = 10'000'000;

/// Real, S_q x S_q symmetric, momentum-conserving homogeneous polynomial of
/// degree 2q, stored sparsely with one coefficient per symmetry/conjugation
/// orbit (canonical orientation only; the conjugate orientation is implicit).
class HomPoly {
  public:
    using CoeffMap = std::map<IndexPair, std::complex<double>>;

    HomPoly() = default;

    static HomPoly from_canonical(int q, CoeffMap coeffs) {
        HomPoly P;
        P.q_ = q;
        for (auto it = coeffs.begin(); it != coeffs.end();) {
            if (self_conjugate(it->first)) it->second = std::complex<double>(it->second.real(), 0.0);
            if (it->second == std::complex<double>(0.0, 0.0))
                it = coeffs.erase(it);
            else
                ++it;
        }
        P.coeffs_ = std::move(coeffs);
        P.linf_ = 0.0;
        for (const auto& [key, c] : P.coeffs_) P.linf_ = std::max(P.linf_, std::abs(c));
        return P;
    }

    int q() const { return q_; }
    int degree() const { return 2 * q_; }
    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }
    double linf() const { return linf_; }
    const CoeffMap& coeffs() const { return coeffs_; }

  private:
    int q_ = 0;
    CoeffMap coeffs_;
    double linf_ = 0.0;
};

inline HomPoly make_poly(int q, const std::vector<std::pair<IndexPair, std::complex<double>>>& raw) {
    if (q < 2) throw std::invalid_argument("half-degree q must be >= 2");
    HomPoly::CoeffMap m;
    for (const auto& [key_in, c_in] : raw) {
        if (key_in.q() != q || static_cast<int>(key_in.l.size()) != q)
            throw std::invalid_argument("index lists must have length q");
        IndexPair key = key_in;
        std::complex<double> c = c_in;
        canonicalize(key, c);
        if (!zero_momentum(key)) throw std::invalid_argument("zero momentum condition violated");
        if (self_conjugate(key) && std::abs(c.imag()) > 1e-12 * (1.0 + std::abs(c)))
            throw std::invalid_argument("self-conjugate orbit requires a real coefficient");
        auto [it, inserted] = m.emplace(key, c);
        if (!inserted && std::abs(it->second - c) > 1e-12 * (1.0 + std::abs(c)))
            throw std::invalid_argument("inconsistent duplicate coefficient for a symmetry orbit");
    }
    return HomPoly::from_canonical(q, std::move(m));
}

inline HomPoly add(const HomPoly& P, const HomPoly& Q) {
    if (P.empty()) return Q;
    if (Q.empty()) return P;
    if (P.q() != Q.q()) throw std::invalid_argument("cannot add polynomials of different degree");
    HomPoly::CoeffMap m = P.coeffs();
    for (const auto& [key, c] : Q.coeffs()) m[key] += c;
    return HomPoly::from_canonical(P.q(), std::move(m));
}

inline HomPoly scaled(const HomPoly& P, double factor) {
    HomPoly::CoeffMap m = P.coeffs();
    for (auto& [key, c] : m) c *= factor;
    return HomPoly::from_canonical(P.q(), std::move(m));
}

/// Drop coefficients of modulus <= eps (roundoff cleanup after cancellations).
inline HomPoly pruned(const HomPoly& P, double eps) {
    HomPoly::CoeffMap m;
    for (const auto& [key, c] : P.coeffs())
        if (std::abs(c) > eps) m.emplace(key, c);
    return HomPoly::from_canonical(P.q(), std::move(m));
}

// ---------------------------------------------------------------------------
// Small divisors and the removal condition

/// |Omega(k,l)| = 2 |sum omega_{k_j} - sum omega_{l_j}|. The signed value is
/// purely imaginary (2i times a real), so the modulus carries everything;
/// signed_divisor returns the real number D with Omega = 2iD.
inline double signed_divisor(const IndexPair& p, const FrequencyTable& omega) {
    double d = 0.0;
    for (const auto& m : p.k) d += omega.at(m);
    for (const auto& m : p.l) d -= omega.at(m);
    return d;
}

inline double small_divisor(const IndexPair& p, const FrequencyTable& omega) {
    return 2.0 * std::abs(signed_divisor(p, omega));
}

/// True iff some dyadic block is hit a different number of times by the two
/// lists, i.e. the monomial fails to commute with the super-actions.
inline bool satisfies_removal(const IndexPair& p) {
    std::map<int, int> counts;
    for (const auto& m : p.k) counts[block_index(m)] += 1;
    for (const auto& m : p.l) counts[block_index(m)] -= 1;
    for (const auto& [n, c] : counts)
        if (c != 0) return true;
    return false;
}

/// j-th largest Euclidean norm among the 2q modes (j = 1 is the largest).
inline double mu(const IndexPair& p, int j) {
    std::vector<long long> n2;
    n2.reserve(p.k.size() + p.l.size());
    for (const auto& m : p.k) n2.push_back(m.norm2());
    for (const auto& m : p.l) n2.push_back(m.norm2());
    if (j < 1 || j > static_cast<int>(n2.size())) throw std::invalid_argument("mu index out of range");
    std::sort(n2.begin(), n2.end(), std::greater<long long>());
    return std::sqrt(static_cast<double>(n2[static_cast<std::size_t>(j - 1)]));
}

/// Squared j-th largest norm, exact in integer arithmetic.
inline long long mu_norm2(const IndexPair& p, int j) {
    std::vector<long long> n2;
    for (const auto& m : p.k) n2.push_back(m.norm2());
    for (const auto& m : p.l) n2.push_back(m.norm2());
    std::sort(n2.begin(), n2.end(), std::greater<long long>());
    return n2[static_cast<std::size_t>(j - 1)];
}

// ---------------------------------------------------------------------------
// Evaluation and gradients (templated on the real scalar for high-precision audits)

template <class R>
std::complex<R> monomial_product(const std::vector<ModeIndex>& modes, const TruncatedLattice& lat,
                                 const std::vector<std::complex<R>>& amps, bool conj) {
    std::complex<R> prod(R(1), R(0));
    for (const auto& m : modes) {
        const std::complex<R>& a = amps[lat.index_of(m)];
        prod *= conj ? std::complex<R>(a.real(), -a.imag()) : a;
    }
    return prod;
}

template <class R>
R evaluate_t(const HomPoly& P, const TruncatedLattice& lat, const std::vector<std::complex<R>>& amps) {
    R acc(0);
    for (const auto& [key, c] : P.coeffs()) {
        const R w = R(multiplicity(key.k)) * R(multiplicity(key.l));
        const std::complex<R> A = monomial_product(key.k, lat, amps, false);
        const std::complex<R> B = monomial_product(key.l, lat, amps, true);
        const std::complex<R> cc(R(c.real()), R(c.imag()));
        const std::complex<R> term = cc * A * B;
        // conjugate orientation contributes the complex conjugate term
        acc += self_conjugate(key) ? w * term.real() : R(2) * w * term.real();
    }
    return acc;
}

inline double evaluate(const HomPoly& P, const FourierState& u) {
    return evaluate_t<double>(P, u.lattice, u.amps);
}

/// (grad P(u))_m = 2 d/d(conj u_m) P(u), accumulated into `out`.
template <class R>
void accumulate_gradient(const HomPoly& P, const TruncatedLattice& lat,
                         const std::vector<std::complex<R>>& amps, std::vector<std::complex<R>>& out,
                         R scale = R(1)) {
    for (const auto& [key, c] : P.coeffs()) {
        const R w = R(multiplicity(key.k)) * R(multiplicity(key.l));
        const std::complex<R> cc(R(c.real()), R(c.imag()));
        const bool selfc = self_conjugate(key);
        // orientation (k,l) with coefficient c: conj(u) factors sit on the l-list
        {
            const std::complex<R> A = monomial_product(key.k, lat, amps, false);
            for (std::size_t i = 0; i < key.l.size(); ++i) {
                if (i > 0 && key.l[i] == key.l[i - 1]) continue;
                const ModeIndex& m = key.l[i];
                const R cnt = R(count_in(key.l, m));
                const std::complex<R> rest = monomial_product(erase_one(key.l, m), lat, amps, true);
                out[lat.index_of(m)] += scale * R(2) * w * cnt * cc * A * rest;
            }
        }
        if (selfc) continue;
        // conjugate orientation (l,k) with coefficient conj(c): conj(u) factors on the k-list
        {
            const std::complex<R> ccbar(cc.real(), -cc.imag());
            const std::complex<R> A = monomial_product(key.l, lat, amps, false);
            for (std::size_t i = 0; i < key.k.size(); ++i) {
                if (i > 0 && key.k[i] == key.k[i - 1]) continue;
                const ModeIndex& m = key.k[i];
                const R cnt = R(count_in(key.k, m));
                const std::complex<R> rest = monomial_product(erase_one(key.k, m), lat, amps, true);
                out[lat.index_of(m)] += scale * R(2) * w * cnt * ccbar * A * rest;
            }
        }
    }
}

inline FourierState gradient(const HomPoly& P, const FourierState& u) {
    FourierState g(u.lattice);
    accumulate_gradient<double>(P, u.lattice, u.amps, g.amps);
    return g;
}

/// Directional derivative of the gradient field: d(grad P)(u)(v), real-linear in v.
template <class R>
void accumulate_gradient_differential(const HomPoly& P, const TruncatedLattice& lat,
                                      const std::vector<std::complex<R>>& u,
                                      const std::vector<std::complex<R>>& v,
                                      std::vector<std::complex<R>>& out) {
    auto term_derivative = [&](const std::vector<ModeIndex>& K, const std::vector<ModeIndex>& L,
                               const std::complex<R>& cc, R w) {
        // d/dh [ 2 c (prod u_K)(cnt_m(L)) (prod conj u_{L\m}) ] at u + h v
        for (std::size_t i = 0; i < L.size(); ++i) {
            if (i > 0 && L[i] == L[i - 1]) continue;
            const ModeIndex& m = L[i];
            const R cnt = R(count_in(L, m));
            const std::vector<ModeIndex> Lm = erase_one(L, m);
            const std::complex<R> base = R(2) * w * cnt * cc;
            // differentiate the holomorphic factors
            std::complex<R> dA(R(0), R(0));
            for (std::size_t j = 0; j < K.size(); ++j) {
                if (j > 0 && K[j] == K[j - 1]) continue;
                const R cntK = R(count_in(K, K[j]));
                dA += cntK * v[lat.index_of(K[j])] * monomial_product(erase_one(K, K[j]), lat, u, false);
            }
            const std::complex<R> restL = monomial_product(Lm, lat, u, true);
            out[lat.index_of(m)] += base * dA * restL;
            // differentiate the antiholomorphic factors
            const std::complex<R> A = monomial_product(K, lat, u, false);
            std::complex<R> dB(R(0), R(0));
            for (std::size_t j = 0; j < Lm.size(); ++j) {
                if (j > 0 && Lm[j] == Lm[j - 1]) continue;
                const R cntL = R(count_in(Lm, Lm[j]));
                const std::complex<R>& vj = v[lat.index_of(Lm[j])];
                dB += cntL * std::complex<R>(vj.real(), -vj.imag()) *
                      monomial_product(erase_one(Lm, Lm[j]), lat, u, true);
            }
            out[lat.index_of(m)] += base * A * dB;
        }
    };
    for (const auto& [key, c] : P.coeffs()) {
        const R w = R(multiplicity(key.k)) * R(multiplicity(key.l));
        const std::complex<R> cc(R(c.real()), R(c.imag()));
        term_derivative(key.k, key.l, cc, w);
        if (!self_conjugate(key))
            term_derivative(key.l, key.k, std::complex<R>(cc.real(), -cc.imag()), w);
    }
}

inline FourierState gradient_differential(const HomPoly& P, const FourierState& u, const FourierState& v) {
    FourierState g(u.lattice);
    accumulate_gradient_differential<double>(P, u.lattice, u.amps, v.amps, g.amps);
    return g;
}

// ---------------------------------------------------------------------------
// Poisson brackets

/// {P,Q}(u) = (i grad P, grad Q)_{L^2} = 2i sum_m (dP/dcu_m dQ/du_m - dP/du_m dQ/dcu_m).
/// Computed as a coefficient contraction over orbit pairs; the result is the
/// unique element of the class with degree 2(q+q'-1).
inline HomPoly poisson_bracket(const HomPoly& P, const HomPoly& Q,
                               std::size_t budget = default_orbit_budget) {
    if (P.q() < 2 || Q.q() < 2) throw std::invalid_argument("bracket requires half-degrees >= 2");
    struct Term {
        const std::vector<ModeIndex>* K;
        const std::vector<ModeIndex>* L;
        std::complex<double> a; // coefficient times both multiplicities
        std::vector<ModeIndex> storage_k, storage_l;
    };
    auto expand = [](const HomPoly& X) {
        std::vector<Term> terms;
        terms.reserve(2 * X.size());
        for (const auto& [key, c] : X.coeffs()) {
            const double w = multiplicity(key.k) * multiplicity(key.l);
            Term t1;
            t1.storage_k = key.k;
            t1.storage_l = key.l;
            t1.a = w * c;
            terms.push_back(std::move(t1));
            if (!self_conjugate(key)) {
                Term t2;
                t2.storage_k = key.l;
                t2.storage_l = key.k;
                t2.a = w * std::conj(c);
                terms.push_back(std::move(t2));
            }
        }
        for (auto& t : terms) {
            t.K = &t.storage_k;
            t.L = &t.storage_l;
        }
        return terms;
    };
    const std::vector<Term> tp = expand(P);
    const std::vector<Term> tq = expand(Q);

    HomPoly::CoeffMap acc;
    // only canonical-orientation monomials are accumulated; the conjugate
    // orientation carries the same information by the reality of the bracket
    auto deposit = [&](std::vector<ModeIndex> K, std::vector<ModeIndex> L, std::complex<double> val) {
        std::sort(K.begin(), K.end());
        std::sort(L.begin(), L.end());
        IndexPair key{std::move(K), std::move(L)};
        if (!is_canonical(key)) return;
        acc[key] += val;
        if (acc.size() > budget) throw std::runtime_error("orbit budget exceeded in poisson_bracket");
    };

    const std::complex<double> two_i(0.0, 2.0);
    for (const auto& t1 : tp) {
        for (const auto& t2 : tq) {
            const std::complex<double> ab = t1.a * t2.a;
            // contraction over m in L(P) and K(Q): + 2i cnt_m(L_P) cnt_m(K_Q)
            for (std::size_t i = 0; i < t1.L->size(); ++i) {
                if (i > 0 && (*t1.L)[i] == (*t1.L)[i - 1]) continue;
                const ModeIndex& m = (*t1.L)[i];
                const int c2 = count_in(*t2.K, m);
                if (c2 == 0) continue;
                const int c1 = count_in(*t1.L, m);
                deposit(merge_sorted(*t1.K, erase_one(*t2.K, m)),
                        merge_sorted(erase_one(*t1.L, m), *t2.L),
                        two_i * ab * static_cast<double>(c1 * c2));
            }
            // contraction over m in K(P) and L(Q): - 2i cnt_m(K_P) cnt_m(L_Q)
            for (std::size_t i = 0; i < t1.K->size(); ++i) {
                if (i > 0 && (*t1.K)[i] == (*t1.K)[i - 1]) continue;
                const ModeIndex& m = (*t1.K)[i];
                const int c2 = count_in(*t2.L, m);
                if (c2 == 0) continue;
                const int c1 = count_in(*t1.K, m);
                deposit(merge_sorted(erase_one(*t1.K, m), *t2.K),
                        merge_sorted(*t1.L, erase_one(*t2.L, m)),
                        -two_i * ab * static_cast<double>(c1 * c2));
            }
        }
    }
    for (auto& [key, val] : acc) val /= multiplicity(key.k) * multiplicity(key.l);
    return HomPoly::from_canonical(P.q() + Q.q() - 1, std::move(acc));
}

/// Weights g_k of a diagonal quadratic Z(u) = sum g_k |u_k|^2.
struct DiagonalQuadratic {
    TruncatedLattice lattice;
    std::vector<double> g;

    DiagonalQuadratic() = default;
    explicit DiagonalQuadratic(const TruncatedLattice& lat) : lattice(lat), g(lat.size(), 0.0) {}

    double at(const ModeIndex& k) const { return g[lattice.index_of(k)]; }

    double evaluate(const FourierState& u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * std::norm(u.amps[i]);
        return acc;
    }
};

inline DiagonalQuadratic z2_from_frequencies(const FrequencyTable& omega) {
    DiagonalQuadratic z(omega.lattice);
    z.g = omega.omega;
    return z;
}

/// Weights of the truncated observable: dyadic block weights 4^{ns} below
/// N = 2^{n_max}, exact |k|^{2s} at |k| >= N.
inline DiagonalQuadratic nns_weights(const TruncatedLattice& lat, double s, long long N) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    const int nmax = log2_exact(N);
    DiagonalQuadratic z(lat);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const ModeIndex k = lat.mode_at(i);
        const long long r2 = k.norm2();
        if (r2 >= N * N)
            z.g[i] = std::pow(static_cast<double>(r2), s);
        else {
            const int n = block_index(k);
            z.g[i] = (n < nmax) ? std::pow(4.0, static_cast<double>(n) * s) : 0.0;
        }
    }
    return z;
}

/// {P, Z} for diagonal quadratic Z: the coefficient at (k,l) is multiplied by
/// -2i (sum g_{k_j} - sum g_{l_j}); the degree does not change.
inline HomPoly bracket_with_diagonal(const HomPoly& P, const DiagonalQuadratic& Z) {
    HomPoly::CoeffMap m;
    for (const auto& [key, c] : P.coeffs()) {
        double d = 0.0;
        for (const auto& mode : key.k) d += Z.at(mode);
        for (const auto& mode : key.l) d -= Z.at(mode);
        if (d == 0.0) continue;
        m.emplace(key, c * std::complex<double>(0.0, -2.0 * d));
    }
    return HomPoly::from_canonical(P.q(), std::move(m));
}

/// Splits P into (resonant, nonresonant): |Omega| < nu vs |Omega| >= nu.
inline std::pair<HomPoly, HomPoly> resonant_split(const HomPoly& P, const FrequencyTable& omega,
                                                  double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
    HomPoly::CoeffMap res, nonres;
    for (const auto& [key, c] : P.coeffs()) {
        if (small_divisor(key, omega) < nu)
            res.emplace(key, c);
        else
            nonres.emplace(key, c);
    }
    return {HomPoly::from_canonical(P.q(), std::move(res)),
            HomPoly::from_canonical(P.q(), std::move(nonres))};
}

/// Splits P into (low, high) by the second-largest mode norm: mu_2 < N vs mu_2 >= N.
inline std::pair<HomPoly, HomPoly> mu2_split(const HomPoly& P, long long N) {
    if (!is_power_of_two(N)) throw std::invalid_argument("N must be a power of two");
    HomPoly::CoeffMap low, high;
    for (const auto& [key, c] : P.coeffs()) {
        if (mu_norm2(key, 2) < N * N)
            low.emplace(key, c);
        else
            high.emplace(key, c);
    }
    return {HomPoly::from_canonical(P.q(), std::move(low)),
            HomPoly::from_canonical(P.q(), std::move(high))};
}

// ---------------------------------------------------------------------------
// The NLS nonlinearity

/// P(u) = sigma (2 pi)^{-pd} / (p+1) * sum over all zero-momentum (p+1, p+1)
/// index pairs within the box. Every orbit carries the same coefficient.
inline HomPoly nls_nonlinearity(const TruncatedLattice& lat, int p, double sigma,
                                std::size_t budget = default_orbit_budget) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    const int q = p + 1;
    const double coeff = sigma * std::pow(two_pi, -static_cast<double>(p * lat.dim())) /
                         static_cast<double>(p + 1);

    // enumerate sorted q-multisets of box modes, bucketed by total momentum
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

    HomPoly::CoeffMap m;
    for (const auto& [sum, lists] : buckets) {
        for (std::size_t a = 0; a < lists.size(); ++a) {
            for (std::size_t b = a; b < lists.size(); ++b) {
                m.emplace(IndexPair{lists[a], lists[b]}, std::complex<double>(coeff, 0.0));
                if (m.size() > budget)
                    throw std::runtime_error("orbit budget exceeded in nls_nonlinearity");
            }
        }
    }
    return HomPoly::from_canonical(q, std::move(m));
}

} // namespace nlsnf
