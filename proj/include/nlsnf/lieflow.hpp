#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "polyalg.hpp"

namespace nlsnf {

/// Existence radius of the time-1 flow: eps_chi = (1/4)(2q ||chi||)^{-1/(2q-2)}.
inline double epsilon_chi(const HomPoly& chi) {
    if (chi.linf() == 0.0) return std::numeric_limits<double>::infinity();
    const int q = chi.q();
    return 0.25 * std::pow(2.0 * q * chi.linf(), -1.0 / (2.0 * q - 2.0));
}

struct FlowConfig {
    double dt = 1e-3;
    double t_final = 1.0;
};

inline void validate(const FlowConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(std::abs(cfg.t_final) <= 1.0)) throw std::invalid_argument("|t_final| must be <= 1");
}

namespace detail {

template <class R>
double l1_double(const std::vector<std::complex<R>>& v) {
    double acc = 0.0;
    for (const auto& a : v)
        acc += std::hypot(static_cast<double>(a.real()), static_cast<double>(a.imag()));
    return acc;
}

template <class R>
void axpy(std::vector<std::complex<R>>& y, R a, const std::vector<std::complex<R>>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace detail

/// Integrates the Hamiltonian flow -i du/dt = grad chi(u), i.e. du/dt = i grad chi(u),
/// with the fixed-step classical 4th-order scheme. Aborts if the l1 norm leaves
/// the ball of radius 2 eps_chi where existence is guaranteed.
template <class R>
std::vector<std::complex<R>> flow_t(const HomPoly& chi, const TruncatedLattice& lat,
                                    std::vector<std::complex<R>> u, const FlowConfig& cfg) {
    validate(cfg);
    if (cfg.t_final == 0.0 || chi.empty()) return u;
    const double guard = 2.0 * epsilon_chi(chi);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(cfg.t_final) / cfg.dt)));
    // divide in R: rounding t_final/steps in double first would misplace the
    // final time by ~steps * eps_double, visible in high-precision audits
    const R h = R(cfg.t_final) / R(steps);
    const std::complex<R> iu(R(0), R(1));

    std::vector<std::complex<R>> k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size()), tmp(u.size());
    auto field = [&](const std::vector<std::complex<R>>& v, std::vector<std::complex<R>>& out) {
        std::fill(out.begin(), out.end(), std::complex<R>(R(0), R(0)));
        accumulate_gradient<R>(chi, lat, v, out);
        for (auto& a : out) a *= iu;
    };
    for (int s = 0; s < steps; ++s) {
        if (detail::l1_double(u) > guard)
            throw std::runtime_error("flow left the guaranteed existence ball");
        field(u, k1);
        tmp = u;
        detail::axpy(tmp, h / R(2), k1);
        field(tmp, k2);
        tmp = u;
        detail::axpy(tmp, h / R(2), k2);
        field(tmp, k3);
        tmp = u;
        detail::axpy(tmp, h, k3);
        field(tmp, k4);
        detail::axpy(u, h / R(6), k1);
        detail::axpy(u, h / R(3), k2);
        detail::axpy(u, h / R(3), k3);
        detail::axpy(u, h / R(6), k4);
    }
    return u;
}

inline FourierState flow(const HomPoly& chi, const FourierState& u0, const FlowConfig& cfg) {
    FourierState out = u0;
    out.amps = flow_t<double>(chi, u0.lattice, u0.amps, cfg);
    return out;
}

/// Flow together with its differential: integrates the variational equation
/// dv/dt = i d(grad chi)(u)(v) alongside the state.
inline std::pair<FourierState, FourierState> flow_with_tangent(const HomPoly& chi,
                                                               const FourierState& u0,
                                                               const FourierState& v0,
                                                               const FlowConfig& cfg) {
    validate(cfg);
    if (cfg.t_final == 0.0 || chi.empty()) return {u0, v0};
    const TruncatedLattice& lat = u0.lattice;
    const double guard = 2.0 * epsilon_chi(chi);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(cfg.t_final) / cfg.dt)));
    const double h = cfg.t_final / steps;
    const std::complex<double> iu(0.0, 1.0);

    using Vec = std::vector<std::complex<double>>;
    struct Pair {
        Vec u, v;
    };
    auto field = [&](const Pair& y, Pair& out) {
        out.u.assign(y.u.size(), {0.0, 0.0});
        out.v.assign(y.v.size(), {0.0, 0.0});
        accumulate_gradient<double>(chi, lat, y.u, out.u);
        accumulate_gradient_differential<double>(chi, lat, y.u, y.v, out.v);
        for (auto& a : out.u) a *= iu;
        for (auto& a : out.v) a *= iu;
    };
    auto saxpy = [](Pair& y, double a, const Pair& x) {
        for (std::size_t i = 0; i < y.u.size(); ++i) y.u[i] += a * x.u[i];
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += a * x.v[i];
    };
    Pair y{u0.amps, v0.amps}, k1, k2, k3, k4, tmp;
    for (int s = 0; s < steps; ++s) {
        if (detail::l1_double(y.u) > guard)
            throw std::runtime_error("flow left the guaranteed existence ball");
        field(y, k1);
        tmp = y;
        saxpy(tmp, h / 2, k1);
        field(tmp, k2);
        tmp = y;
        saxpy(tmp, h / 2, k2);
        field(tmp, k3);
        tmp = y;
        saxpy(tmp, h, k3);
        field(tmp, k4);
        saxpy(y, h / 6, k1);
        saxpy(y, h / 3, k2);
        saxpy(y, h / 3, k3);
        saxpy(y, h / 6, k4);
    }
    FourierState uo = u0, vo = v0;
    uo.amps = std::move(y.u);
    vo.amps = std::move(y.v);
    return {std::move(uo), std::move(vo)};
}

/// Truncation audit for the ad-series: terms beyond the degree cap are not
/// materialized; their l-infinity size is bounded via the bracket estimate.
struct DiscardLedger {
    std::size_t dropped = 0;
    double max_estimate = 0.0;

    void record(double estimate) {
        dropped += 1;
        max_estimate = std::max(max_estimate, estimate);
    }
};

/// Truncated adjoint series: each part Q of half-degree q is mapped to
/// sum_{n=0}^{m_q} ad_chi^n Q / n! with m_q the smallest index such that
/// (m_q+1) stage + q > r, where stage = q(chi) - 1. Outputs are merged by
/// half-degree; everything kept has half-degree <= r by construction.
inline std::map<int, HomPoly> lie_transform(const std::map<int, HomPoly>& parts, const HomPoly& chi,
                                            int r, DiscardLedger* ledger = nullptr,
                                            std::size_t budget = default_orbit_budget) {
    std::map<int, HomPoly> out;
    auto merge = [&out](int q, const HomPoly& X) {
        if (X.empty()) return;
        auto it = out.find(q);
        if (it == out.end())
            out.emplace(q, X);
        else
            it->second = add(it->second, X);
    };
    if (chi.empty()) return parts;
    const int stage = chi.q() - 1;
    for (const auto& [q, Q] : parts) {
        if (Q.empty()) continue;
        int m_q = 0;
        while ((m_q + 1) * stage + q <= r) ++m_q;
        merge(q, Q);
        HomPoly cur = Q;
        double factorial = 1.0;
        for (int n = 1; n <= m_q; ++n) {
            cur = poisson_bracket(chi, cur, budget);
            factorial *= n;
            merge(q + n * stage, scaled(cur, 1.0 / factorial));
            if (cur.empty()) break;
        }
        if (ledger != nullptr && !cur.empty()) {
            // first dropped term: || ad^{m_q+1} Q || / (m_q+1)! via the bracket bound
            const double est =
                4.0 * chi.q() * (q + m_q * stage) * chi.linf() * cur.linf() / (factorial * (m_q + 1));
            ledger->record(est);
        }
    }
    return out;
}

} // namespace nlsnf
