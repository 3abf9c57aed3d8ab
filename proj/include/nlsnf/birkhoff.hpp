#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "lieflow.hpp"
#include "polyalg.hpp"
#include "potential.hpp"

namespace nlsnf {

/// The epsilon-dependent parameters of the normal form construction together
/// with the model constants.
struct ParameterPlan {
    double eps = 0.0;
    double s0 = 0.0;
    int d = 1;
    int p = 1;

    double r_lower = 0.0; // |log eps| / (4 log |log eps|)
    double r_upper = 0.0; // |log eps| / (3 log |log eps|)
    bool feasible = false;
    int r = 0;

    double eta = 0.0;        // min(1, (s0 - d/2)/2)
    int n_exponent = 0;      // N = 2^{n_exponent}
    double N = 0.0;
    bool n_widened = false;  // power-of-two rounding left the bracket and was widened
    double gamma_tilde = 0.0;
    double nu = 0.0;
    double C = 1.0;
    double rho = 0.0;
    double T_eps = 0.0;

    std::vector<std::string> warnings;
};

/// Derives (r, eta, N, nu, rho, T_eps) from eps. The r-window may contain no
/// integer; the plan is then reported infeasible with the window still filled in.
inline ParameterPlan plan_parameters(double eps, double s0, int d, int p, double gamma_emp,
                                     double C = 1.0) {
    if (!(eps > 0.0) || !(eps < std::exp(-std::exp(1.0))))
        throw std::invalid_argument("eps must lie in (0, e^{-e})");
    if (!(s0 > 0.5 * d)) throw std::invalid_argument("s0 must exceed d/2");
    ParameterPlan plan;
    plan.eps = eps;
    plan.s0 = s0;
    plan.d = d;
    plan.p = p;
    plan.C = C;

    const double L = std::abs(std::log(eps));
    const double LL = std::log(L);
    plan.r_lower = L / (4.0 * LL);
    plan.r_upper = L / (3.0 * LL);
    plan.eta = std::min(1.0, 0.5 * (s0 - 0.5 * d));
    plan.T_eps = std::exp(L * L / (4.0 * LL));
    plan.gamma_tilde = std::min(gamma_emp, 1.0);

    const int r_candidate = static_cast<int>(std::floor(plan.r_upper));
    plan.feasible = r_candidate >= 2 && static_cast<double>(r_candidate) >= plan.r_lower;
    if (!plan.feasible) {
        plan.warnings.push_back("no admissible integer r in the window; eps is too large");
        return plan;
    }
    plan.r = r_candidate;

    // N: largest power of two strictly below eps^{-r/eta}
    const double lx = (plan.r / plan.eta) * std::log2(1.0 / eps);
    int n = static_cast<int>(std::floor(lx));
    if (static_cast<double>(n) == lx) n -= 1;
    if (static_cast<double>(n) < lx - 1.0) {
        n += 1;
        plan.n_widened = true;
        plan.warnings.push_back("power-of-two rounding left the N bracket; widened by one factor of two");
    }
    plan.n_exponent = n;
    plan.N = (n < 1024) ? std::exp2(static_cast<double>(n)) : std::numeric_limits<double>::infinity();

    const double log2_2rN = std::log2(2.0 * plan.r) + static_cast<double>(n);
    plan.nu = plan.gamma_tilde * std::pow(static_cast<double>(plan.r), -4.0) *
              std::pow(log2_2rN, -(2.0 * plan.r + 1.0));
    plan.rho = std::sqrt(plan.nu) / (C * plan.r);
    if (eps >= plan.rho)
        plan.warnings.push_back("working radius constraint violated with placeholder constants: eps >= rho");
    return plan;
}

/// Constant making eps_chi >= 14 rho hold with rho = sqrt(nu)/(C r).
inline double calibrated_C(double nu, int r, double eps_chi) {
    return 14.0 * std::sqrt(nu) / (r * eps_chi);
}

/// Solves {chi, Z_2} + L = L_res: chi is supported on |Omega| >= nu with
/// chi_{k,l} = L_{k,l} / Omega(k,l) and L_res is the nu-resonant part.
/// (Omega = 2iD with D real, so the division multiplies by -i/(2D); this is
/// the unique choice making the identity hold coefficient-wise and preserving
/// the reality condition.)
inline std::pair<HomPoly, HomPoly> cohomological_solve(const HomPoly& L, const FrequencyTable& omega,
                                                       double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
    HomPoly::CoeffMap chi, res;
    for (const auto& [key, c] : L.coeffs()) {
        const double dvs = signed_divisor(key, omega); // Omega = 2i dvs
        if (2.0 * std::abs(dvs) >= nu)
            chi.emplace(key, c * std::complex<double>(0.0, -1.0) / (2.0 * dvs));
        else
            res.emplace(key, c);
    }
    return {HomPoly::from_canonical(L.q(), std::move(chi)),
            HomPoly::from_canonical(L.q(), std::move(res))};
}

struct NormalFormResult {
    int r = 0;
    double nu = 0.0;
    std::vector<HomPoly> generators;        // chi for stages 1, ..., r-1 (possibly empty)
    std::map<int, HomPoly> resonant_parts;  // final L^{(2q)} by half-degree q
    DiscardLedger ledger;
};

/// The iterated construction: at stage s = 1..r-1 the non-resonant part of the
/// degree 2s+2 term is removed by the Lie transform of the cohomological
/// generator, and all parts are pushed through the truncated adjoint series
/// together with the chain of corrections generated by {chi, Z_2}.
inline NormalFormResult normal_form(const DiagonalQuadratic& Z2, const FrequencyTable& omega,
                                    const HomPoly& P, int r, double nu,
                                    std::size_t budget = default_orbit_budget) {
    if (r < 2) throw std::invalid_argument("normal form order r must be >= 2");
    NormalFormResult out;
    out.r = r;
    out.nu = nu;

    std::map<int, HomPoly> parts;
    if (P.q() <= r) parts.emplace(P.q(), P);

    for (int stage = 1; stage <= r - 1; ++stage) {
        const int q_target = stage + 1;
        auto it = parts.find(q_target);
        if (it == parts.end() || it->second.empty()) {
            out.generators.emplace_back();
            continue;
        }
        auto [chi, l_res] = cohomological_solve(it->second, omega, nu);
        out.generators.push_back(chi);
        if (chi.empty()) continue;

        std::map<int, HomPoly> next = lie_transform(parts, chi, r, &out.ledger, budget);

        // chain of corrections from the quadratic part: sum over n >= 1 of
        // ad_chi^{n-1} {chi, Z_2} / n! entering at half-degree n*stage + 1.
        // The n = 1 term lands exactly on the target degree and, by the
        // cohomological identity, turns it into the resonant part; assigning
        // l_res directly avoids leaving roundoff residue on far-from-resonant
        // orbits (no other part can contribute at the target degree).
        next[q_target] = l_res;
        if (l_res.empty()) next.erase(q_target);
        HomPoly w = bracket_with_diagonal(chi, Z2);
        double factorial = 1.0;
        int n = 1;
        while (n * stage + 1 <= r && !w.empty()) {
            factorial *= n;
            const int q_out = n * stage + 1;
            if (n >= 2) {
                auto jt = next.find(q_out);
                if (jt == next.end())
                    next.emplace(q_out, scaled(w, 1.0 / factorial));
                else
                    jt->second = add(jt->second, scaled(w, 1.0 / factorial));
            }
            ++n;
            if (n * stage + 1 <= r) w = poisson_bracket(chi, w, budget);
        }
        if (!w.empty()) {
            const double est = 4.0 * chi.q() * (n * stage + 1 - stage) * chi.linf() * w.linf() /
                               (factorial * n);
            out.ledger.record(est);
        }
        parts = std::move(next);
    }
    out.resonant_parts = std::move(parts);
    return out;
}

/// tau^{(1)} applies the time +1 flows, last constructed generator first
/// (tau^{(1),#} = tau^{(1)} o Phi_chi^1 at each stage).
inline FourierState apply_tau1(const NormalFormResult& nf, const FourierState& u, double dt = 1e-3) {
    FourierState v = u;
    FlowConfig cfg;
    cfg.dt = dt;
    cfg.t_final = 1.0;
    for (auto it = nf.generators.rbegin(); it != nf.generators.rend(); ++it)
        if (!it->empty()) v = flow(*it, v, cfg);
    return v;
}

/// tau^{(0)} applies the time -1 flows, first constructed generator first
/// (tau^{(0),#} = Phi_chi^{-1} o tau^{(0)} at each stage); inverse of tau^{(1)}.
inline FourierState apply_tau0(const NormalFormResult& nf, const FourierState& u, double dt = 1e-3) {
    FourierState v = u;
    FlowConfig cfg;
    cfg.dt = dt;
    cfg.t_final = -1.0;
    for (const auto& chi : nf.generators)
        if (!chi.empty()) v = flow(chi, v, cfg);
    return v;
}

/// High-precision variant of apply_tau1 for residual audits.
template <class R>
std::vector<std::complex<R>> apply_tau1_t(const NormalFormResult& nf, const TruncatedLattice& lat,
                                          std::vector<std::complex<R>> amps, double dt = 1e-3) {
    FlowConfig cfg;
    cfg.dt = dt;
    cfg.t_final = 1.0;
    for (auto it = nf.generators.rbegin(); it != nf.generators.rend(); ++it)
        if (!it->empty()) amps = flow_t<R>(*it, lat, std::move(amps), cfg);
    return amps;
}

/// Certificate: the largest margin violation nu - |Omega| over all coefficients
/// of all final parts; positive everywhere iff every part is nu-resonant.
inline double resonance_margin(const NormalFormResult& nf, const FrequencyTable& omega) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& [q, L] : nf.resonant_parts)
        for (const auto& [key, c] : L.coeffs())
            worst = std::min(worst, nf.nu - small_divisor(key, omega));
    return worst;
}

} // namespace nlsnf
