// Acceptance gate: twelve quantitative criteria, one pass/fail line each.
// Usage: acceptance [n ...]  (no arguments runs all twelve)

#include <nlsnf/nlsnf.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace nlsnf;
using namespace nlsnf::testing;

namespace {

using quad = __float128;

quad quad_z2(const DiagonalQuadratic& Z2, const std::vector<std::complex<quad>>& amps) {
    quad acc = 0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        acc += quad(Z2.g[i]) * (amps[i].real() * amps[i].real() + amps[i].imag() * amps[i].imag());
    return acc;
}

std::vector<std::complex<quad>> to_quad(const std::vector<std::complex<double>>& a) {
    std::vector<std::complex<quad>> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = std::complex<quad>(quad(a[i].real()), quad(a[i].imag()));
    return out;
}

// --------------------------------------------------------------- criterion 1+2

bool crit_bracket_oracle(std::string& detail, bool check_bound) {
    TruncatedLattice lat(1, 2); // modes {-2..2}
    double worst = 0.0;
    double worst_bound = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int q = 2 + (t % 2);
        const int qp = 2 + ((t / 2) % 2);
        const HomPoly P = random_poly(lat, q, 1000 + static_cast<std::uint64_t>(t), 15);
        const HomPoly Q = random_poly(lat, qp, 2000 + static_cast<std::uint64_t>(t), 15);
        const HomPoly S = poisson_bracket(P, Q);
        const double bound = 4.0 * q * qp * P.linf() * Q.linf();
        worst_bound = std::max(worst_bound, S.linf() / bound);
        if (check_bound) continue;
        for (int j = 0; j < 100; ++j) {
            const FourierState u =
                random_state(lat, 5000 + static_cast<std::uint64_t>(100 * t + j), 0.6);
            const double oracle = bracket_pairing(P, Q, u);
            worst = std::max(worst, std::abs(evaluate(S, u) - oracle) / (1.0 + std::abs(oracle)));
        }
    }
    std::ostringstream os;
    if (check_bound) {
        os << "max ||{P,Q}|| / (4qq'||P|| ||Q||) = " << worst_bound << " over 50 pairs";
        detail = os.str();
        return worst_bound <= 1.0 + 1e-12;
    }
    os << "worst rel err vs gradient pairing = " << worst << " (50 pairs x 100 states)";
    detail = os.str();
    return worst <= 1e-10;
}

// ----------------------------------------------------------------- criterion 3

bool crit_gradient_fd(std::string& detail) {
    TruncatedLattice lat(1, 2);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int q = 2 + (t % 2);
        const HomPoly P = random_poly(lat, q, 3000 + static_cast<std::uint64_t>(t), 12);
        const FourierState u = random_state(lat, 4000 + static_cast<std::uint64_t>(t), 0.7);
        const FourierState g = gradient(P, u);
        const double h = 1e-6;
        for (std::size_t i = 0; i < lat.size(); ++i) {
            for (int dir = 0; dir < 2; ++dir) {
                FourierState up = u, um = u;
                const std::complex<double> dz =
                    dir ? std::complex<double>(0, h) : std::complex<double>(h, 0);
                up.amps[i] += dz;
                um.amps[i] -= dz;
                const double fd = (evaluate(P, up) - evaluate(P, um)) / (2 * h);
                const double an = dir ? g.amps[i].imag() : g.amps[i].real();
                worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(an)));
            }
        }
    }
    std::ostringstream os;
    os << "worst rel err vs central differences = " << worst << " (50 cases)";
    detail = os.str();
    return worst < 1e-6;
}

// ----------------------------------------------------------------- criterion 4

bool crit_flow_suite(std::string& detail) {
    TruncatedLattice lat(1, 2);
    double worst_rev = 0.0, worst_cons = 0.0, worst_symp = 0.0, worst_close = 0.0;
    FlowConfig cfg;
    cfg.dt = 1e-3;
    for (int t = 0; t < 10; ++t) {
        const int q = 2 + (t % 2);
        const HomPoly chi = random_poly(lat, q, 6000 + static_cast<std::uint64_t>(t), 10);
        const double ec = epsilon_chi(chi);
        const FourierState u = random_state_l1(lat, 7000 + static_cast<std::uint64_t>(t), 0.5 * ec);

        cfg.t_final = 1.0;
        const FourierState v = flow(chi, u, cfg);
        cfg.t_final = -1.0;
        const FourierState w = flow(chi, v, cfg);
        double rt = 0.0, close = 0.0;
        for (std::size_t i = 0; i < lat.size(); ++i) {
            rt += std::abs(w.amps[i] - u.amps[i]);
            close += std::abs(v.amps[i] - u.amps[i]);
        }
        worst_rev = std::max(worst_rev, rt);
        worst_cons = std::max(worst_cons, std::abs(evaluate(chi, v) - evaluate(chi, u)));
        const double l1 = l1_norm(u);
        const double bound = std::pow(l1 / ec, 2.0 * q - 2.0) * l1;
        worst_close = std::max(worst_close, close - bound);

        const FourierState tv0 = random_state(lat, 8000 + static_cast<std::uint64_t>(t), 1.0);
        const FourierState tw0 = random_state(lat, 9000 + static_cast<std::uint64_t>(t), 1.0);
        cfg.t_final = 1.0;
        const auto [uv, tv] = flow_with_tangent(chi, u, tv0, cfg);
        const auto [uw, tw] = flow_with_tangent(chi, u, tw0, cfg);
        auto form = [&](const FourierState& a, const FourierState& b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < lat.size(); ++i)
                acc += (a.amps[i] * std::conj(b.amps[i])).imag();
            return acc;
        };
        worst_symp = std::max(worst_symp, std::abs(form(tv, tw) - form(tv0, tw0)));
    }
    std::ostringstream os;
    os << "reversibility " << worst_rev << ", generator drift " << worst_cons
       << ", symplectic-form drift " << worst_symp << ", closeness slack " << worst_close;
    detail = os.str();
    return worst_rev <= 1e-8 && worst_cons <= 1e-9 && worst_symp <= 1e-8 && worst_close <= 1e-6;
}

// ----------------------------------------------------------------- criterion 5

bool crit_cohomological(std::string& detail) {
    TruncatedLattice lat(1, 3);
    const FrequencyTable omega = frequencies(sample_potential(17, lat.n_max()), lat);
    const DiagonalQuadratic Z2 = z2_from_frequencies(omega);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int q = 2 + (t % 2);
        const HomPoly L = random_poly(lat, q, 10000 + static_cast<std::uint64_t>(t), 15);
        const double nu = 1e-3 * std::pow(10.0, t % 4); // 1e-3 .. 1, three decades
        const auto [chi, lres] = cohomological_solve(L, omega, nu);
        const HomPoly lhs = add(bracket_with_diagonal(chi, Z2), L);
        for (const auto& [key, c] : lhs.coeffs()) {
            auto it = lres.coeffs().find(key);
            const std::complex<double> r = it == lres.coeffs().end() ? 0.0 : it->second;
            worst = std::max(worst, std::abs(c - r));
        }
        for (const auto& [key, c] : lres.coeffs())
            if (lhs.coeffs().find(key) == lhs.coeffs().end()) worst = std::max(worst, std::abs(c));
    }
    std::ostringstream os;
    os << "worst coefficient error of {chi,Z2}+L vs L_res = " << worst
       << " (20 cases, nu over 3 decades)";
    detail = os.str();
    return worst <= 1e-12;
}

// ----------------------------------------------------------------- criterion 6

bool crit_residual_order(std::string& detail) {
    TruncatedLattice lat(1, 4);
    const FrequencyTable omega = frequencies(sample_potential(4, lat.n_max()), lat);
    const DiagonalQuadratic Z2 = z2_from_frequencies(omega);
    const HomPoly P = nls_nonlinearity(lat, 1, 1.0);
    const double nu = 0.3;
    std::ostringstream os;
    bool ok = true;
    for (int r : {2, 3}) {
        const NormalFormResult nf = normal_form(Z2, omega, P, r, nu);
        const FourierState dir = random_state_l1(lat, 123, 1.0);
        std::vector<double> amps, resids;
        // the construction carries double-precision coefficients, which break the
        // cohomological identity at the ~1e-18 absolute level and leave an
        // irreducible residual floor of order a^4; the fit window is chosen so
        // the a^{2r+2} remainder stays above that floor for each r
        const int e_lo = (r == 2) ? 6 : 5;
        const int e_hi = (r == 2) ? 10 : 8;
        for (int e = e_lo; e <= e_hi; ++e) {
            const double a = std::exp2(-e);
            std::vector<std::complex<quad>> u(lat.size());
            for (std::size_t i = 0; i < lat.size(); ++i)
                u[i] = std::complex<quad>(quad(a) * quad(dir.amps[i].real()),
                                          quad(a) * quad(dir.amps[i].imag()));
            // dt = 1e-2 keeps the integrator error many orders below the a^{2r+2}
            // remainder while holding the high-precision run under the time budget
            const std::vector<std::complex<quad>> tu = apply_tau1_t<quad>(nf, lat, u, 1e-2);
            quad resid = quad_z2(Z2, tu) + evaluate_t<quad>(P, lat, tu) - quad_z2(Z2, u);
            for (const auto& [q, L] : nf.resonant_parts) resid -= evaluate_t<quad>(L, lat, u);
            const double rd = std::abs(static_cast<double>(resid));
            amps.push_back(a);
            resids.push_back(rd);
        }
        const double slope = loglog_slope(amps, resids);
        os << "r=" << r << " slope " << slope << " (need >= " << 2 * r + 1.5 << "); ";
        if (slope < 2.0 * r + 1.5) ok = false;
    }
    detail = os.str();
    return ok;
}

// ----------------------------------------------------------------- criterion 7

bool crit_resonance_certificate(std::string& detail) {
    std::ostringstream os;
    // (a) every coefficient surviving the construction is nu-resonant
    TruncatedLattice lat(1, 4);
    const FrequencyTable omega = frequencies(sample_potential(4, lat.n_max()), lat);
    const NormalFormResult nf =
        normal_form(z2_from_frequencies(omega), omega, nls_nonlinearity(lat, 1, 1.0), 3, 0.3);
    const double margin = resonance_margin(nf, omega);
    os << "resonance margin " << margin << "; ";
    bool ok = margin > 0.0;

    // (b) the low resonant part commutes exactly with the truncated weighted norm
    // when nu is at the admissible threshold, and can fail to when far above it
    TruncatedLattice big(1, 16);
    const BlockPotential V = sample_potential(21, big.n_max());
    const FrequencyTable om = frequencies(V, big);
    const double gamma = gamma_empirical(V, big, 2);
    const long long N = 2;
    const int q = 2;
    const double nu_ok =
        gamma * std::pow(static_cast<double>(q), -4.0) *
        std::pow(std::log2(2.0 * q * static_cast<double>(N)), -(2.0 * q + 1.0));
    const HomPoly full = nls_nonlinearity(big, 1, 1.0);
    const DiagonalQuadratic W = nns_weights(big, 1.0, N);

    const HomPoly low_ok = mu2_split(resonant_split(full, om, nu_ok).first, N).first;
    const HomPoly comm_ok = bracket_with_diagonal(low_ok, W);
    os << "admissible nu=" << nu_ok << ": commutator orbits " << comm_ok.size();
    if (!comm_ok.empty()) ok = false;

    const HomPoly low_bad = mu2_split(resonant_split(full, om, 100.0).first, N).first;
    const HomPoly comm_bad = bracket_with_diagonal(low_bad, W);
    os << "; violated nu=100: commutator orbits " << comm_bad.size();
    if (comm_bad.empty()) ok = false; // the gate must be sharp, not vacuous
    detail = os.str();
    return ok;
}

// ----------------------------------------------------------------- criterion 8

bool crit_measure_estimate(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (int n_max : {4, 6}) {
        const double p1 = mc_event_probability(1e-3, 2, n_max, 100000, 99);
        const double p2 = mc_event_probability(1e-2, 2, n_max, 100000, 99);
        const double ratio = (p1 > 0.0) ? p2 / p1 / 10.0 : 0.0;
        os << "n_max=" << n_max << ": p(1e-3)=" << p1 << " p(1e-2)=" << p2
           << " linearity factor " << ratio << "; ";
        if (!(p1 > 0.0) || ratio < 1.0 / 3.0 || ratio > 3.0) ok = false;
    }
    detail = os.str();
    return ok;
}

// ----------------------------------------------------------------- criterion 9

bool crit_v_independence(std::string& detail) {
    TruncatedLattice lat(1, 16);
    std::vector<BlockPotential> pots;
    std::vector<FrequencyTable> oms;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        pots.push_back(sample_potential(s, lat.n_max()));
        oms.push_back(frequencies(pots.back(), lat));
    }
    bool ok = true;
    std::size_t checked = 0;
    double worst = 0.0;
    for_each_zero_momentum_pair(lat, 2, [&](const IndexPair& p) {
        if (satisfies_removal(p)) return;
        ++checked;
        // exact certificate: per-block counts cancel identically
        std::map<int, long long> cnt;
        for (const auto& m : p.k) cnt[block_index(m)] += 1;
        for (const auto& m : p.l) cnt[block_index(m)] -= 1;
        for (const auto& [n, c] : cnt)
            if (c != 0) ok = false;
        // the divisor equals the exact integer value 2|sum k^2 - sum l^2| for every seed
        long long di = 0;
        for (const auto& m : p.k) di += m.norm2();
        for (const auto& m : p.l) di -= m.norm2();
        const double exact = 2.0 * std::abs(static_cast<double>(di));
        for (const auto& om : oms)
            worst = std::max(worst, std::abs(small_divisor(p, om) - exact));
    });
    bool gamma_ok = true;
    for (const auto& V : pots)
        if (!(gamma_empirical(V, lat, 2) > 0.0)) gamma_ok = false;
    std::ostringstream os;
    os << checked << " non-removal pairs, exact block cancellation "
       << (ok ? "holds" : "VIOLATED") << ", max |divisor - integer oracle| = " << worst
       << ", gamma_emp > 0 for 10 seeds: " << (gamma_ok ? "yes" : "no");
    detail = os.str();
    return ok && checked > 0 && worst <= 1e-11 && gamma_ok;
}

// ---------------------------------------------------------------- criterion 10

bool crit_simulator(std::string& detail) {
    TruncatedLattice lat(1, 8);
    const FrequencyTable omega = frequencies(sample_potential(8, lat.n_max()), lat);
    std::ostringstream os;

    // order-2 convergence against a fine-step reference at t = 1
    const FourierState u0 = random_state_hs(lat, 31, 1.0, 0.5);
    auto run = [&](double dt) {
        SimConfig cfg;
        cfg.dt = dt;
        SplitStepSim sim(lat, omega, cfg);
        FourierState u = u0;
        sim.advance(u, static_cast<long long>(std::llround(1.0 / dt)));
        return u;
    };
    const FourierState ref = run(1e-4);
    std::vector<double> dts = {1e-2, 5e-3, 2.5e-3}, errs;
    for (double dt : dts) {
        const FourierState u = run(dt);
        double e2 = 0.0;
        for (std::size_t i = 0; i < lat.size(); ++i) e2 += std::norm(u.amps[i] - ref.amps[i]);
        errs.push_back(std::sqrt(e2));
    }
    const double slope = loglog_slope(dts, errs);
    os << "convergence slope " << slope << "; ";
    bool ok = std::abs(slope - 2.0) <= 0.2;

    // mass conservation per unit time at small data
    {
        SimConfig cfg;
        cfg.dt = 1e-3;
        SplitStepSim sim(lat, omega, cfg);
        FourierState u = random_state_hs(lat, 32, 1.0, 0.05);
        const double m0 = mass(u);
        sim.advance(u, 1000);
        const double drift = std::abs(mass(u) - m0) / m0;
        os << "mass drift/unit time " << drift << "; ";
        if (drift > 1e-10) ok = false;
    }

    // spectral vs quadrature Hamiltonian
    {
        SimConfig cfg;
        SplitStepSim sim(lat, omega, cfg);
        const HomPoly P = nls_nonlinearity(lat, 1, cfg.sigma);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const FourierState u = random_state(lat, 60 + static_cast<std::uint64_t>(t), 0.3);
            double z2 = 0.0;
            for (std::size_t i = 0; i < lat.size(); ++i) z2 += omega.omega[i] * std::norm(u.amps[i]);
            const double spec = z2 + evaluate(P, u);
            worst = std::max(worst, std::abs(sim.hamiltonian(u) - spec) / (1.0 + std::abs(spec)));
        }
        os << "Hamiltonian route disagreement " << worst;
        if (worst > 1e-8) ok = false;
    }
    detail = os.str();
    return ok;
}

// ---------------------------------------------------------------- criterion 11

struct DriftReport {
    double max_j_drift = 0.0;
    double mass_drift = 0.0;
    bool equivalence_ok = true;
    bool aborted = false;
};

DriftReport drift_run(std::uint64_t seed) {
    const double eps = 0.05;
    TruncatedLattice lat(1, 128);
    const FrequencyTable omega = frequencies(sample_potential(seed, lat.n_max()), lat);
    SimConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 1.0 / (eps * eps);
    cfg.record_every = 100;
    SplitStepSim sim(lat, omega, cfg);
    const FourierState u0 = random_state_hs(lat, 1000 + seed, 1.0, eps);
    const TrajectoryRecord rec = sim.simulate(u0);
    DriftReport rep;
    rep.aborted = rec.aborted;
    if (rec.aborted) return rep;
    const std::vector<double>& j0 = rec.J.front();
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        for (std::size_t n = 0; n < j0.size(); ++n)
            if (j0[n] > 0.0)
                rep.max_j_drift =
                    std::max(rep.max_j_drift, std::abs(rec.J[i][n] - j0[n]) / j0[n]);
        rep.mass_drift =
            std::max(rep.mass_drift, std::abs(rec.mass[i] - rec.mass.front()) / rec.mass.front());
        // blockwise-weighted observable is equivalent to the squared H^s norm
        const double h2 = rec.hs[i] * rec.hs[i];
        if (!(rec.ns[i] <= h2 * (1 + 1e-12) && h2 <= 8.0 * rec.ns[i] * (1 + 1e-12)))
            rep.equivalence_ok = false;
    }
    return rep;
}

bool crit_drift_experiment(std::string& detail) {
    double max_j = 0.0, max_mass = 0.0;
    bool equiv = true, ok = true;
    DriftReport first;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const DriftReport rep = drift_run(seed);
        if (rep.aborted) ok = false;
        if (seed == 1) first = rep;
        max_j = std::max(max_j, rep.max_j_drift);
        max_mass = std::max(max_mass, rep.mass_drift);
        equiv = equiv && rep.equivalence_ok;
    }
    // bitwise reproducibility of the report
    const DriftReport redo = drift_run(1);
    const bool bitwise = std::memcmp(&redo.max_j_drift, &first.max_j_drift, sizeof(double)) == 0 &&
                         std::memcmp(&redo.mass_drift, &first.mass_drift, sizeof(double)) == 0;
    std::ostringstream os;
    os << "max_n rel J drift " << max_j << ", max mass drift " << max_mass
       << ", equivalence at every sample: " << (equiv ? "yes" : "no")
       << ", bitwise reproducible: " << (bitwise ? "yes" : "no");
    detail = os.str();
    return ok && bitwise && max_mass <= 1e-8 && equiv;
}

// ---------------------------------------------------------------- criterion 12

bool crit_planner(std::string& detail) {
    // hand-derived oracle at eps = 1e-12, s0 = 1, d = 1:
    //   L  = |log eps| = 12 log 10 = 27.631021115928548
    //   LL = log L     = 3.3189390950359561
    //   window = [L/(4 LL), L/(3 LL)] = [2.0813142637398416, 2.7750856849864554]
    //   eta = min(1, (1 - 1/2)/2) = 0.25
    //   T  = exp(L^2/(4 LL)) = 9.4573870866045666e+24
    const double o_rl = 2.0813142637398416;
    const double o_ru = 2.7750856849864554;
    const double o_eta = 0.25;
    const double o_T = 9.4573870866045666e+24;
    const ParameterPlan plan = plan_parameters(1e-12, 1.0, 1, 1, 1.0);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double worst = std::max(std::max(rel(plan.r_lower, o_rl), rel(plan.r_upper, o_ru)),
                                  std::max(rel(plan.eta, o_eta), rel(plan.T_eps, o_T)));
    const ParameterPlan coarse = plan_parameters(1e-3, 1.0, 1, 1, 1.0);
    std::ostringstream os;
    os << "worst rel err vs hand oracle " << worst << "; window contains integer at 1e-12: "
       << (plan.feasible ? "yes" : "no") << "; infeasible at eps=1e-3: "
       << (coarse.feasible ? "NO" : "yes");
    detail = os.str();
    return worst <= 1e-12 && !coarse.feasible;
}

} // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "bracket oracle equivalence", [](std::string& d) { return crit_bracket_oracle(d, false); }},
        {2, "bracket size bound", [](std::string& d) { return crit_bracket_oracle(d, true); }},
        {3, "gradient vs finite differences", crit_gradient_fd},
        {4, "flow suite", crit_flow_suite},
        {5, "cohomological identity", crit_cohomological},
        {6, "normal form residual order", crit_residual_order},
        {7, "resonance certificate", crit_resonance_certificate},
        {8, "measure estimate linearity", crit_measure_estimate},
        {9, "small-divisor cancellation", crit_v_independence},
        {10, "simulator convergence and conservation", crit_simulator},
        {11, "super-action drift experiment", crit_drift_experiment},
        {12, "planner arithmetic", crit_planner},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    bool all_ok = true;
    for (const auto& c : criteria) {
        if (!wanted.empty() && wanted.count(c.id) == 0) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d [%s] %s — %s (%.1fs)\n", c.id, ok ? "PASS" : "FAIL", c.name,
                    detail.c_str(), secs);
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
