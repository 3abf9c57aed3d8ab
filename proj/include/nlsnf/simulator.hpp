#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "lattice.hpp"
#include "polyalg.hpp"
#include "potential.hpp"

namespace nlsnf {

struct SimConfig {
    int p = 1;
    double sigma = 1.0;
    double dt = 1e-3;
    double t_final = 1.0;
    int record_every = 10;
    bool nonlinear = true; // test mode: disable the nonlinear substep entirely
    double s_observable = 1.0;
    long long nns_N = 0;   // 0 disables the truncated-norm observable
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> hamiltonian;
    std::vector<double> hs;              // H^s norm at s = s_observable
    std::vector<double> ns;              // N_s observable
    std::vector<double> nns;             // N_{N,s} observable (when enabled)
    std::vector<std::vector<double>> J;  // super-actions per sample
    bool aborted = false;
};

/// Smallest integer >= n whose prime factors are all in {2, 3, 5}.
inline int next_5smooth(int n) {
    for (int m = n;; ++m) {
        int v = m;
        for (int f : {2, 3, 5})
            while (v % f == 0) v /= f;
        if (v == 1) return m;
    }
}

/// Strang split-step integrator for the Galerkin-truncated equation
/// i du/dt = -Laplace u + V*u + sigma |u|^{2p} u on the box [-K,K]^d.
/// The physical grid is zero-padded to M >= (2p+2)K + 1 points per axis so
/// that the quadrature Hamiltonian is exact for the truncated system and the
/// leading order of the nonlinear substep is alias-free on the box.
class SplitStepSim {
  public:
    SplitStepSim(const TruncatedLattice& lat, const FrequencyTable& omega, const SimConfig& cfg)
        : lat_(lat), omega_(omega), cfg_(cfg) {
        if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (omega.lattice.size() != lat.size()) throw std::invalid_argument("frequency table mismatch");
        const int K = lat.k_max();
        M_ = next_5smooth((2 * cfg.p + 2) * K + 1);
        grid_size_ = 1;
        for (int i = 0; i < lat.dim(); ++i) grid_size_ *= static_cast<std::size_t>(M_);
        grid_.resize(grid_size_);
        std::vector<int> dims(static_cast<std::size_t>(lat.dim()), M_);
        auto* data = reinterpret_cast<fftw_complex*>(grid_.data());
        plan_bwd_ = fftw_plan_dft(lat.dim(), dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
        plan_fwd_ = fftw_plan_dft(lat.dim(), dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);

        // linear index on the padded grid for every box mode (wrap-around layout)
        grid_index_.resize(lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i) {
            const ModeIndex k = lat.mode_at(i);
            std::size_t idx = 0;
            for (int ax = lat.dim() - 1; ax >= 0; --ax) {
                const int c = (k.c[ax] % M_ + M_) % M_;
                idx = idx * static_cast<std::size_t>(M_) + static_cast<std::size_t>(c);
            }
            grid_index_[i] = idx;
        }
        half_phase_.resize(lat.size());
        for (std::size_t i = 0; i < lat.size(); ++i)
            half_phase_[i] = std::polar(1.0, -0.5 * cfg.dt * omega.omega[i]);
    }

    ~SplitStepSim() {
        fftw_destroy_plan(plan_bwd_);
        fftw_destroy_plan(plan_fwd_);
    }
    SplitStepSim(const SplitStepSim&) = delete;
    SplitStepSim& operator=(const SplitStepSim&) = delete;

    int grid_points() const { return M_; }

    /// One Strang step: half linear phase, pointwise nonlinear phase in
    /// physical space, half linear phase; projection back to the box.
    void step(FourierState& u) {
        for (std::size_t i = 0; i < u.amps.size(); ++i) u.amps[i] *= half_phase_[i];
        if (cfg_.nonlinear) {
            to_grid(u.amps);
            fftw_execute(plan_bwd_);
            const double norm = std::pow(two_pi, -0.5 * lat_.dim());
            const double sdt = cfg_.sigma * cfg_.dt;
            for (auto& a : grid_) {
                a *= norm;
                const double a2 = std::norm(a);
                double phase = a2;
                for (int j = 1; j < cfg_.p; ++j) phase *= a2;
                a *= std::polar(1.0, -sdt * phase);
            }
            fftw_execute(plan_fwd_);
            const double inv = std::pow(two_pi, 0.5 * lat_.dim()) / static_cast<double>(grid_size_);
            for (std::size_t i = 0; i < u.amps.size(); ++i) u.amps[i] = grid_[grid_index_[i]] * inv;
        }
        for (std::size_t i = 0; i < u.amps.size(); ++i) u.amps[i] *= half_phase_[i];
    }

    /// H = Z_2 (spectral) + P (physical-space quadrature, exact for the
    /// truncated system on the padded grid).
    double hamiltonian(const FourierState& u) {
        double z2 = 0.0;
        for (std::size_t i = 0; i < u.amps.size(); ++i) z2 += omega_.omega[i] * std::norm(u.amps[i]);
        return z2 + nonlinear_energy(u);
    }

    double nonlinear_energy(const FourierState& u) {
        to_grid(u.amps);
        fftw_execute(plan_bwd_);
        const double norm = std::pow(two_pi, -0.5 * lat_.dim());
        double acc = 0.0;
        for (const auto& a0 : grid_) {
            const double a2 = std::norm(a0 * norm);
            double pw = a2;
            for (int j = 0; j < cfg_.p; ++j) pw *= a2;
            acc += pw;
        }
        const double vol = std::pow(two_pi, lat_.dim());
        return cfg_.sigma / (cfg_.p + 1.0) * vol * acc / static_cast<double>(grid_size_);
    }

    TrajectoryRecord simulate(FourierState u) {
        TrajectoryRecord rec;
        const long long steps =
            (cfg_.t_final <= 0.0)
                ? 0
                : static_cast<long long>(std::llround(std::ceil(cfg_.t_final / cfg_.dt - 1e-12)));
        record(rec, 0.0, u);
        for (long long s = 1; s <= steps; ++s) {
            step(u);
            if (!u.finite()) {
                rec.aborted = true;
                return rec;
            }
            if (s % cfg_.record_every == 0 || s == steps)
                record(rec, static_cast<double>(s) * cfg_.dt, u);
        }
        return rec;
    }

    /// Advances an existing state by a given number of steps (for resuming
    /// from snapshots); returns false on blow-up.
    bool advance(FourierState& u, long long steps) {
        for (long long s = 0; s < steps; ++s) {
            step(u);
            if (!u.finite()) return false;
        }
        return true;
    }

  private:
    void to_grid(const std::vector<std::complex<double>>& amps) {
        std::fill(grid_.begin(), grid_.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < amps.size(); ++i) grid_[grid_index_[i]] = amps[i];
    }

    void record(TrajectoryRecord& rec, double t, const FourierState& u) {
        rec.times.push_back(t);
        rec.mass.push_back(mass(u));
        rec.hamiltonian.push_back(hamiltonian(u));
        rec.hs.push_back(hs_norm(u, cfg_.s_observable));
        rec.ns.push_back(ns_observable(u, cfg_.s_observable));
        if (cfg_.nns_N > 0) rec.nns.push_back(nns_observable(u, cfg_.s_observable, cfg_.nns_N));
        rec.J.push_back(super_actions(u));
    }

    TruncatedLattice lat_;
    FrequencyTable omega_;
    SimConfig cfg_;
    int M_ = 0;
    std::size_t grid_size_ = 0;
    std::vector<std::complex<double>> grid_;
    std::vector<std::size_t> grid_index_;
    std::vector<std::complex<double>> half_phase_;
    fftw_plan plan_bwd_{};
    fftw_plan plan_fwd_{};
};

} // namespace nlsnf
