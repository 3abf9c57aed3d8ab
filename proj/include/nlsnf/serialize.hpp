#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "birkhoff.hpp"
#include "lattice.hpp"
#include "polyalg.hpp"
#include "potential.hpp"
#include "resonance.hpp"
#include "simulator.hpp"

namespace nlsnf {

inline constexpr const char* artifact_version = "1.0.0";

/// FNV-1a hash of a canonical string; embedded in every output file so runs
/// can be traced back to their configuration.
inline std::uint64_t config_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// JSON dumps

inline nlohmann::json potential_to_json(const BlockPotential& V) {
    return nlohmann::json{
        {"seed", V.seed}, {"n_max", V.n_max()}, {"block_values", V.block_values}};
}

inline BlockPotential potential_from_json(const nlohmann::json& j) {
    BlockPotential V;
    V.seed = j.at("seed").get<std::uint64_t>();
    V.block_values = j.at("block_values").get<std::vector<double>>();
    if (static_cast<int>(V.block_values.size()) != j.at("n_max").get<int>() + 1)
        throw std::invalid_argument("inconsistent potential record");
    return V;
}

inline nlohmann::json mode_to_json(const ModeIndex& k) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < k.dim; ++i) a.push_back(k.c[i]);
    return a;
}

/// One orbit per line: {"q":..,"k":[[..],..],"l":[[..],..],"re":..,"im":..}.
inline void poly_to_jsonl(const HomPoly& P, std::ostream& os) {
    for (const auto& [key, c] : P.coeffs()) {
        nlohmann::json j;
        j["q"] = P.q();
        nlohmann::json ks = nlohmann::json::array(), ls = nlohmann::json::array();
        for (const auto& m : key.k) ks.push_back(mode_to_json(m));
        for (const auto& m : key.l) ls.push_back(mode_to_json(m));
        j["k"] = std::move(ks);
        j["l"] = std::move(ls);
        j["re"] = c.real();
        j["im"] = c.imag();
        os << j.dump() << "\n";
    }
}

inline nlohmann::json poly_to_json(const HomPoly& P) {
    nlohmann::json orbits = nlohmann::json::array();
    for (const auto& [key, c] : P.coeffs()) {
        nlohmann::json j;
        nlohmann::json ks = nlohmann::json::array(), ls = nlohmann::json::array();
        for (const auto& m : key.k) ks.push_back(mode_to_json(m));
        for (const auto& m : key.l) ls.push_back(mode_to_json(m));
        j["k"] = std::move(ks);
        j["l"] = std::move(ls);
        j["re"] = c.real();
        j["im"] = c.imag();
        orbits.push_back(std::move(j));
    }
    return nlohmann::json{{"q", P.q()}, {"orbits", std::move(orbits)}};
}

inline nlohmann::json plan_to_json(const ParameterPlan& plan) {
    return nlohmann::json{{"eps", plan.eps},
                          {"s0", plan.s0},
                          {"d", plan.d},
                          {"p", plan.p},
                          {"r_lower", plan.r_lower},
                          {"r_upper", plan.r_upper},
                          {"feasible", plan.feasible},
                          {"r", plan.r},
                          {"eta", plan.eta},
                          {"n_exponent", plan.n_exponent},
                          {"N", plan.N},
                          {"n_widened", plan.n_widened},
                          {"gamma_tilde", plan.gamma_tilde},
                          {"nu", plan.nu},
                          {"C", plan.C},
                          {"rho", plan.rho},
                          {"T_eps", plan.T_eps},
                          {"warnings", plan.warnings}};
}

inline nlohmann::json normal_form_to_json(const NormalFormResult& nf, const FrequencyTable& omega) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& chi : nf.generators) gens.push_back(poly_to_json(chi));
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& [q, L] : nf.resonant_parts) parts.push_back(poly_to_json(L));
    return nlohmann::json{
        {"r", nf.r},
        {"nu", nf.nu},
        {"generators", std::move(gens)},
        {"resonant_parts", std::move(parts)},
        {"discard_ledger",
         {{"dropped", nf.ledger.dropped}, {"max_estimate", nf.ledger.max_estimate}}},
        {"certificates", {{"resonance_margin", resonance_margin(nf, omega)}}}};
}

// ---------------------------------------------------------------------------
// CSV reports

inline void scan_to_csv(const std::vector<SmallDivisorRecord>& records, std::uint64_t cfg_hash,
                        std::ostream& os) {
    os << "# artifact_version=" << artifact_version << " config_hash=" << cfg_hash << "\n";
    os << "q,k,l,removal,omega_abs,gamma_contribution\n";
    for (const auto& rec : records) {
        auto list = [](const std::vector<ModeIndex>& ms) {
            std::ostringstream s;
            for (std::size_t i = 0; i < ms.size(); ++i) {
                if (i) s << ';';
                for (int j = 0; j < ms[i].dim; ++j) {
                    if (j) s << ' ';
                    s << ms[i].c[j];
                }
            }
            return s.str();
        };
        os << rec.pair.q() << ',' << list(rec.pair.k) << ',' << list(rec.pair.l) << ','
           << (rec.removal ? 1 : 0) << ',' << format_double(rec.omega_abs) << ','
           << format_double(rec.gamma_contribution) << "\n";
    }
}

inline void trajectory_to_csv(const TrajectoryRecord& rec, std::uint64_t cfg_hash, std::ostream& os) {
    os << "# artifact_version=" << artifact_version << " config_hash=" << cfg_hash << "\n";
    std::size_t n_blocks = rec.J.empty() ? 0 : rec.J.front().size();
    os << "t,mass,H,hs,ns";
    if (!rec.nns.empty()) os << ",nns";
    for (std::size_t n = 0; n < n_blocks; ++n) os << ",J" << n;
    os << "\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        os << format_double(rec.times[i]) << ',' << format_double(rec.mass[i]) << ','
           << format_double(rec.hamiltonian[i]) << ',' << format_double(rec.hs[i]) << ','
           << format_double(rec.ns[i]);
        if (!rec.nns.empty()) os << ',' << format_double(rec.nns[i]);
        for (std::size_t n = 0; n < n_blocks; ++n) os << ',' << format_double(rec.J[i][n]);
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// Binary snapshots (little-endian; header then complex pairs in mode order)

inline constexpr std::uint32_t snapshot_magic = 0x534C4E31u; // "1NLS"

struct Snapshot {
    std::uint32_t d = 1;
    std::uint32_t k_max = 1;
    std::uint64_t step = 0;
    double dt = 0.0;
    std::vector<std::complex<double>> amps;
};

inline void write_snapshot(const Snapshot& snap, std::ostream& os) {
    auto put = [&os](const void* p, std::size_t n) { os.write(static_cast<const char*>(p), n); };
    const std::uint32_t version = 1;
    put(&snapshot_magic, 4);
    put(&version, 4);
    put(&snap.d, 4);
    put(&snap.k_max, 4);
    put(&snap.step, 8);
    put(&snap.dt, 8);
    put(snap.amps.data(), snap.amps.size() * sizeof(std::complex<double>));
}

inline Snapshot read_snapshot(std::istream& is) {
    auto get = [&is](void* p, std::size_t n) {
        is.read(static_cast<char*>(p), n);
        if (!is) throw std::runtime_error("truncated snapshot");
    };
    std::uint32_t magic = 0, version = 0;
    Snapshot snap;
    get(&magic, 4);
    if (magic != snapshot_magic) throw std::runtime_error("not a snapshot file");
    get(&version, 4);
    if (version != 1) throw std::runtime_error("unsupported snapshot version");
    get(&snap.d, 4);
    get(&snap.k_max, 4);
    get(&snap.step, 8);
    get(&snap.dt, 8);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < snap.d; ++i) count *= 2 * snap.k_max + 1;
    snap.amps.resize(count);
    get(snap.amps.data(), count * sizeof(std::complex<double>));
    return snap;
}

} // namespace nlsnf
