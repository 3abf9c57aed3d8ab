// Experiment runner: samples potentials, scans small divisors, computes normal
// forms, runs split-step trajectories and executes the property suite.
//
// All commands read a single structured JSON config (unknown keys rejected);
// every output embeds the artifact version and the hash of the config bytes.
// Exit codes: 0 success, 1 validation failure, 2 runtime failure, 3 property
// suite failure. NLSNF_THREADS bounds ensemble parallelism.

#include <nlsnf/nlsnf.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nlsnf;

namespace {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

struct Context {
    json cfg;
    std::string raw;
    std::uint64_t hash = 0;
    std::uint64_t seed = 0;
    fs::path out_dir;
};

Context load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    Context ctx;
    ctx.raw = ss.str();
    ctx.hash = config_hash(ctx.raw);
    try {
        ctx.cfg = json::parse(ctx.raw);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(ctx.cfg,
               {"seed", "output_dir", "sample_potential", "smalldiv_scan", "normal_form",
                "simulate", "verify"},
               "config");
    ctx.seed = ctx.cfg.value("seed", std::uint64_t{0});
    ctx.out_dir = ctx.cfg.value("output_dir", std::string{"."});
    if (!fs::is_directory(ctx.out_dir))
        throw ValidationError("output directory does not exist: " + ctx.out_dir.string());
    return ctx;
}

const json& section(const Context& ctx, const char* name) {
    if (!ctx.cfg.contains(name))
        throw ValidationError(std::string("config lacks the '") + name + "' section");
    return ctx.cfg.at(name);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json stamped(const Context& ctx, json body) {
    body["artifact_version"] = artifact_version;
    body["config_hash"] = ctx.hash;
    return body;
}

int thread_budget() {
    if (const char* env = std::getenv("NLSNF_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// ------------------------------------------------------------------- commands

void cmd_sample_potential(const Context& ctx) {
    const json& s = section(ctx, "sample_potential");
    check_keys(s, {"n_max"}, "sample_potential");
    const int n_max = s.at("n_max").get<int>();
    const BlockPotential V = sample_potential(ctx.seed, n_max);
    const json out = stamped(ctx, potential_to_json(V));
    write_text(ctx.out_dir / "potential.json", out.dump(2) + "\n");
    std::cout << "wrote " << (ctx.out_dir / "potential.json").string() << "\n";
}

void cmd_smalldiv_scan(const Context& ctx) {
    const json& s = section(ctx, "smalldiv_scan");
    check_keys(s, {"d", "k_max", "q_max"}, "smalldiv_scan");
    const int d = s.at("d").get<int>();
    const int k_max = s.at("k_max").get<int>();
    const int q_max = s.at("q_max").get<int>();
    const TruncatedLattice lat(d, k_max);
    const BlockPotential V = sample_potential(ctx.seed, lat.n_max());
    const FrequencyTable omega = frequencies(V, lat);
    for (int q = 2; q <= q_max; ++q) {
        const auto records = scan_small_divisors(lat, q, omega);
        std::ostringstream os;
        scan_to_csv(records, ctx.hash, os);
        const fs::path path = ctx.out_dir / ("scan_q" + std::to_string(q) + ".csv");
        write_text(path, os.str());
        std::cout << "wrote " << path.string() << " (" << records.size() << " pairs)\n";
    }
    const double gamma = gamma_empirical(V, lat, q_max);
    json gj = stamped(ctx, json{{"q_max", q_max}, {"d", d}, {"k_max", k_max}});
    if (std::isinf(gamma))
        gj["gamma_emp"] = "inf"; // sentinel: no removal pair exists in the box
    else
        gj["gamma_emp"] = gamma;
    write_text(ctx.out_dir / "gamma.json", gj.dump(2) + "\n");
    std::cout << "wrote " << (ctx.out_dir / "gamma.json").string() << "\n";
}

void cmd_normal_form(const Context& ctx) {
    const json& s = section(ctx, "normal_form");
    check_keys(s, {"d", "k_max", "p", "sigma", "r", "nu"}, "normal_form");
    const int d = s.at("d").get<int>();
    const int k_max = s.at("k_max").get<int>();
    const int p = s.at("p").get<int>();
    const double sigma = s.at("sigma").get<double>();
    const int r = s.at("r").get<int>();
    const double nu = s.at("nu").get<double>();
    const TruncatedLattice lat(d, k_max);
    const BlockPotential V = sample_potential(ctx.seed, lat.n_max());
    const FrequencyTable omega = frequencies(V, lat);
    const HomPoly P = nls_nonlinearity(lat, p, sigma);
    const NormalFormResult nf = normal_form(z2_from_frequencies(omega), omega, P, r, nu);
    const json out = stamped(ctx, normal_form_to_json(nf, omega));
    write_text(ctx.out_dir / "normal_form.json", out.dump(2) + "\n");
    std::cout << "wrote " << (ctx.out_dir / "normal_form.json").string()
              << " (margin " << resonance_margin(nf, omega) << ")\n";
}

void cmd_simulate(const Context& ctx) {
    const json& s = section(ctx, "simulate");
    check_keys(s,
               {"d", "k_max", "p", "sigma", "dt", "t_final", "record_every", "s_observable",
                "nns_N", "amplitude", "data_seed", "seeds", "write_snapshot", "resume_from"},
               "simulate");
    const int d = s.at("d").get<int>();
    const int k_max = s.at("k_max").get<int>();
    SimConfig cfg;
    cfg.p = s.value("p", 1);
    cfg.sigma = s.value("sigma", 1.0);
    cfg.dt = s.at("dt").get<double>();
    cfg.t_final = s.at("t_final").get<double>();
    cfg.record_every = s.value("record_every", 10);
    cfg.s_observable = s.value("s_observable", 1.0);
    cfg.nns_N = s.value("nns_N", 0ll);
    const double amplitude = s.value("amplitude", 0.05);
    const std::uint64_t data_seed = s.value("data_seed", ctx.seed + 1);
    std::vector<std::uint64_t> seeds = {ctx.seed};
    if (s.contains("seeds")) seeds = s.at("seeds").get<std::vector<std::uint64_t>>();
    if (seeds.empty()) throw ValidationError("simulate.seeds must not be empty");
    const bool snap = s.value("write_snapshot", false);
    const std::string resume = s.value("resume_from", std::string{});

    const TruncatedLattice lat(d, k_max);
    auto run_one = [&](std::uint64_t seed) {
        const FrequencyTable omega = frequencies(sample_potential(seed, lat.n_max()), lat);
        SplitStepSim sim(lat, omega, cfg);
        FourierState u(lat);
        long long done_steps = 0;
        if (!resume.empty()) {
            std::ifstream in(resume, std::ios::binary);
            if (!in) throw ValidationError("cannot open snapshot: " + resume);
            const Snapshot sn = read_snapshot(in);
            if (static_cast<int>(sn.d) != d || static_cast<int>(sn.k_max) != k_max ||
                sn.dt != cfg.dt)
                throw ValidationError("snapshot does not match the simulate configuration");
            u.amps = sn.amps;
            done_steps = static_cast<long long>(sn.step);
        } else {
            // random data with prescribed H^s size, profile <k>^{-2}
            for (std::size_t i = 0; i < lat.size(); ++i) {
                const double w = std::pow(lat.mode_at(i).bracket(), -2.0);
                u.amps[i] = w * std::complex<double>(rng_normal(data_seed ^ seed, 2 * i),
                                                     rng_normal(data_seed ^ seed, 2 * i + 1));
            }
            const double n = hs_norm(u, cfg.s_observable);
            for (auto& a : u.amps) a *= amplitude / n;
        }
        SimConfig local = cfg;
        local.t_final = cfg.t_final - static_cast<double>(done_steps) * cfg.dt;
        SplitStepSim engine(lat, omega, local);
        const TrajectoryRecord rec = engine.simulate(u);
        std::ostringstream os;
        trajectory_to_csv(rec, ctx.hash, os);
        const fs::path path = ctx.out_dir / ("trajectory_" + std::to_string(seed) + ".csv");
        write_text(path, os.str());
        if (rec.aborted) throw std::runtime_error("trajectory blew up (seed " +
                                                  std::to_string(seed) + "); partial record kept");
        if (snap) {
            Snapshot sn;
            sn.d = static_cast<std::uint32_t>(d);
            sn.k_max = static_cast<std::uint32_t>(k_max);
            sn.dt = cfg.dt;
            const long long total =
                static_cast<long long>(std::llround(std::ceil(cfg.t_final / cfg.dt - 1e-12)));
            sn.step = static_cast<std::uint64_t>(total);
            // re-run deterministically from the recorded start to the end state
            SplitStepSim fin(lat, omega, cfg);
            FourierState w = u;
            fin.advance(w, total - done_steps);
            sn.amps = w.amps;
            std::ofstream out(ctx.out_dir / ("snapshot_" + std::to_string(seed) + ".bin"),
                              std::ios::binary);
            write_snapshot(sn, out);
        }
    };

    const int threads = std::min<int>(thread_budget(), static_cast<int>(seeds.size()));
    if (threads <= 1 || seeds.size() == 1) {
        for (std::uint64_t seed : seeds) run_one(seed);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::string first_error;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
                    try {
                        run_one(seeds[i]);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        if (first_error.empty()) first_error = e.what();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (!first_error.empty()) throw std::runtime_error(first_error);
    }
    std::cout << "wrote " << seeds.size() << " trajectory file(s) in " << ctx.out_dir.string()
              << "\n";
}

// -------------------------------------------------------------- property suite

bool verify_suite(const std::string& mutate, std::ostream& log) {
    const double flip = (mutate == "bracket-sign") ? -1.0 : 1.0;
    bool ok = true;
    TruncatedLattice lat(1, 2);
    RngStream rng(424242);

    // bracket vs gradient pairing
    {
        double worst = 0.0;
        for (int t = 0; t < 5; ++t) {
            const HomPoly P = [&] {
                HomPoly::CoeffMap m;
                for_each_zero_momentum_pair(lat, 2, [&](const IndexPair& p) {
                    std::complex<double> c(rng.uniform() - 0.5,
                                           self_conjugate(p) ? 0.0 : rng.uniform() - 0.5);
                    m.emplace(p, c);
                });
                return HomPoly::from_canonical(2, std::move(m));
            }();
            const HomPoly Q = [&] {
                HomPoly::CoeffMap m;
                for_each_zero_momentum_pair(lat, 3, [&](const IndexPair& p) {
                    std::complex<double> c(rng.uniform() - 0.5,
                                           self_conjugate(p) ? 0.0 : rng.uniform() - 0.5);
                    m.emplace(p, c);
                });
                return HomPoly::from_canonical(3, std::move(m));
            }();
            const HomPoly S = scaled(poisson_bracket(P, Q), flip);
            for (int j = 0; j < 10; ++j) {
                FourierState u(lat);
                for (auto& a : u.amps)
                    a = 0.5 * std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
                const FourierState gp = gradient(P, u), gq = gradient(Q, u);
                double oracle = 0.0;
                for (std::size_t i = 0; i < lat.size(); ++i)
                    oracle +=
                        (std::complex<double>(0, 1) * gp.amps[i] * std::conj(gq.amps[i])).real();
                worst =
                    std::max(worst, std::abs(evaluate(S, u) - oracle) / (1.0 + std::abs(oracle)));
            }
        }
        log << "bracket-oracle worst rel err " << worst << "\n";
        ok = ok && worst <= 1e-10;
    }

    // flow reversibility and generator conservation
    {
        HomPoly::CoeffMap m;
        for_each_zero_momentum_pair(lat, 2, [&](const IndexPair& p) {
            m.emplace(p, std::complex<double>(rng.uniform() - 0.5,
                                              self_conjugate(p) ? 0.0 : rng.uniform() - 0.5));
        });
        const HomPoly chi = HomPoly::from_canonical(2, std::move(m));
        FourierState u(lat);
        for (auto& a : u.amps)
            a = std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
        const double target = 0.4 * epsilon_chi(chi), n = l1_norm(u);
        for (auto& a : u.amps) a *= target / n;
        FlowConfig cfg;
        const FourierState v = flow(chi, u, cfg);
        cfg.t_final = -1.0;
        const FourierState w = flow(chi, v, cfg);
        double rt = 0.0;
        for (std::size_t i = 0; i < lat.size(); ++i) rt += std::abs(w.amps[i] - u.amps[i]);
        const double drift = std::abs(evaluate(chi, v) - evaluate(chi, u));
        log << "flow roundtrip " << rt << ", generator drift " << drift << "\n";
        ok = ok && rt <= 1e-9 && drift <= 1e-10;
    }

    // cohomological identity
    {
        const FrequencyTable omega = frequencies(sample_potential(9, lat.n_max()), lat);
        const DiagonalQuadratic Z2 = z2_from_frequencies(omega);
        HomPoly::CoeffMap m;
        for_each_zero_momentum_pair(lat, 2, [&](const IndexPair& p) {
            m.emplace(p, std::complex<double>(rng.uniform() - 0.5,
                                              self_conjugate(p) ? 0.0 : rng.uniform() - 0.5));
        });
        const HomPoly L = HomPoly::from_canonical(2, std::move(m));
        const auto [chi, lres] = cohomological_solve(L, omega, 0.05);
        const HomPoly lhs = add(bracket_with_diagonal(chi, Z2), L);
        double worst = 0.0;
        for (const auto& [key, c] : lhs.coeffs()) {
            auto it = lres.coeffs().find(key);
            const std::complex<double> r = it == lres.coeffs().end() ? 0.0 : it->second;
            worst = std::max(worst, std::abs(c - r));
        }
        log << "cohomological identity worst " << worst << "\n";
        ok = ok && worst <= 1e-12;
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Galerkin-truncated Hamiltonian toolkit"};
    app.require_subcommand(1);
    std::string config_path, mutate;

    auto add_cmd = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON config file")->required();
        return sub;
    };
    CLI::App* c_pot = add_cmd("sample-potential", "sample a block-constant random potential");
    CLI::App* c_scan = add_cmd("smalldiv-scan", "exhaustive small-divisor scan and gamma report");
    CLI::App* c_nf = add_cmd("normal-form", "iterated resonant normal form of the truncated system");
    CLI::App* c_sim = add_cmd("simulate", "split-step trajectories with super-action observables");
    CLI::App* c_ver = app.add_subcommand("verify", "run the property suite");
    c_ver->add_option("--mutate", mutate, "inject a defect (test fixture): bracket-sign");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_ver->parsed()) {
            if (!mutate.empty() && mutate != "bracket-sign")
                throw ValidationError("unknown mutation: " + mutate);
            const bool ok = verify_suite(mutate, std::cout);
            std::cout << (ok ? "property suite: PASS\n" : "property suite: FAIL\n");
            return ok ? 0 : 3;
        }
        const Context ctx = load_config(config_path);
        if (c_pot->parsed()) cmd_sample_potential(ctx);
        if (c_scan->parsed()) cmd_smalldiv_scan(ctx);
        if (c_nf->parsed()) cmd_normal_form(ctx);
        if (c_sim->parsed()) cmd_simulate(ctx);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
