#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hankelrec/bench.hpp"
#include "hankelrec/io.hpp"
#include "hankelrec/nd_hankel.hpp"
#include "hankelrec/spectral_signal.hpp"

namespace fs = std::filesystem;
using namespace hankelrec;
using bench::ExperimentKind;
using bench::ExperimentSpec;

namespace {

// Flag values shared by the subcommands.  Only flags given on the command
// line override the config file.
struct Flags {
    std::vector<Index> n;
    std::vector<Index> rank;
    std::vector<Index> m;
    std::vector<double> p;
    std::vector<std::string> algo;
    std::string init;
    double tol_res = 0.0;
    double tol_step = 0.0;
    Index max_iters = 0;
    double min_sep = 0.0;
    std::vector<double> sigma_list;
    std::vector<double> damping;
    std::string sampling;
    Index trials = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = ".";
    std::string config;
    bool check = false;
    bool reproducible = false;
    Index r_max = 0;
    Index resample_rounds = 0;
    double mu = 0.0;
    std::vector<Index> dims;
    double fraction = 0.0;
    // gen / recover
    std::string signal;
    std::string samples;
    std::string result;
    std::string reconstruction;
};

struct Registered {
    std::vector<std::pair<std::string, CLI::Option*>> options;
    bool given(const std::string& name) const {
        for (const auto& [key, opt] : options) {
            if (key == name) {
                return opt->count() > 0;
            }
        }
        return false;
    }
};

void add_solver_flags(CLI::App* app, Flags& f, Registered& reg) {
    reg.options.emplace_back("algo", app->add_option("--algo", f.algo, "iht or fiht (comma list for timing)")
                                         ->delimiter(',')
                                         ->check(CLI::IsMember({"iht", "fiht"})));
    reg.options.emplace_back("init", app->add_option("--init", f.init, "Initialization")
                                         ->check(CLI::IsMember({"onestep", "resampled"})));
    reg.options.emplace_back("tol-res", app->add_option("--tol-res", f.tol_res, "Relative residual tolerance (0 off)"));
    reg.options.emplace_back("tol-step", app->add_option("--tol-step", f.tol_step, "Relative step tolerance (0 off)"));
    reg.options.emplace_back("max-iters", app->add_option("--max-iters", f.max_iters, "Iteration cap"));
    reg.options.emplace_back("resample-rounds",
                             app->add_option("--resample-rounds", f.resample_rounds, "Rounds of resampled init"));
    reg.options.emplace_back(
        "mu", app->add_option("--mu", f.mu, "Incoherence cap for trimming (default: estimated from the true signal)"));
    reg.options.emplace_back("seed", app->add_option("--seed", f.seed, "Base seed"));
    reg.options.emplace_back("check", app->add_flag("--check", f.check, "Cross-check fast operators against dense ones"));
}

void add_grid_flags(CLI::App* app, Flags& f, Registered& reg, bool nd) {
    if (!nd) {
        reg.options.emplace_back("n", app->add_option("--n", f.n, "Signal lengths")->delimiter(','));
        reg.options.emplace_back("m", app->add_option("--m", f.m, "Sample counts")->delimiter(','));
        reg.options.emplace_back("p", app->add_option("--p", f.p, "Sampling ratios")->delimiter(','));
        reg.options.emplace_back("sigma-list",
                                 app->add_option("--sigma-list", f.sigma_list, "Noise levels")->delimiter(','));
        reg.options.emplace_back("r-max", app->add_option("--r-max", f.r_max, "Upper bound of the rank scan"));
    } else {
        reg.options.emplace_back("dims", app->add_option("--dims", f.dims, "Array dimensions")->delimiter(','));
        reg.options.emplace_back("fraction", app->add_option("--fraction", f.fraction, "Sampling fraction"));
    }
    reg.options.emplace_back("rank", app->add_option("--rank", f.rank, "Ranks")->delimiter(','));
    reg.options.emplace_back("min-sep",
                             app->add_option("--min-sep", f.min_sep, "Minimum frequency separation in units of 1/n"));
    reg.options.emplace_back("damping",
                             app->add_option("--damping", f.damping, "Damping range lo,hi")->delimiter(',')->expected(2));
    reg.options.emplace_back("sampling", app->add_option("--sampling", f.sampling, "Sampling mode")
                                             ->check(CLI::IsMember({"without", "with", "without_replacement", "with_replacement"})));
    reg.options.emplace_back("trials", app->add_option("--trials", f.trials, "Trials per cell"));
    reg.options.emplace_back("threads", app->add_option("--threads", f.threads, "Worker threads (0: all cores)"));
    reg.options.emplace_back("out", app->add_option("--out", f.out, "Output directory"));
    reg.options.emplace_back("reproducible",
                             app->add_flag("--reproducible", f.reproducible, "Leave wall-time columns empty"));
    app->add_option("--config", f.config, "JSON experiment config; flags override it")->check(CLI::ExistingFile);
    add_solver_flags(app, f, reg);
}

void apply_solver_flags(SolverConfig& cfg, const Flags& f, const Registered& reg) {
    if (reg.given("init")) {
        cfg.init = init_kind_from_string(f.init);
    }
    if (reg.given("tol-res")) {
        cfg.tol_residual = f.tol_res;
    }
    if (reg.given("tol-step")) {
        cfg.tol_step = f.tol_step;
    }
    if (reg.given("max-iters")) {
        cfg.max_iters = f.max_iters;
    }
    if (reg.given("resample-rounds")) {
        cfg.resample_rounds = f.resample_rounds;
    }
    if (reg.given("mu")) {
        cfg.mu = f.mu;
    }
}

ExperimentSpec build_spec(ExperimentKind kind, const Flags& f, const Registered& reg) {
    ExperimentSpec spec = bench::default_spec(kind);
    if (!f.config.empty()) {
        spec = bench::spec_from_json(io::read_file(f.config), spec);
        spec.kind = kind;
    }
    if (reg.given("n")) {
        spec.n_values = f.n;
    }
    if (reg.given("m")) {
        spec.m_values = f.m;
        spec.p_values.clear();
    }
    if (reg.given("p")) {
        spec.p_values = f.p;
        spec.m_values.clear();
    }
    if (reg.given("rank")) {
        spec.r_values = f.rank;
    }
    if (reg.given("r-max")) {
        spec.r_max = f.r_max;
    }
    if (reg.given("sigma-list")) {
        spec.sigmas = f.sigma_list;
    }
    if (reg.given("min-sep")) {
        spec.min_separation_cells = f.min_sep;
    }
    if (reg.given("damping")) {
        spec.damping_range = {f.damping[0], f.damping[1]};
    }
    if (reg.given("sampling")) {
        spec.sampling = sampling_mode_from_string(f.sampling);
    }
    if (reg.given("trials")) {
        spec.trials = f.trials;
    }
    if (reg.given("threads")) {
        spec.threads = f.threads;
    }
    if (reg.given("out")) {
        spec.out_dir = f.out;
    }
    if (reg.given("reproducible")) {
        spec.reproducible = f.reproducible;
    }
    if (reg.given("check")) {
        spec.check = f.check;
    }
    if (reg.given("seed")) {
        spec.seed = f.seed;
    }
    if (reg.given("dims")) {
        spec.nd_dims = f.dims;
    }
    if (reg.given("fraction")) {
        spec.nd_fraction = f.fraction;
    }
    if (reg.given("algo")) {
        spec.algorithms.clear();
        for (const auto& a : f.algo) {
            spec.algorithms.push_back(algorithm_from_string(a));
        }
    }
    apply_solver_flags(spec.solver, f, reg);
    spec.finalize();
    return spec;
}

int run_experiment(ExperimentKind kind, const Flags& f, const Registered& reg) {
    const ExperimentSpec spec = build_spec(kind, f, reg);
    fs::create_directories(spec.out_dir);
    bench::Table table;
    switch (kind) {
    case ExperimentKind::phase:
        table = bench::run_phase(spec);
        break;
    case ExperimentKind::timing:
        table = bench::run_timing(spec);
        break;
    case ExperimentKind::noise:
        table = bench::run_noise(spec);
        break;
    case ExperimentKind::nd_demo:
        table = bench::run_nd_demo(spec);
        break;
    case ExperimentKind::recover:
        return 1;
    }
    std::string stem(bench::to_string(kind));
    for (auto& c : stem) {
        c = c == '-' ? '_' : c;
    }
    const fs::path summary = spec.out_dir / (stem + ".csv");
    const fs::path trials = spec.out_dir / (stem + "_trials.csv");
    bench::emit_plotdata(table, kind, summary, spec.reproducible);
    bench::emit_trials(table, trials, spec.reproducible);
    std::cout << bench::plotdata_csv(table, kind, spec.reproducible);
    std::cerr << "wrote " << summary.string() << " and " << trials.string() << "\n";
    return 0;
}

int run_gen(const Flags& f, const Registered& reg) {
    if (f.n.size() != 1 || f.rank.size() != 1) {
        throw ArgumentError("gen needs exactly one --n and one --rank");
    }
    const Index n = f.n.front();
    SignalGenConfig gen;
    gen.n = n;
    gen.r = f.rank.front();
    gen.min_separation = f.min_sep / static_cast<double>(n);
    if (reg.given("damping")) {
        gen.damping_range = {f.damping[0], f.damping[1]};
    }
    gen.seed = derive_seed(f.seed, 1);
    const SpectralSignal sig = generate_signal(gen);
    const fs::path out(f.out);
    fs::create_directories(out);
    io::write_signal(out / "signal.json", sig);
    std::cerr << "wrote " << (out / "signal.json").string() << "\n";
    if (reg.given("m") || reg.given("p")) {
        const Index m = reg.given("m") ? f.m.front() : std::llround(f.p.front() * static_cast<double>(n));
        const SamplingMode mode =
            f.sampling.empty() ? SamplingMode::without_replacement : sampling_mode_from_string(f.sampling);
        const SampleSet omega = sample_indices(n, m, mode, derive_seed(f.seed, 2));
        io::write_sample_set(out / "samples.json", omega);
        std::cerr << "wrote " << (out / "samples.json").string() << "\n";
    }
    return 0;
}

int run_recover(const Flags& f, const Registered& reg) {
    bench::RecoverRequest req;
    req.signal = f.signal;
    req.samples = f.samples;
    const fs::path out(f.out);
    fs::create_directories(out);
    req.result = f.result.empty() ? out / "result.json" : fs::path(f.result);
    if (!f.reconstruction.empty()) {
        req.reconstruction = fs::path(f.reconstruction);
    }
    req.algo = f.algo.empty() ? Algorithm::fiht : algorithm_from_string(f.algo.front());
    req.solver.r = f.rank.size() == 1 ? f.rank.front() : 0;
    req.solver.seed = f.seed;
    apply_solver_flags(req.solver, f, reg);
    req.check = f.check;
    std::string diagnostic;
    const auto status = bench::run_recover(req, diagnostic);
    if (!diagnostic.empty()) {
        std::cerr << "hankelrec recover: " << diagnostic << "\n";
    }
    if (status != bench::RecoverStatus::bad_input) {
        std::cerr << "wrote " << req.result.string() << "\n";
    }
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank Hankel completion of spectrally sparse signals"};
    app.require_subcommand(1);

    Flags f;
    Registered gen_reg, rec_reg, phase_reg, timing_reg, noise_reg, nd_reg;

    auto* gen = app.add_subcommand("gen", "Generate a random signal and optional sample set");
    gen_reg.options.emplace_back("n", gen->add_option("--n", f.n, "Signal length")->required());
    gen_reg.options.emplace_back("rank", gen->add_option("--rank", f.rank, "Number of modes")->required());
    gen_reg.options.emplace_back("m", gen->add_option("--m", f.m, "Sample count"));
    gen_reg.options.emplace_back("p", gen->add_option("--p", f.p, "Sampling ratio"));
    gen_reg.options.emplace_back("min-sep", gen->add_option("--min-sep", f.min_sep, "Separation in units of 1/n"));
    gen_reg.options.emplace_back("damping", gen->add_option("--damping", f.damping, "Damping range lo,hi")
                                                ->delimiter(',')
                                                ->expected(2));
    gen_reg.options.emplace_back("sampling", gen->add_option("--sampling", f.sampling, "Sampling mode"));
    gen_reg.options.emplace_back("seed", gen->add_option("--seed", f.seed, "Seed"));
    gen->add_option("--out", f.out, "Output directory (signal.json, samples.json)");

    auto* rec = app.add_subcommand("recover", "Reconstruct a signal from a sample set");
    rec->add_option("--signal", f.signal, "Signal JSON")->required();
    rec->add_option("--samples", f.samples, "Sample set JSON")->required();
    rec_reg.options.emplace_back("rank", rec->add_option("--rank", f.rank, "Target rank")->required());
    rec->add_option("--out", f.out, "Output directory for result.json");
    rec->add_option("--result", f.result, "Result JSON path (overrides --out)");
    rec->add_option("--reconstruction", f.reconstruction, "Also write the reconstructed signal here");
    add_solver_flags(rec, f, rec_reg);

    auto* phase = app.add_subcommand("phase", "Phase-transition grid over sampling ratio and rank");
    add_grid_flags(phase, f, phase_reg, false);
    auto* timing = app.add_subcommand("timing", "IHT versus FIHT timing table");
    add_grid_flags(timing, f, timing_reg, false);
    auto* noise = app.add_subcommand("noise", "Reconstruction error versus noise level");
    add_grid_flags(noise, f, noise_reg, false);
    auto* nd = app.add_subcommand("nd-demo", "Multi-dimensional reconstruction demo");
    add_grid_flags(nd, f, nd_reg, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen) {
            return run_gen(f, gen_reg);
        }
        if (*rec) {
            return run_recover(f, rec_reg);
        }
        if (*phase) {
            return run_experiment(ExperimentKind::phase, f, phase_reg);
        }
        if (*timing) {
            return run_experiment(ExperimentKind::timing, f, timing_reg);
        }
        if (*noise) {
            return run_experiment(ExperimentKind::noise, f, noise_reg);
        }
        if (*nd) {
            return run_experiment(ExperimentKind::nd_demo, f, nd_reg);
        }
    } catch (const std::exception& e) {
        std::cerr << "hankelrec: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
