// Command-line front end: run single experiments, execute config-driven
// sweeps, check invariant suites, and render rate curves from summary CSVs.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "pessimlab/pessimlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitUsage = 2;

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

std::uint64_t seed_with_env_override(std::uint64_t configured) {
    if (const char* env = std::getenv("PESSIMLAB_SEED")) return std::strtoull(env, nullptr, 10);
    return configured;
}

int do_sweep(const std::string& config_path, const std::string& out_dir, unsigned threads) {
    pessimlab::Json cfg_json = pessimlab::Json::parse(pessimlab::read_file(config_path));
    pessimlab::ExperimentConfig cfg = pessimlab::parse_config(cfg_json);
    cfg.root_seed = seed_with_env_override(cfg.root_seed);
    const auto records = pessimlab::run_sweep(cfg, threads);
    const auto summary = pessimlab::summarize(records);
    pessimlab::write_file_atomic(out_dir + "/records.csv", pessimlab::records_to_csv(records));
    pessimlab::write_file_atomic(out_dir + "/summary.csv", pessimlab::summary_to_csv(summary));
    std::cout << "wrote " << records.size() << " records and " << summary.size()
              << " summary rows to " << out_dir << "\n";
    return kExitOk;
}

int do_run(const std::string& instance_id, const std::string& params_json,
           const std::string& alg_id, std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
           double delta, double override_l, unsigned threads) {
    pessimlab::ExperimentConfig cfg;
    pessimlab::InstanceSpec inst;
    inst.id = instance_id;
    inst.params = params_json.empty() ? pessimlab::Json::object()
                                      : pessimlab::Json::parse(params_json);
    inst.label = instance_id;
    cfg.instances.push_back(inst);
    pessimlab::AlgorithmSpec alg;
    alg.id = alg_id;
    alg.label = alg_id;
    if (delta > 0) alg.penalty.delta = delta;
    if (override_l >= 0) alg.penalty.override_L = override_l;
    cfg.algorithms.push_back(alg);
    cfg.n_grid = {n};
    cfg.replications = reps;
    cfg.root_seed = seed_with_env_override(seed);
    const auto records = pessimlab::run_sweep(cfg, threads);
    std::cout << pessimlab::summary_to_csv(pessimlab::summarize(records));
    return kExitOk;
}

int do_verify(const std::string& suite) {
    const pessimlab::VerifyReport report = pessimlab::verify_suite(suite);
    std::cout << report.to_string();
    return report.ok() ? kExitOk : kExitInvariantFailure;
}

int do_plot(const std::string& summary_path, const pessimlab::PlotOptions& opt,
            const std::string& out_path) {
    const auto rows = pessimlab::summary_from_csv(pessimlab::read_file(summary_path));
    pessimlab::write_file_atomic(out_path, pessimlab::emit_svg(rows, opt));
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pessimlab: offline tabular RL experiments with lower confidence bounds"};
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "run a config-driven experiment grid");
    std::string config_path, out_dir = ".";
    unsigned threads = 0;
    sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
    sweep->add_option("--out-dir", out_dir, "output directory")->required();
    sweep->add_option("--threads", threads, "worker threads (default: hardware)");

    auto* run = app.add_subcommand("run", "run one instance/algorithm cell");
    std::string instance_id, params_json, alg_id;
    std::uint64_t n = 0, reps = 1, seed = 0;
    double delta = 0, override_l = -1;
    run->add_option("--instance", instance_id, "instance id")->required();
    run->add_option("--params", params_json, "instance parameters (JSON object)");
    run->add_option("--alg", alg_id, "algorithm id")->required();
    run->add_option("--n", n, "sample size")->required();
    run->add_option("--reps", reps, "replications");
    run->add_option("--seed", seed, "root seed");
    run->add_option("--delta", delta, "confidence level (default 1/N)");
    run->add_option("--override-L", override_l, "explicit penalty scale");
    run->add_option("--threads", threads, "worker threads");

    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    std::string suite;
    verify->add_option("--suite", suite, "env|clean_events|contraction|value_difference|oracles|instances")
        ->required();

    auto* plot = app.add_subcommand("plot", "render an SVG from a summary CSV");
    std::string summary_path, out_path;
    pessimlab::PlotOptions opt;
    plot->add_option("--summary", summary_path, "summary CSV")->required();
    plot->add_option("--x", opt.x, "x column (n|c_star)");
    plot->add_option("--y", opt.y, "y column (mean)");
    plot->add_option("--group", opt.group, "grouping column (algorithm|instance)");
    plot->add_flag("--logx", opt.logx, "log-scale x");
    plot->add_flag("--logy", opt.logy, "log-scale y");
    plot->add_option("--title", opt.title, "plot title");
    plot->add_option("--out", out_path, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sweep->parsed()) return do_sweep(config_path, out_dir, threads);
        if (run->parsed())
            return do_run(instance_id, params_json, alg_id, n, reps, seed, delta, override_l,
                          threads);
        if (verify->parsed()) return do_verify(suite);
        if (plot->parsed()) return do_plot(summary_path, opt, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n"
                  << "valid instance ids: " << join(pessimlab::instance_ids()) << "\n"
                  << "valid algorithm ids: " << join(pessimlab::algorithm_ids()) << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantFailure;
    }
    return kExitUsage;
}
