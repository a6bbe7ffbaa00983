#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "pessimlab/pessimlab.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PESSIMLAB_CLI_PATH;

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd = kCli + " " + args + " > " + stdout_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path(PESSIMLAB_CLI_PATH).parent_path() / "cli_tmp" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_small_config(const fs::path& path) {
    pessimlab::write_file_atomic(path.string(), R"({
        "instances": [
            {"id": "cb_expert", "params": {"s": 2, "n_design": "N"}},
            {"id": "cb_most_played_failure", "params": {"c_star": 1.5, "epsilon": 0.05}}
        ],
        "algorithms": [
            {"id": "lcb_cb", "override_L": 2.5},
            {"id": "behavior_cloning"}
        ],
        "n_grid": [50, 100],
        "replications": 20,
        "root_seed": 7
    })");
}

}  // namespace

TEST_CASE("cli usage errors exit with status 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("verify --suite bogus") == 2);
    CHECK(run_cli("run --instance nope --alg lcb_mab --n 10") == 2);
    CHECK(run_cli("run --instance lecam_b --params {\\\"c_star\\\":2.0,\\\"gap\\\":0.25} "
                  "--alg vi_lcb --n 10") == 2);
}

TEST_CASE("cli verify runs a fast suite cleanly") {
    const fs::path dir = fresh_dir("verify");
    const fs::path out = dir / "report.txt";
    CHECK(run_cli("verify --suite instances", out.string()) == 0);
    const std::string report = pessimlab::read_file(out.string());
    CHECK(report.find("PASS") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);
}

TEST_CASE("cli run prints a summary row") {
    const fs::path dir = fresh_dir("run");
    const fs::path out = dir / "summary.csv";
    const int code = run_cli(
        "run --instance lecam_b --params '{\"c_star\":2.0,\"gap\":0.25}' "
        "--alg lcb_mab --n 40 --reps 10 --seed 3",
        out.string());
    REQUIRE(code == 0);
    const auto rows = pessimlab::summary_from_csv(pessimlab::read_file(out.string()));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].count == 10);
    CHECK(rows[0].n == 40);
}

TEST_CASE("cli sweep is byte-deterministic across reruns and thread counts") {
    // lecam_b: wrong-arm probability at these sizes is small but positive,
    // so the subopt column is not trivially zero
    const fs::path dir1 = fresh_dir("sweep1");
    const fs::path dir2 = fresh_dir("sweep2");
    const fs::path cfg = dir1 / "config.json";
    write_small_config(cfg);
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out-dir " + dir1.string() +
                    " --threads 1") == 0);
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out-dir " + dir2.string() +
                    " --threads 2") == 0);
    CHECK(pessimlab::read_file((dir1 / "records.csv").string()) ==
          pessimlab::read_file((dir2 / "records.csv").string()));
    CHECK(pessimlab::read_file((dir1 / "summary.csv").string()) ==
          pessimlab::read_file((dir2 / "summary.csv").string()));
}

TEST_CASE("PESSIMLAB_SEED overrides the configured root seed") {
    const fs::path dir1 = fresh_dir("seed1");
    const fs::path dir2 = fresh_dir("seed2");
    const fs::path cfg = dir1 / "config.json";
    write_small_config(cfg);
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out-dir " + dir1.string()) == 0);
    const std::string env_cmd = "PESSIMLAB_SEED=123456 " + kCli + " sweep --config " +
                                cfg.string() + " --out-dir " + dir2.string() + " > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
    CHECK(pessimlab::read_file((dir1 / "records.csv").string()) !=
          pessimlab::read_file((dir2 / "records.csv").string()));
}

TEST_CASE("cli plot renders sweep output without re-reading instances") {
    const fs::path dir = fresh_dir("plot");
    const fs::path cfg = dir / "config.json";
    write_small_config(cfg);
    REQUIRE(run_cli("sweep --config " + cfg.string() + " --out-dir " + dir.string()) == 0);
    const fs::path svg = dir / "curves.svg";
    REQUIRE(run_cli("plot --summary " + (dir / "summary.csv").string() +
                    " --x n --y mean --group algorithm --logx --logy --out " + svg.string()) == 0);
    const std::string doc = pessimlab::read_file(svg.string());
    CHECK(doc.find("<svg") != std::string::npos);
    CHECK(doc.find("</svg>") != std::string::npos);

    // plotting is a pure function of the CSV
    const fs::path svg2 = dir / "curves2.svg";
    REQUIRE(run_cli("plot --summary " + (dir / "summary.csv").string() +
                    " --x n --y mean --group algorithm --logx --logy --out " + svg2.string()) == 0);
    CHECK(doc == pessimlab::read_file(svg2.string()));
}

TEST_CASE("the shipped rate-transition config parses and binds per-cell sizes") {
    const fs::path shipped = fs::path(PESSIMLAB_SOURCE_DIR) / "configs/cb_rate_transition.json";
    const pessimlab::ExperimentConfig cfg =
        pessimlab::parse_config(pessimlab::Json::parse(pessimlab::read_file(shipped.string())));
    CHECK(cfg.instances.size() == 2);
    CHECK(cfg.n_grid.size() == 7);
    // the expert instance rebuilds per cell
    const pessimlab::HardInstance small = pessimlab::build_instance(cfg.instances[0], 250);
    const pessimlab::HardInstance big = pessimlab::build_instance(cfg.instances[0], 16000);
    const auto& cb_small = std::get<pessimlab::CbInstance>(small.env);
    const auto& cb_big = std::get<pessimlab::CbInstance>(big.env);
    CHECK(cb_small.rho[0] > cb_big.rho[0]);
}
