// Copyright 2026 The switchsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// End-to-end tests of the command line tool. Each test drives the real
// binary through std::system and inspects exit codes and artifacts.

#include "switchsim/cli.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "switchsim/config.hpp"
#include "switchsim/csv.hpp"

using namespace switchsim;

namespace {

namespace fs = std::filesystem;

fs::path test_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "switchsim_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Runs the CLI with a pinned SOURCE_DATE_EPOCH and returns its exit code.
int run_cli(const std::string& args, const std::string& redirect = "> /dev/null 2>&1") {
    std::string cmd = "SOURCE_DATE_EPOCH=1700000000 " SWITCHSIM_CLI_PATH " " + args + " " + redirect;
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    detail::write_file(path.string(), text);
}

nlohmann::json read_json(const fs::path& path) {
    return nlohmann::json::parse(slurp(path));
}

const char* kSmallConfig =
    "n_range = 0..6\n"
    "trials = 3\n"
    "bootstrap_resamples = 100\n"
    "seed = 5\n";

}  // namespace

TEST_CASE("simulate writes the three artifacts with consistent digests") {
    fs::path dir = test_dir("simulate_basic");
    write_text(dir / "run.cfg", kSmallConfig);
    int code = run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                       (dir / "out").string());
    REQUIRE(code == 0);

    std::vector<TrialRow> trials = read_trials_csv((dir / "out" / "trials.csv").string());
    REQUIRE(trials.size() == 7 * 3);
    REQUIRE(trials.front().n == 0);
    REQUIRE(trials.back().n == 6);
    REQUIRE(trials.back().trial_index == 2);

    std::vector<RmseRow> rmse = read_rmse_csv((dir / "out" / "rmse.csv").string());
    REQUIRE(rmse.size() == 7);
    REQUIRE(std::isnan(rmse.front().rmse));
    REQUIRE(std::isinf(rmse.front().hl_bound));
    REQUIRE(rmse.back().n == 6);
    REQUIRE(std::isfinite(rmse.back().rmse));

    nlohmann::json manifest = read_json(dir / "out" / "manifest.json");
    REQUIRE(manifest["command"] == "simulate");
    REQUIRE(manifest["artifact_version"] == kVersion);
    REQUIRE(manifest["seed"] == 5);
    REQUIRE(manifest["created_utc"] == "2023-11-14T22:13:20Z");
    REQUIRE(manifest["digests"]["trials.csv"] ==
            file_digest((dir / "out" / "trials.csv").string()));
    REQUIRE(manifest["digests"]["rmse.csv"] ==
            file_digest((dir / "out" / "rmse.csv").string()));

    // The embedded config echo reparses to exactly the config that ran.
    Config echoed = config_from_json(manifest["config"]);
    Config original = parse_config_file((dir / "run.cfg").string());
    REQUIRE(echoed == original);
}

TEST_CASE("simulate reruns are byte-identical under a pinned epoch") {
    fs::path dir = test_dir("simulate_deterministic");
    write_text(dir / "run.cfg", kSmallConfig);
    std::string cfg = (dir / "run.cfg").string();
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + (dir / "b").string()) == 0);
    REQUIRE(run_cli("simulate --config " + cfg + " --threads 2 --out " +
                    (dir / "c").string()) == 0);
    for (const char* name : {"trials.csv", "rmse.csv", "manifest.json"}) {
        CAPTURE(name);
        REQUIRE(slurp(dir / "a" / name) == slurp(dir / "b" / name));
        REQUIRE(slurp(dir / "a" / name) == slurp(dir / "c" / name));
    }
}

TEST_CASE("the seed flag overrides the config seed") {
    fs::path dir = test_dir("simulate_seed_flag");
    write_text(dir / "run.cfg", kSmallConfig);
    std::string cfg = (dir / "run.cfg").string();
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("simulate --config " + cfg + " --seed 9 --out " + (dir / "b").string()) ==
            0);
    REQUIRE(slurp(dir / "a" / "trials.csv") != slurp(dir / "b" / "trials.csv"));
    nlohmann::json manifest = read_json(dir / "b" / "manifest.json");
    REQUIRE(manifest["seed"] == 9);
    REQUIRE(manifest["config"]["seed"] == 9);
}

TEST_CASE("config and io failures map to distinct exit codes") {
    fs::path dir = test_dir("exit_codes");
    write_text(dir / "bad.cfg", "visibility = 2\n");
    REQUIRE(run_cli("simulate --config " + (dir / "bad.cfg").string() + " --out " +
                    (dir / "out").string()) == 2);
    REQUIRE(run_cli("simulate --config " + (dir / "missing.cfg").string() + " --out " +
                    (dir / "out").string()) == 3);
    write_text(dir / "ok.cfg", kSmallConfig);
    REQUIRE(run_cli("fit --config " + (dir / "ok.cfg").string() + " --trials " +
                    (dir / "absent.csv").string() + " --out " + (dir / "out").string()) == 3);
    REQUIRE(run_cli("no-such-command") == 2);
    REQUIRE(run_cli("fit --config " + (dir / "ok.cfg").string()) == 2);  // missing --trials
    REQUIRE(run_cli("--version") == 0);
}

TEST_CASE("fit recovers an exact synthetic fringe through the CLI") {
    fs::path dir = test_dir("fit_exact");
    const double a = 0.0063;
    const double c = 0.02;
    const double phi0 = 0.7;
    const double nu = 0.989;
    std::vector<TrialRow> rows;
    for (int n = 0; n <= 30; ++n) {
        double p = 0.5 * (1.0 - nu * std::cos(a * n * n + c * n + phi0));
        rows.push_back(TrialRow{n, 0, 60.0 * p, 60});
    }
    write_trials_csv((dir / "trials.csv").string(), rows);
    write_text(dir / "run.cfg", "a_true = 0.0063\n");

    REQUIRE(run_cli("fit --config " + (dir / "run.cfg").string() + " --trials " +
                    (dir / "trials.csv").string() + " --out " + (dir / "out").string()) == 0);
    nlohmann::json fit = read_json(dir / "out" / "fringe_fit.json");
    REQUIRE(fit["model"] == "cos");
    REQUIRE(fit["converged"] == true);
    REQUIRE(fit["nu_fixed"] == true);
    REQUIRE(fit["nu_fit"] == 0.989);
    REQUIRE(fit["sse"].get<double>() < 1e-12);
    REQUIRE(std::abs(fit["a_fit"].get<double>() - a) < 1e-9);
    REQUIRE(std::abs(fit["c_fit"].get<double>() - c) < 1e-9);
    REQUIRE(std::abs(fit["phi0_fit"].get<double>() - phi0) < 1e-9);
    REQUIRE(fit["points_used"] == 31);
}

TEST_CASE("the model flag overrides the configured fringe shape") {
    fs::path dir = test_dir("fit_model_flag");
    const double a = 0.0063;
    const double nu = 0.989;
    std::vector<TrialRow> rows;
    for (int n = 0; n <= 30; ++n) {
        double cu = std::cos(a * n * n + 0.02 * n + 0.7);
        rows.push_back(TrialRow{n, 0, 60.0 * 0.5 * (1.0 - nu * cu * cu), 60});
    }
    write_trials_csv((dir / "trials.csv").string(), rows);
    write_text(dir / "run.cfg", "a_true = 0.0063\n");  // fit_model defaults to cos

    REQUIRE(run_cli("fit --config " + (dir / "run.cfg").string() + " --trials " +
                    (dir / "trials.csv").string() + " --model cos2 --out " +
                    (dir / "out").string()) == 0);
    nlohmann::json fit = read_json(dir / "out" / "fringe_fit.json");
    REQUIRE(fit["model"] == "cos2");
    REQUIRE(fit["sse"].get<double>() < 1e-12);
    REQUIRE(std::abs(fit["a_fit"].get<double>() - a) < 1e-9);
}

TEST_CASE("a starved iteration budget exits with the fit failure code") {
    fs::path dir = test_dir("fit_starved");
    const double nu = 0.989;
    std::vector<TrialRow> rows;
    for (int n = 0; n <= 30; ++n) {
        double p = 0.5 * (1.0 - nu * std::cos(0.0063 * n * n + 0.02 * n + 0.7));
        rows.push_back(TrialRow{n, 0, 60.0 * p, 60});
    }
    write_trials_csv((dir / "trials.csv").string(), rows);
    write_text(dir / "run.cfg", "a_true = 0.0063\nfit_max_iter = 1\n");

    REQUIRE(run_cli("fit --config " + (dir / "run.cfg").string() + " --trials " +
                    (dir / "trials.csv").string() + " --out " + (dir / "out").string()) ==
            kExitFitNotConverged);
    // The best-so-far parameters are still written, flagged as unconverged.
    nlohmann::json fit = read_json(dir / "out" / "fringe_fit.json");
    REQUIRE(fit["converged"] == false);
    REQUIRE(std::isfinite(fit["a_fit"].get<double>()));
    REQUIRE(std::isfinite(fit["sse"].get<double>()));
}

TEST_CASE("fit rejects trials files with inconsistent shot counts") {
    fs::path dir = test_dir("fit_mixed_m");
    write_text(dir / "trials.csv",
               std::string(kTrialsHeader) + "\n5,0,3,60\n5,1,4,50\n6,0,3,60\n7,0,3,60\n");
    write_text(dir / "run.cfg", "a_true = 0.0063\n");
    REQUIRE(run_cli("fit --config " + (dir / "run.cfg").string() + " --trials " +
                    (dir / "trials.csv").string() + " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("report writes the working-point criteria and bounds table") {
    fs::path dir = test_dir("report_basic");
    write_text(dir / "run.cfg",
               "trials = 3\n"
               "bootstrap_resamples = 100\n"
               "seed = 5\n");
    std::string cfg = (dir / "run.cfg").string();
    REQUIRE(run_cli("simulate --config " + cfg + " --out " + (dir / "out").string()) == 0);
    REQUIRE(run_cli("report --config " + cfg + " --rmse " +
                    (dir / "out" / "rmse.csv").string() + " --out " + (dir / "out").string()) ==
            0);

    nlohmann::json rep = read_json(dir / "out" / "violation.json");
    REQUIRE(rep["criterion_value"].get<double>() ==
            Catch::Approx(3.7535094172446986).epsilon(1e-12));
    REQUIRE(rep["sql_criterion_value"].get<double>() ==
            Catch::Approx(14.847876780000002).epsilon(1e-12));
    REQUIRE(rep["per_n"].size() == 31);
    REQUIRE(rep["per_n"][0]["n"] == 0);
    REQUIRE(rep["per_n"][0]["violated"] == false);
    for (const auto& rec : rep["per_n"]) {
        if (rec["n"].get<int>() < 1 || rec["rmse"].is_null()) {
            continue;
        }
        REQUIRE(rec["violated"].get<bool>() ==
                (rec["rmse"].get<double>() < rec["hl_bound"].get<double>()));
    }

    auto lines = detail::read_lines((dir / "out" / "bounds.csv").string());
    REQUIRE(lines.size() == 32);
    REQUIRE(lines[0] == "n,hl_bound,sql_bound,ref_curve_mnu,ref_curve_nu");
    REQUIRE(lines[1].substr(0, 2) == "0,");
    REQUIRE(lines[1].find("inf") != std::string::npos);
    auto fields = detail::split_fields(lines[31]);
    REQUIRE(fields[0] == "30");
    REQUIRE(parse_csv_double(fields[1], "hl") ==
            Catch::Approx(2.809987116264605e-4).epsilon(1e-12));
    REQUIRE(parse_csv_double(fields[2], "sql") ==
            Catch::Approx(0.016763016185235298).epsilon(1e-12));
    // Reference curves at n = 30: 1/(sqrt(60) nu 900) and 1/(sqrt(nu) 900).
    REQUIRE(parse_csv_double(fields[3], "ref_mnu") ==
            Catch::Approx(1.0 / (std::sqrt(60.0) * 0.989 * 900.0)).epsilon(1e-12));
    REQUIRE(parse_csv_double(fields[4], "ref_nu") ==
            Catch::Approx(1.0 / (std::sqrt(0.989) * 900.0)).epsilon(1e-12));
}

TEST_CASE("report flags nothing when the channel is heavily attenuated") {
    fs::path dir = test_dir("report_attenuated");
    write_text(dir / "sim.cfg",
               "trials = 3\n"
               "bootstrap_resamples = 100\n"
               "seed = 5\n");
    write_text(dir / "rep.cfg",
               "trials = 3\n"
               "bootstrap_resamples = 100\n"
               "seed = 5\n"
               "efficiency = 0.01\n");
    REQUIRE(run_cli("simulate --config " + (dir / "sim.cfg").string() + " --out " +
                    (dir / "out").string()) == 0);
    REQUIRE(run_cli("report --config " + (dir / "rep.cfg").string() + " --rmse " +
                    (dir / "out" / "rmse.csv").string() + " --out " + (dir / "out").string()) ==
            0);
    nlohmann::json rep = read_json(dir / "out" / "violation.json");
    REQUIRE(rep["criterion_value"].get<double>() < 1.0);
    for (const auto& rec : rep["per_n"]) {
        REQUIRE(rec["violated"] == false);
    }
}

TEST_CASE("report validates the rmse grid against the config") {
    fs::path dir = test_dir("report_mismatch");
    write_text(dir / "run.cfg", kSmallConfig);  // n_range 0..6
    write_text(dir / "rmse.csv",
               std::string(kRmseHeader) + "\n10,1e-3,1e-4,1e-3,2e-3,5e-3\n");
    REQUIRE(run_cli("report --config " + (dir / "run.cfg").string() + " --rmse " +
                    (dir / "rmse.csv").string() + " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("fit and report artifacts are reproducible byte for byte") {
    fs::path dir = test_dir("pipeline_deterministic");
    write_text(dir / "run.cfg",
               "n_range = 0..12\n"
               "trials = 4\n"
               "bootstrap_resamples = 100\n"
               "seed = 21\n");
    std::string cfg = (dir / "run.cfg").string();
    for (const char* rep : {"a", "b"}) {
        fs::path out = dir / rep;
        REQUIRE(run_cli("simulate --config " + cfg + " --out " + out.string()) == 0);
        REQUIRE(run_cli("fit --config " + cfg + " --trials " +
                        (out / "trials.csv").string() + " --out " + out.string()) == 0);
        REQUIRE(run_cli("report --config " + cfg + " --rmse " + (out / "rmse.csv").string() +
                        " --out " + out.string()) == 0);
    }
    for (const char* name :
         {"trials.csv", "rmse.csv", "manifest.json", "fringe_fit.json", "violation.json",
          "bounds.csv"}) {
        CAPTURE(name);
        REQUIRE(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
}

TEST_CASE("oracle-check passes on the default working grid") {
    fs::path dir = test_dir("oracle_ok");
    write_text(dir / "run.cfg",
               "n_range = 0..8\n"
               "oracle_grid = 0.02, 0.1\n");
    int code = run_cli("oracle-check --config " + (dir / "run.cfg").string(),
                       "> " + (dir / "stdout.txt").string() + " 2>&1");
    REQUIRE(code == 0);
    std::string out = slurp(dir / "stdout.txt");
    REQUIRE(out.find("oracle-check: OK (tolerance 1e-6)") != std::string::npos);
    REQUIRE(out.find("max |analytic - oracle|") != std::string::npos);
}

TEST_CASE("oracle-check surfaces truncation-budget violations") {
    fs::path dir = test_dir("oracle_truncated");
    write_text(dir / "run.cfg",
               "n_range = 10\n"
               "oracle_grid = 0.5\n"
               "oracle_cutoff = 16\n");
    REQUIRE(run_cli("oracle-check --config " + (dir / "run.cfg").string()) ==
            kExitTruncation);
}
