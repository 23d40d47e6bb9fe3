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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "switchsim/cli.hpp"
#include "switchsim/config.hpp"
#include "switchsim/errors.hpp"
#include "switchsim/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<uint64_t> seed;
    int threads = 0;  // 0 = all hardware threads
};

switchsim::Config load_config(const CommonFlags& flags) {
    switchsim::Config cfg = switchsim::parse_config_file(flags.config_path);
    if (flags.seed) {
        cfg.exp.seed = *flags.seed;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-switch fringe simulator and estimation toolkit"};
    app.set_version_flag("--version", switchsim::kVersion);
    app.require_subcommand(1);

    CommonFlags flags;
    std::string trials_path, rmse_path, model_flag;

    auto add_common = [&flags](CLI::App* sub, bool with_out) {
        sub->add_option("--config", flags.config_path, "configuration file (key = value)")
            ->required();
        sub->add_option("--seed", flags.seed, "override the config seed");
        sub->add_option("--threads", flags.threads,
                        "worker threads (0 = all hardware threads)");
        if (with_out) {
            sub->add_option("--out", flags.out_dir, "output directory (default .)");
        }
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the Monte Carlo sweep");
    add_common(sim, true);

    CLI::App* fit = app.add_subcommand("fit", "fit the fringe model to a trials.csv");
    add_common(fit, true);
    fit->add_option("--trials", trials_path, "trials.csv produced by simulate")->required();
    fit->add_option("--model", model_flag, "fit model: cos or cos2 (overrides config)")
        ->check(CLI::IsMember({"cos", "cos2"}));

    CLI::App* rep = app.add_subcommand("report", "compare an rmse.csv against the HL/SQL bounds");
    add_common(rep, true);
    rep->add_option("--rmse", rmse_path, "rmse.csv produced by simulate")->required();

    CLI::App* oc = app.add_subcommand("oracle-check",
                                      "validate the analytic fringe against the Fock oracle");
    add_common(oc, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : switchsim::kExitInvalidConfig;
    }

    try {
        switchsim::Config cfg = load_config(flags);
        if (sim->parsed()) {
            return switchsim::cmd_simulate(cfg, flags.out_dir, flags.threads);
        }
        if (fit->parsed()) {
            std::optional<switchsim::FringeModel> model;
            if (model_flag == "cos") {
                model = switchsim::FringeModel::Cosine;
            } else if (model_flag == "cos2") {
                model = switchsim::FringeModel::CosineSquared;
            }
            return switchsim::cmd_fit(cfg, trials_path, flags.out_dir, model);
        }
        if (rep->parsed()) {
            return switchsim::cmd_report(cfg, rmse_path, flags.out_dir);
        }
        return switchsim::cmd_oracle_check(cfg);
    } catch (const switchsim::TruncationError& e) {
        std::cerr << "error: " << e.what() << " (norm loss " << e.norm_loss << ", budget "
                  << e.budget << ")\n";
        return switchsim::kExitTruncation;
    } catch (const switchsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return switchsim::kExitInvalidConfig;
    } catch (const switchsim::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return switchsim::kExitIoFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return switchsim::kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
