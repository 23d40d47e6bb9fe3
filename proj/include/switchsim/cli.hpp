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

#pragma once

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "switchsim/config.hpp"
#include "switchsim/csv.hpp"
#include "switchsim/errors.hpp"
#include "switchsim/estimation.hpp"
#include "switchsim/experiment.hpp"
#include "switchsim/fock.hpp"
#include "switchsim/noise.hpp"
#include "switchsim/version.hpp"

namespace switchsim {

/// Subcommand exit codes (0 = success).
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitIoFailure = 3;
inline constexpr int kExitFitNotConverged = 4;
inline constexpr int kExitTruncation = 5;

namespace detail {

/// RFC 3339 UTC timestamp. Honors SOURCE_DATE_EPOCH so reruns can be made
/// byte-identical.
inline std::string created_utc() {
    std::time_t t;
    const char* sde = std::getenv("SOURCE_DATE_EPOCH");
    if (sde != nullptr && *sde != '\0') {
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory: " + out_dir + " (" + ec.message() + ")");
    }
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

inline double hl_or_inf(const Config& cfg, int n) {
    return n >= 1 ? hl_bound(cfg.exp.m, n, cfg.exp.noise.efficiency, cfg.exp.noise.multi_pair)
                  : std::numeric_limits<double>::infinity();
}

inline double sql_or_inf(const Config& cfg, int n) {
    return n >= 1 ? sql_bound(cfg.exp.m, n, cfg.exp.noise.efficiency, cfg.exp.noise.multi_pair)
                  : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Runs the Monte Carlo sweep and writes trials.csv, rmse.csv and
/// manifest.json into out_dir.
inline int cmd_simulate(const Config& cfg, const std::string& out_dir, int threads = 1) {
    cfg.validate();
    detail::ensure_out_dir(out_dir);
    std::vector<SweepRecord> records = run_sweep(cfg.exp, threads);

    std::vector<TrialRow> trial_rows;
    std::vector<RmseRow> rmse_rows;
    for (const SweepRecord& rec : records) {
        for (size_t t = 0; t < rec.outcomes.size(); ++t) {
            trial_rows.push_back(TrialRow{rec.n, static_cast<int>(t),
                                          static_cast<double>(rec.outcomes[t].k_minus),
                                          rec.outcomes[t].m});
        }
        rmse_rows.push_back(RmseRow{rec.n, rec.rmse, rec.rmse_std, rec.crb,
                                    detail::hl_or_inf(cfg, rec.n), detail::sql_or_inf(cfg, rec.n)});
    }
    std::string trials_path = detail::join_path(out_dir, "trials.csv");
    std::string rmse_path = detail::join_path(out_dir, "rmse.csv");
    write_trials_csv(trials_path, trial_rows);
    write_rmse_csv(rmse_path, rmse_rows);

    nlohmann::json manifest;
    manifest["artifact_version"] = kVersion;
    manifest["command"] = "simulate";
    manifest["config"] = config_to_json(cfg);
    manifest["created_utc"] = detail::created_utc();
    manifest["seed"] = cfg.exp.seed;
    manifest["digests"] = {{"trials.csv", file_digest(trials_path)},
                           {"rmse.csv", file_digest(rmse_path)}};
    detail::write_json_file(detail::join_path(out_dir, "manifest.json"), manifest);
    return 0;
}

/// Aggregates trials.csv into per-n fringe points, fits the configured model
/// and writes fringe_fit.json. Returns kExitFitNotConverged when the
/// optimizer missed the gradient tolerance (the best-so-far fit is still
/// written, marked converged = false).
inline int cmd_fit(const Config& cfg, const std::string& trials_path, const std::string& out_dir,
                   std::optional<FringeModel> model_override = std::nullopt) {
    cfg.validate();
    detail::ensure_out_dir(out_dir);
    std::vector<TrialRow> rows = read_trials_csv(trials_path);
    if (rows.empty()) {
        throw ConfigError("fit: trials file has no rows");
    }

    struct Agg {
        double k_sum = 0.0;
        double shots = 0.0;
        int m = 0;
    };
    std::vector<int> order;
    std::map<int, Agg> by_n;
    for (const TrialRow& r : rows) {
        auto [it, inserted] = by_n.emplace(r.n, Agg{});
        if (inserted) {
            order.push_back(r.n);
            it->second.m = r.m;
        } else if (it->second.m != r.m) {
            throw ConfigError("fit: mixed m values for n = " + std::to_string(r.n));
        }
        it->second.k_sum += r.k_minus;
        it->second.shots += r.m;
    }
    std::vector<FringePoint> points;
    points.reserve(order.size());
    for (int n : order) {
        const Agg& a = by_n[n];
        double p_hat = a.k_sum / a.shots;
        points.push_back(FringePoint{n, p_hat, default_fringe_weight(p_hat, a.shots)});
    }

    FringeModel model = model_override.value_or(cfg.fit_model);
    FitOptions options;
    options.max_iterations = cfg.fit_max_iter;
    options.fit_nuisance = cfg.exp.fit_nuisance;
    if (cfg.exp.a_true != 0.0) {
        for (double f : {0.4, 0.6, 0.8, 0.9, 1.0, 1.1, 1.25, 1.6, 2.5}) {
            options.a_candidates.push_back(cfg.exp.a_true * f);
        }
    }
    std::optional<double> fix_nu;
    if (cfg.fit_fix_nu) {
        fix_nu = cfg.exp.estimation_nu();
    }
    FringeFit fit = fit_fringe(points, model, fix_nu, options);

    nlohmann::json j;
    j["artifact_version"] = kVersion;
    j["created_utc"] = detail::created_utc();
    j["model"] = model == FringeModel::Cosine ? "cos" : "cos2";
    j["a_fit"] = fit.a_fit;
    j["c_fit"] = fit.c_fit;
    j["phi0_fit"] = fit.phi0_fit;
    j["nu_fit"] = fit.nu_fit;
    j["nu_fixed"] = fit.nu_fixed;
    j["sse"] = fit.sse;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["points_used"] = points.size();
    detail::write_json_file(detail::join_path(out_dir, "fringe_fit.json"), j);
    return fit.converged ? 0 : kExitFitNotConverged;
}

/// Compares an rmse.csv against the HL/SQL bounds and writes violation.json
/// plus the plot-ready bounds.csv reference curves.
inline int cmd_report(const Config& cfg, const std::string& rmse_path,
                      const std::string& out_dir) {
    cfg.validate();
    detail::ensure_out_dir(out_dir);
    std::vector<RmseRow> rows = read_rmse_csv(rmse_path);
    if (rows.size() != cfg.exp.n_range.size()) {
        throw ConfigError("report: rmse.csv has " + std::to_string(rows.size()) +
                          " rows but n_range has " + std::to_string(cfg.exp.n_range.size()));
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].n != cfg.exp.n_range[i]) {
            throw ConfigError("report: rmse.csv row order does not match n_range");
        }
    }

    int n_max = 0;
    std::vector<std::pair<int, double>> rmse_by_n;
    nlohmann::json per_n = nlohmann::json::array();
    for (const RmseRow& r : rows) {
        double hl = detail::hl_or_inf(cfg, r.n);
        double sql = detail::sql_or_inf(cfg, r.n);
        double margin = detail::margin_of(hl, r.rmse, r.rmse_std);
        nlohmann::json rec;
        rec["n"] = r.n;
        rec["rmse"] = r.rmse;
        rec["rmse_std"] = r.rmse_std;
        rec["crb"] = r.crb;
        rec["hl_bound"] = hl;
        rec["sql_bound"] = sql;
        rec["sigma_margin"] = margin;
        rec["violated"] = r.rmse < hl;
        per_n.push_back(rec);
        n_max = std::max(n_max, r.n);
        rmse_by_n.emplace_back(r.n, r.rmse);
    }

    nlohmann::json j;
    j["artifact_version"] = kVersion;
    j["created_utc"] = detail::created_utc();
    j["config"] = config_to_json(cfg);
    j["criterion_value"] =
        n_max >= 1 ? hl_criterion(cfg.exp.noise, cfg.exp.m, n_max)
                   : std::numeric_limits<double>::quiet_NaN();
    j["sql_criterion_value"] = n_max >= 1 ? sql_criterion(cfg.exp.noise, n_max)
                                          : std::numeric_limits<double>::quiet_NaN();
    j["per_n"] = per_n;
    auto quadrature_ok = [&cfg](int n) {
        if (cfg.exp.optimal_phase_mode) {
            return true;
        }
        double n2 = static_cast<double>(n) * static_cast<double>(n);
        double s = std::sin(n2 * cfg.exp.a_true);
        return s * s > 0.3;
    };
    try {
        ScalingFit sc = fit_scaling(rmse_by_n, quadrature_ok);
        j["scaling"] = {{"exponent", sc.exponent},
                        {"prefactor", sc.prefactor},
                        {"n_used", sc.n_used}};
    } catch (const std::invalid_argument&) {
        j["scaling"] = nullptr;
    }
    detail::write_json_file(detail::join_path(out_dir, "violation.json"), j);

    // bounds.csv: the HL/SQL bounds plus both readings of the theoretical
    // precision curve, 1/(sqrt(m) nu n^2) and 1/(sqrt(nu) n^2).
    std::ostringstream bounds;
    bounds << "n,hl_bound,sql_bound,ref_curve_mnu,ref_curve_nu\n";
    for (int n : cfg.exp.n_range) {
        double inf = std::numeric_limits<double>::infinity();
        double n2 = static_cast<double>(n) * static_cast<double>(n);
        double ref_mnu = n >= 1 ? 1.0 / (std::sqrt(static_cast<double>(cfg.exp.m)) *
                                         cfg.exp.noise.visibility * n2)
                                : inf;
        double ref_nu = n >= 1 ? 1.0 / (std::sqrt(cfg.exp.noise.visibility) * n2) : inf;
        bounds << n << ',' << format_double(detail::hl_or_inf(cfg, n)) << ','
               << format_double(detail::sql_or_inf(cfg, n)) << ',' << format_double(ref_mnu)
               << ',' << format_double(ref_nu) << '\n';
    }
    detail::write_file(detail::join_path(out_dir, "bounds.csv"), bounds.str());
    return 0;
}

/// Sweeps the configured (xbar, pbar, n) grid with vacuum and coherent
/// inputs, prints the worst |analytic - oracle| gap, and succeeds iff it is
/// below 1e-6. Truncation-budget violations escape as TruncationError.
inline int cmd_oracle_check(const Config& cfg, std::ostream& out = std::cout) {
    cfg.validate();
    std::vector<double> values;
    for (double g : cfg.oracle_grid) {
        values.push_back(g);
        values.push_back(-g);
    }
    double max_diff = 0.0;
    int min_cutoff = 0, max_cutoff = 0;
    long cases = 0;
    for (int n : cfg.exp.n_range) {
        for (double xbar : values) {
            for (double pbar : values) {
                DisplacementSequence seq = uniform_sequence(static_cast<size_t>(n), xbar, pbar);
                double p_ideal = ideal_probabilities(geometric_phase(seq)).p_minus;
                for (int input = 0; input < 2; ++input) {
                    double alpha = input == 0 ? 0.0 : cfg.oracle_coherent_alpha;
                    int cutoff = cfg.oracle_cutoff != 0
                                     ? cfg.oracle_cutoff
                                     : recommended_cutoff(seq, alpha);
                    FockState psi =
                        input == 0 ? FockState::vacuum(cutoff, cfg.oracle_trunc_eps)
                                   : FockState::coherent(alpha, cutoff, cfg.oracle_trunc_eps);
                    double p_oracle = oracle_probabilities(seq, psi).p_minus;
                    max_diff = std::max(max_diff, std::abs(p_oracle - p_ideal));
                    min_cutoff = min_cutoff == 0 ? cutoff : std::min(min_cutoff, cutoff);
                    max_cutoff = std::max(max_cutoff, cutoff);
                    ++cases;
                }
            }
        }
    }
    bool ok = max_diff < 1e-6;
    out << "oracle-check: max |analytic - oracle| = " << format_double(max_diff) << " over "
        << cases << " cases (cutoffs " << min_cutoff << ".." << max_cutoff << ")\n";
    out << (ok ? "oracle-check: OK (tolerance 1e-6)\n"
               : "oracle-check: FAILED (tolerance 1e-6)\n");
    return ok ? 0 : 1;
}

}  // namespace switchsim
