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

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "switchsim/errors.hpp"
#include "switchsim/experiment.hpp"
#include "switchsim/fock.hpp"

namespace switchsim {

/// Resolved tool configuration: the experiment description plus fit and
/// oracle settings. Produced from a flat key = value document in which
/// unknown or duplicate keys are errors.
struct Config {
    ExperimentConfig exp;
    FringeModel fit_model = FringeModel::Cosine;
    bool fit_fix_nu = true;
    int fit_max_iter = 200;
    int oracle_cutoff = 0;  // 0 selects recommended_cutoff per case
    double oracle_trunc_eps = kDefaultTruncEps;
    double oracle_coherent_alpha = 0.5;
    std::vector<double> oracle_grid = {0.02, 0.1, 0.3};

    void validate() const {
        exp.validate();
        if (fit_max_iter < 1) {
            throw ConfigError("fit_max_iter must be >= 1");
        }
        if (oracle_cutoff != 0 && (oracle_cutoff < 2 || oracle_cutoff > kMaxCutoff)) {
            throw ConfigError("oracle_cutoff must be 0 (auto) or in [2, kMaxCutoff]");
        }
        if (!(oracle_trunc_eps > 0.0)) {
            throw ConfigError("oracle_trunc_eps must be > 0");
        }
        if (!(oracle_coherent_alpha >= 0.0) || !std::isfinite(oracle_coherent_alpha)) {
            throw ConfigError("oracle_coherent_alpha must be finite and >= 0");
        }
        if (oracle_grid.empty()) {
            throw ConfigError("oracle_grid must be nonempty");
        }
        for (double g : oracle_grid) {
            if (!(g > 0.0) || !std::isfinite(g)) {
                throw ConfigError("oracle_grid entries must be positive and finite");
            }
        }
    }

    bool operator==(const Config& o) const {
        return exp.a_true == o.exp.a_true && exp.n_range == o.exp.n_range && exp.m == o.exp.m &&
               exp.trials == o.exp.trials &&
               exp.noise.visibility == o.exp.noise.visibility &&
               exp.noise.efficiency == o.exp.noise.efficiency &&
               exp.noise.multi_pair == o.exp.noise.multi_pair && exp.seed == o.exp.seed &&
               exp.optimal_phase_mode == o.exp.optimal_phase_mode &&
               exp.fit_nuisance == o.exp.fit_nuisance && exp.nuisance_c == o.exp.nuisance_c &&
               exp.nuisance_phi0 == o.exp.nuisance_phi0 &&
               exp.bootstrap_resamples == o.exp.bootstrap_resamples &&
               exp.estimator_nu == o.exp.estimator_nu && fit_model == o.fit_model &&
               fit_fix_nu == o.fit_fix_nu && fit_max_iter == o.fit_max_iter &&
               oracle_cutoff == o.oracle_cutoff && oracle_trunc_eps == o.oracle_trunc_eps &&
               oracle_coherent_alpha == o.oracle_coherent_alpha && oracle_grid == o.oracle_grid;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_double(std::string_view v, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + std::string(v) +
                          "'");
    }
    return out;
}

template <typename Int>
inline Int parse_int(std::string_view v, const std::string& key) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + std::string(v) +
                          "'");
    }
    return out;
}

inline bool parse_bool(std::string_view v, const std::string& key) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected true or false, got '" + std::string(v) +
                      "'");
}

/// "0..30" (inclusive range), or a comma list of integers.
inline std::vector<int> parse_n_range(std::string_view v, const std::string& key) {
    std::vector<int> out;
    size_t dots = v.find("..");
    if (dots != std::string_view::npos) {
        int lo = parse_int<int>(trim(v.substr(0, dots)), key);
        int hi = parse_int<int>(trim(v.substr(dots + 2)), key);
        if (lo > hi) {
            throw ConfigError("config key '" + key + "': range lo > hi");
        }
        for (int n = lo; n <= hi; ++n) {
            out.push_back(n);
        }
        return out;
    }
    size_t pos = 0;
    while (pos <= v.size()) {
        size_t comma = v.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = v.size();
        }
        out.push_back(parse_int<int>(trim(v.substr(pos, comma - pos)), key));
        pos = comma + 1;
        if (comma == v.size()) {
            break;
        }
    }
    return out;
}

inline std::vector<double> parse_double_list(std::string_view v, const std::string& key) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= v.size()) {
        size_t comma = v.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = v.size();
        }
        out.push_back(parse_double(trim(v.substr(pos, comma - pos)), key));
        pos = comma + 1;
        if (comma == v.size()) {
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Parses a flat key = value document. '#' starts a comment; blank lines are
/// skipped; every key must be known and appear at most once. xbar/pbar may
/// be given instead of a_true (then a_true = xbar * pbar).
inline Config parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        size_t hash = sv.find('#');
        if (hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        sv = detail::trim(sv);
        if (sv.empty()) {
            continue;
        }
        size_t eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key(detail::trim(sv.substr(0, eq)));
        std::string value(detail::trim(sv.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        if (!kv.emplace(key, value).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }
    }

    Config cfg;
    cfg.exp.n_range.clear();
    bool have_a = false, have_xbar = false, have_pbar = false;
    double xbar = 0.0, pbar = 0.0;
    for (const auto& [key, value] : kv) {
        if (key == "a_true") {
            cfg.exp.a_true = detail::parse_double(value, key);
            have_a = true;
        } else if (key == "xbar") {
            xbar = detail::parse_double(value, key);
            have_xbar = true;
        } else if (key == "pbar") {
            pbar = detail::parse_double(value, key);
            have_pbar = true;
        } else if (key == "n_range") {
            cfg.exp.n_range = detail::parse_n_range(value, key);
        } else if (key == "m") {
            cfg.exp.m = detail::parse_int<int>(value, key);
        } else if (key == "trials") {
            cfg.exp.trials = detail::parse_int<int>(value, key);
        } else if (key == "seed") {
            cfg.exp.seed = detail::parse_int<uint64_t>(value, key);
        } else if (key == "visibility") {
            cfg.exp.noise.visibility = detail::parse_double(value, key);
        } else if (key == "efficiency") {
            cfg.exp.noise.efficiency = detail::parse_double(value, key);
        } else if (key == "multi_pair") {
            cfg.exp.noise.multi_pair = detail::parse_double(value, key);
        } else if (key == "optimal_phase_mode") {
            cfg.exp.optimal_phase_mode = detail::parse_bool(value, key);
        } else if (key == "fit_nuisance") {
            cfg.exp.fit_nuisance = detail::parse_bool(value, key);
        } else if (key == "nuisance_c") {
            cfg.exp.nuisance_c = detail::parse_double(value, key);
        } else if (key == "nuisance_phi0") {
            cfg.exp.nuisance_phi0 = detail::parse_double(value, key);
        } else if (key == "bootstrap_resamples") {
            cfg.exp.bootstrap_resamples = detail::parse_int<int>(value, key);
        } else if (key == "estimator_nu") {
            cfg.exp.estimator_nu = detail::parse_double(value, key);
        } else if (key == "fit_model") {
            if (value == "cos") {
                cfg.fit_model = FringeModel::Cosine;
            } else if (value == "cos2") {
                cfg.fit_model = FringeModel::CosineSquared;
            } else {
                throw ConfigError("config key 'fit_model': expected cos or cos2");
            }
        } else if (key == "fit_fix_nu") {
            cfg.fit_fix_nu = detail::parse_bool(value, key);
        } else if (key == "fit_max_iter") {
            cfg.fit_max_iter = detail::parse_int<int>(value, key);
        } else if (key == "oracle_cutoff") {
            cfg.oracle_cutoff = detail::parse_int<int>(value, key);
        } else if (key == "oracle_trunc_eps") {
            cfg.oracle_trunc_eps = detail::parse_double(value, key);
        } else if (key == "oracle_coherent_alpha") {
            cfg.oracle_coherent_alpha = detail::parse_double(value, key);
        } else if (key == "oracle_grid") {
            cfg.oracle_grid = detail::parse_double_list(value, key);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (have_xbar != have_pbar) {
        throw ConfigError("config: xbar and pbar must be given together");
    }
    if (have_xbar) {
        if (have_a) {
            throw ConfigError("config: give either a_true or xbar/pbar, not both");
        }
        cfg.exp.a_true = xbar * pbar;
    }
    if (cfg.exp.n_range.empty()) {
        for (int n = 0; n <= 30; ++n) {
            cfg.exp.n_range.push_back(n);
        }
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline Config parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading config file: " + path);
    }
    return parse_config_text(buf.str());
}

inline nlohmann::json config_to_json(const Config& cfg) {
    nlohmann::json j;
    j["a_true"] = cfg.exp.a_true;
    j["n_range"] = cfg.exp.n_range;
    j["m"] = cfg.exp.m;
    j["trials"] = cfg.exp.trials;
    j["seed"] = cfg.exp.seed;
    j["visibility"] = cfg.exp.noise.visibility;
    j["efficiency"] = cfg.exp.noise.efficiency;
    j["multi_pair"] = cfg.exp.noise.multi_pair;
    j["optimal_phase_mode"] = cfg.exp.optimal_phase_mode;
    j["fit_nuisance"] = cfg.exp.fit_nuisance;
    j["nuisance_c"] = cfg.exp.nuisance_c;
    j["nuisance_phi0"] = cfg.exp.nuisance_phi0;
    j["bootstrap_resamples"] = cfg.exp.bootstrap_resamples;
    j["estimator_nu"] = cfg.exp.estimator_nu;
    j["fit_model"] = cfg.fit_model == FringeModel::Cosine ? "cos" : "cos2";
    j["fit_fix_nu"] = cfg.fit_fix_nu;
    j["fit_max_iter"] = cfg.fit_max_iter;
    j["oracle_cutoff"] = cfg.oracle_cutoff;
    j["oracle_trunc_eps"] = cfg.oracle_trunc_eps;
    j["oracle_coherent_alpha"] = cfg.oracle_coherent_alpha;
    j["oracle_grid"] = cfg.oracle_grid;
    return j;
}

inline Config config_from_json(const nlohmann::json& j) {
    Config cfg;
    try {
        cfg.exp.a_true = j.at("a_true").get<double>();
        cfg.exp.n_range = j.at("n_range").get<std::vector<int>>();
        cfg.exp.m = j.at("m").get<int>();
        cfg.exp.trials = j.at("trials").get<int>();
        cfg.exp.seed = j.at("seed").get<uint64_t>();
        cfg.exp.noise.visibility = j.at("visibility").get<double>();
        cfg.exp.noise.efficiency = j.at("efficiency").get<double>();
        cfg.exp.noise.multi_pair = j.at("multi_pair").get<double>();
        cfg.exp.optimal_phase_mode = j.at("optimal_phase_mode").get<bool>();
        cfg.exp.fit_nuisance = j.at("fit_nuisance").get<bool>();
        cfg.exp.nuisance_c = j.at("nuisance_c").get<double>();
        cfg.exp.nuisance_phi0 = j.at("nuisance_phi0").get<double>();
        cfg.exp.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
        cfg.exp.estimator_nu = j.at("estimator_nu").get<double>();
        std::string model = j.at("fit_model").get<std::string>();
        if (model == "cos") {
            cfg.fit_model = FringeModel::Cosine;
        } else if (model == "cos2") {
            cfg.fit_model = FringeModel::CosineSquared;
        } else {
            throw ConfigError("config json: bad fit_model");
        }
        cfg.fit_fix_nu = j.at("fit_fix_nu").get<bool>();
        cfg.fit_max_iter = j.at("fit_max_iter").get<int>();
        cfg.oracle_cutoff = j.at("oracle_cutoff").get<int>();
        cfg.oracle_trunc_eps = j.at("oracle_trunc_eps").get<double>();
        cfg.oracle_coherent_alpha = j.at("oracle_coherent_alpha").get<double>();
        cfg.oracle_grid = j.at("oracle_grid").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config json: ") + e.what());
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config json: ") + e.what());
    }
    return cfg;
}

}  // namespace switchsim
