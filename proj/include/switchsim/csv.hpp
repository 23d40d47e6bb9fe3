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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "switchsim/errors.hpp"

namespace switchsim {

/// Locale-independent scientific form with 17 significant digits, enough to
/// round-trip any double exactly (and well past the 12-digit schema floor).
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: to_chars failed");
    }
    return std::string(buf, ptr);
}

inline double parse_csv_double(std::string_view v, const std::string& context) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(context + ": bad numeric field '" + std::string(v) + "'");
    }
    return out;
}

inline int parse_csv_int(std::string_view v, const std::string& context) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(context + ": bad integer field '" + std::string(v) + "'");
    }
    return out;
}

/// One trials.csv row. k_minus is a double so that synthetic fixtures can
/// carry exact fractional counts; the simulator always writes integers.
struct TrialRow {
    int n;
    int trial_index;
    double k_minus;
    int m;
};

/// One rmse.csv row.
struct RmseRow {
    int n;
    double rmse;
    double rmse_std;
    double crb;
    double hl_bound;
    double sql_bound;
};

inline constexpr const char* kTrialsHeader = "n,trial_index,k_minus,m";
inline constexpr const char* kRmseHeader = "n,rmse,rmse_std,crb,hl_bound,sql_bound";

namespace detail {

inline std::string format_count(double k) {
    if (std::isfinite(k) && k == std::floor(k) && std::abs(k) < 1e15) {
        return std::to_string(static_cast<long long>(k));
    }
    return format_double(k);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t pos = 0;
    while (true) {
        size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    if (in.bad()) {
        throw IoError("failed reading file: " + path);
    }
    return lines;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path);
    }
    out << contents;
    out.flush();
    if (!out) {
        throw IoError("failed writing file: " + path);
    }
}

}  // namespace detail

inline void write_trials_csv(const std::string& path, const std::vector<TrialRow>& rows) {
    std::ostringstream out;
    out << kTrialsHeader << '\n';
    for (const TrialRow& r : rows) {
        out << r.n << ',' << r.trial_index << ',' << detail::format_count(r.k_minus) << ',' << r.m
            << '\n';
    }
    detail::write_file(path, out.str());
}

inline std::vector<TrialRow> read_trials_csv(const std::string& path) {
    auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != kTrialsHeader) {
        throw ConfigError("trials csv: expected header '" + std::string(kTrialsHeader) + "'");
    }
    std::vector<TrialRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = detail::split_fields(lines[i]);
        if (f.size() != 4) {
            throw ConfigError("trials csv: row " + std::to_string(i) + " has " +
                              std::to_string(f.size()) + " fields, expected 4");
        }
        const std::string ctx = "trials csv row " + std::to_string(i);
        TrialRow row{parse_csv_int(f[0], ctx), parse_csv_int(f[1], ctx),
                     parse_csv_double(f[2], ctx), parse_csv_int(f[3], ctx)};
        if (row.n < 0 || row.m < 1 || row.k_minus < 0.0 || row.k_minus > row.m) {
            throw ConfigError(ctx + ": values out of range");
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_rmse_csv(const std::string& path, const std::vector<RmseRow>& rows) {
    std::ostringstream out;
    out << kRmseHeader << '\n';
    for (const RmseRow& r : rows) {
        out << r.n << ',' << format_double(r.rmse) << ',' << format_double(r.rmse_std) << ','
            << format_double(r.crb) << ',' << format_double(r.hl_bound) << ','
            << format_double(r.sql_bound) << '\n';
    }
    detail::write_file(path, out.str());
}

inline std::vector<RmseRow> read_rmse_csv(const std::string& path) {
    auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != kRmseHeader) {
        throw ConfigError("rmse csv: expected header '" + std::string(kRmseHeader) + "'");
    }
    std::vector<RmseRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = detail::split_fields(lines[i]);
        if (f.size() != 6) {
            throw ConfigError("rmse csv: row " + std::to_string(i) + " has " +
                              std::to_string(f.size()) + " fields, expected 6");
        }
        const std::string ctx = "rmse csv row " + std::to_string(i);
        rows.push_back(RmseRow{parse_csv_int(f[0], ctx), parse_csv_double(f[1], ctx),
                               parse_csv_double(f[2], ctx), parse_csv_double(f[3], ctx),
                               parse_csv_double(f[4], ctx), parse_csv_double(f[5], ctx)});
    }
    return rows;
}

/// FNV-1a 64-bit digest of a byte string, as fixed-width hex.
inline std::string fnv1a64_hex(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file for digest: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64_hex(buf.str());
}

}  // namespace switchsim
