// Copyright 2026 The lht Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command implementations behind the lht tool. Each command takes a RunConfig
// and returns its documents; writing files is left to the caller.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>

#include "lht/exponents.hpp"
#include "lht/io.hpp"
#include "lht/protocol.hpp"
#include "lht/separable.hpp"
#include "lht/sld.hpp"

namespace lht {

inline constexpr const char* kOutputDirEnv = "LHT_OUTPUT_DIR";

/// Flat key-value configuration. Unset optionals fall back to per-command
/// defaults.
struct RunConfig {
    // State: either (d, lambda) shorthand or an explicit spectrum with dims.
    std::optional<int> d;
    std::optional<double> lambda;
    std::vector<double> spectrum;
    std::optional<int> dim_a;
    std::optional<int> dim_b;

    double r_min = 0;
    std::optional<double> r_max;
    int r_points = 200;
    std::vector<int> n_grid;
    int n = 10;
    double eps = 0.3;
    double r = 0.1;
    std::string suite;
    std::string kind = "hoeffding";
    std::string input;
    std::string output_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;
    int samples = 10;

    // Tail queries.
    std::vector<double> weights;
    std::vector<double> values;
    double threshold = 0.75;
    std::string side = "ge";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline json to_json(const RunConfig& c) {
    json j;
    if (c.d) j["d"] = *c.d;
    if (c.lambda) j["lambda"] = *c.lambda;
    if (!c.spectrum.empty()) j["spectrum"] = c.spectrum;
    if (c.dim_a) j["dim_a"] = *c.dim_a;
    if (c.dim_b) j["dim_b"] = *c.dim_b;
    j["r_min"] = c.r_min;
    if (c.r_max) j["r_max"] = *c.r_max;
    j["r_points"] = c.r_points;
    if (!c.n_grid.empty()) j["n_grid"] = c.n_grid;
    j["n"] = c.n;
    j["eps"] = c.eps;
    j["r"] = c.r;
    if (!c.suite.empty()) j["suite"] = c.suite;
    j["kind"] = c.kind;
    if (!c.input.empty()) j["input"] = c.input;
    j["output_dir"] = c.output_dir;
    j["format"] = c.format;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    if (!c.weights.empty()) j["weights"] = c.weights;
    if (!c.values.empty()) j["values"] = c.values;
    j["threshold"] = c.threshold;
    j["side"] = c.side;
    return j;
}

inline RunConfig config_from_json(const json& j) {
    require(j.is_object(), "config: expected a JSON object");
    static const std::vector<std::string> known = {
        "d",       "lambda", "spectrum", "dim_a",  "dim_b",      "r_min",  "r_max", "r_points",
        "n_grid",  "n",      "eps",      "r",      "suite",      "kind",   "input", "output_dir",
        "format",  "seed",   "samples",  "weights", "values",    "threshold", "side"};
    for (auto it = j.begin(); it != j.end(); ++it)
        require(std::find(known.begin(), known.end(), it.key()) != known.end(), "config: unknown key '" + it.key() + "'");
    RunConfig c;
    if (j.contains("d")) c.d = j["d"].get<int>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("spectrum")) c.spectrum = j["spectrum"].get<std::vector<double>>();
    if (j.contains("dim_a")) c.dim_a = j["dim_a"].get<int>();
    if (j.contains("dim_b")) c.dim_b = j["dim_b"].get<int>();
    c.r_min = j.value("r_min", c.r_min);
    if (j.contains("r_max")) c.r_max = j["r_max"].get<double>();
    c.r_points = j.value("r_points", c.r_points);
    if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::vector<int>>();
    c.n = j.value("n", c.n);
    c.eps = j.value("eps", c.eps);
    c.r = j.value("r", c.r);
    c.suite = j.value("suite", c.suite);
    c.kind = j.value("kind", c.kind);
    c.input = j.value("input", c.input);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.format = j.value("format", c.format);
    c.seed = j.value("seed", c.seed);
    c.samples = j.value("samples", c.samples);
    if (j.contains("weights")) c.weights = j["weights"].get<std::vector<double>>();
    if (j.contains("values")) c.values = j["values"].get<std::vector<double>>();
    c.threshold = j.value("threshold", c.threshold);
    c.side = j.value("side", c.side);
    require(c.format == "csv" || c.format == "json", "config: format must be csv or json");
    return c;
}

/// Output directory, with the environment override applied.
inline std::string output_dir(const RunConfig& c) {
    if (const char* e = std::getenv(kOutputDirEnv); e && *e) return e;
    return c.output_dir;
}

struct ResolvedState {
    SchmidtSpectrum spec;
    std::vector<std::string> warnings;
};

/// Expands the (d, lambda) shorthand into lambda repeated d-1 times plus the
/// remainder. Only normalization and positivity are enforced; lambda outside
/// [0, 1/d] is flagged.
inline ResolvedState resolve_state(const RunConfig& c) {
    std::vector<std::string> warn;
    if (!c.spectrum.empty()) {
        require(!c.lambda, "config: give either spectrum or lambda, not both");
        const int k = static_cast<int>(c.spectrum.size());
        const int da = c.dim_a.value_or(k), db = c.dim_b.value_or(k);
        return {SchmidtSpectrum(c.spectrum, da, db), warn};
    }
    require(c.d.has_value() && c.lambda.has_value(), "config: need spectrum, or both d and lambda");
    const int d = *c.d;
    const double l = *c.lambda;
    if (l > 1.0 / d + 1e-15) warn.push_back("range ambiguity: lambda above 1/d");
    require(!c.dim_a || *c.dim_a == d, "config: the lambda shorthand fixes d_A = d");
    require(!c.dim_b || *c.dim_b == d, "config: the lambda shorthand fixes d_B = d");
    return {SchmidtSpectrum::from_lambda(d, l), warn};
}

// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    json to_json() const {
        json rs = json::array();
        for (const auto& r : rows) {
            json o;
            for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
            rs.push_back(std::move(o));
        }
        return rs;
    }
    std::string csv() const { return to_csv(header, rows); }
};

struct CommandResult {
    json summary;                // always carries "version"
    std::optional<Table> table;  // row output, if any
    std::vector<std::pair<std::string, std::string>> extra_files;  // name -> content
    bool ok = true;
};

inline json envelope(std::string_view command) {
    json j;
    j["version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

/// Hoeffding curves on an r-grid plus the summary scalars.
inline CommandResult cmd_figure(const RunConfig& c) {
    const auto st = resolve_state(c);
    const auto& spec = st.spec;
    const auto one = make_curve(spec, ClassTag::kOneWay);
    const auto two = make_curve(spec, ClassTag::kTwoWay);
    const double r_max = c.r_max.value_or(1.5 * std::max(one.plateau_rate, two.plateau_rate) + 0.05);
    require(c.r_points >= 2 && r_max > c.r_min && c.r_min >= 0, "figure: need 0 <= r_min < r_max and >= 2 points");
    Table t{{"r", "one_way_exponent", "two_way_exponent"}, {}};
    for (int i = 0; i < c.r_points; ++i) {
        const double r = c.r_min + (r_max - c.r_min) * i / (c.r_points - 1);
        t.rows.push_back({r, one(r), two(r)});
    }
    CommandResult out{envelope("figure"), t, {}, true};
    auto& s = out.summary;
    s["spectrum"] = spec.values();
    s["dim_a"] = spec.dim_a();
    s["dim_b"] = spec.dim_b();
    s["r_one_way"] = one.plateau_rate;
    s["r_two_way"] = two.plateau_rate;
    s["plateau_one_way"] = one.plateau_value;
    s["plateau_two_way"] = two.plateau_value;
    s["zero_rate_value"] = one(0.0);
    if (!spec.uniform()) {
        s["chernoff_one_way"] = chernoff_rate(one);
        s["chernoff_two_way"] = chernoff_rate(two);
    }
    s["warnings"] = st.warnings;
    return out;
}

/// The four global-POVM closed forms at (n, eps, r).
inline CommandResult cmd_global(const RunConfig& c) {
    const auto st = resolve_state(c);
    require(c.n >= 1, "global: n must be >= 1");
    require(c.eps >= 0 && c.eps < 1, "global: eps must lie in [0,1)");
    CommandResult out{envelope("global"), std::nullopt, {}, true};
    auto& s = out.summary;
    s["n"] = c.n;
    s["eps"] = c.eps;
    s["r"] = c.r;
    s["log_beta_stein"] = global_log_beta_stein(st.spec, c.n, c.eps);
    s["log_beta_hoeffding"] = c.r > 0 ? json(global_log_beta_hoeffding(st.spec, c.n, c.r)) : json(nullptr);
    s["beta_reversed_hoeffding"] = global_beta_reversed_hoeffding(st.spec, c.r);
    s["beta_reversed_stein"] = c.eps > 0 ? global_beta_reversed_stein(c.eps) : 0.0;
    s["warnings"] = st.warnings;
    return out;
}

// ---------------------------------------------------------------------------
// Verification suites.

namespace detail {

inline std::vector<int> grid_or(const std::vector<int>& g, std::vector<int> dflt) { return g.empty() ? dflt : g; }

inline std::vector<int> range_step(int lo, int hi, int step) {
    std::vector<int> v;
    for (int i = lo; i <= hi; i += step) v.push_back(i);
    return v;
}

inline TailSide parse_side(const std::string& s) {
    if (s == "ge") return TailSide::kGreaterEq;
    if (s == "le") return TailSide::kLessEq;
    throw std::invalid_argument("side must be 'ge' or 'le'");
}

inline SchmidtSpectrum state_or(const RunConfig& c, std::vector<double> dflt) {
    if (!c.spectrum.empty() || c.lambda) return resolve_state(c).spec;
    return SchmidtSpectrum(dflt, static_cast<int>(dflt.size()), static_cast<int>(dflt.size()));
}

/// Residual of log beta against -nD - sqrt(nV) Phi^{-1}(eps) - log(n)/2.
inline Table stein_oneway_rows(const SchmidtSpectrum& spec, double eps, const std::vector<int>& ns) {
    const auto terms = stein_strassen_terms(spec, eps, ClassTag::kOneWay);
    Table t{{"n", "log_beta_exact", "expansion", "residual"}, {}};
    for (int n : ns) {
        const double lb = one_way_beta_exact_log(spec, n, eps);
        const double ex = terms.evaluate(n);
        t.rows.push_back({double(n), lb, ex, lb - ex});
    }
    return t;
}

inline Table tail_rows(const std::vector<double>& w, const std::vector<double>& x, double R, TailSide side,
                       const std::vector<int>& ns) {
    Table t{{"n", "approx_log_tail", "exact_log_tail", "residual", "lattice_span"}, {}};
    for (int n : ns) {
        const auto a = br_tail_estimate(w, x, n, R, side);
        const double e = exact_tail(w, x, n, R, side);
        t.rows.push_back({double(n), a.approx_log_tail, e, a.approx_log_tail - e, a.lattice_span});
    }
    return t;
}

}  // namespace detail

/// |approx - exact| <= 0.5 nats and the absolute residual non-increasing in n
/// within 0.05.
inline bool tail_residuals_ok(const Table& t, double abs_tol = 0.5, double mono_tol = 0.05) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double r = std::abs(t.rows[i][3]);
        if (!(r <= abs_tol)) return false;
        if (i > 0 && r > std::abs(t.rows[i - 1][3]) + mono_tol) return false;
    }
    return true;
}

inline double residual_band(const Table& t, std::size_t col) {
    double lo = kInf, hi = -kInf;
    for (const auto& r : t.rows) {
        lo = std::min(lo, r[col]);
        hi = std::max(hi, r[col]);
    }
    return hi - lo;
}

inline CommandResult cmd_verify(const RunConfig& c) {
    CommandResult out{envelope("verify"), std::nullopt, {}, true};
    auto& s = out.summary;
    s["suite"] = c.suite;
    if (c.suite == "bahadur-rao") {
        const auto w = c.weights.empty() ? std::vector<double>{0.5, 0.5} : c.weights;
        const auto x = c.values.empty() ? std::vector<double>{0.0, 1.0} : c.values;
        const auto t = detail::tail_rows(w, x, c.threshold, detail::parse_side(c.side),
                                         detail::grid_or(c.n_grid, {20, 40, 80}));
        out.ok = tail_residuals_ok(t);
        s["criterion"] = "|residual| <= 0.5 and |residual| non-increasing within 0.05";
        out.table = t;
    } else if (c.suite == "stein-oneway") {
        const auto spec = detail::state_or(c, {0.1, 0.9});
        const auto t = detail::stein_oneway_rows(spec, c.eps, detail::grid_or(c.n_grid, detail::range_step(20, 200, 20)));
        const double band = residual_band(t, 3);
        out.ok = band <= 2.0;
        s["band"] = band;
        s["criterion"] = "residual band <= 2 nats";
        out.table = t;
    } else if (c.suite == "hoeffding-protocol") {
        const auto spec = detail::state_or(c, {0.1, 0.9});
        Table t{{"n", "r", "alpha", "alpha_bound", "log_beta", "log_beta_bound"}, {}};
        for (int n : detail::grid_or(c.n_grid, {c.n})) {
            const auto o = evaluate_test(spec, build_hoeffding_collection(spec, n, c.r));
            const double ab = hoeffding_alpha_bound(spec, n, c.r);
            const double bb = hoeffding_log_beta_bound(spec, n, c.r);
            out.ok = out.ok && o.alpha <= ab && o.log_beta <= bb;
            t.rows.push_back({double(n), c.r, o.alpha, ab, o.log_beta, bb});
        }
        s["criterion"] = "alpha <= |T_n| e^{-nr} and beta <= 8d|T_n|^3 e^{-n sup(...)} (d_A d_B)^{-n}";
        out.table = t;
    } else if (c.suite == "sep-sandwich") {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        Table t{{"sample", "n", "level", "alpha_lower", "alpha_upper", "log_beta", "monotone"}, {}};
        for (int k = 0; k < c.samples; ++k) {
            std::vector<double> p(2 + rng() % 2);
            double tot = 0;
            for (auto& v : p) tot += v = u(rng);
            for (auto& v : p) v /= tot;
            const int n = 1 + static_cast<int>(rng() % 10);
            ThresholdGrid g(p, n);
            const std::size_t kp = rng() % g.size();
            const auto sw = sep_sandwich(g, kp, static_cast<int>(p.size()));
            out.ok = out.ok && sw.alpha_lower <= sw.alpha_upper + 1e-12;
            t.rows.push_back({double(k), double(n), double(kp), sw.alpha_lower, sw.alpha_upper, sw.log_beta,
                              sw.monotone ? 1.0 : 0.0});
        }
        s["seed"] = c.seed;
        s["criterion"] = "alpha_lower <= alpha_upper";
        out.table = t;
    } else {
        throw std::invalid_argument("verify: unknown suite '" + c.suite +
                                    "' (expected stein-oneway, hoeffding-protocol, sep-sandwich or bahadur-rao)");
    }
    s["pass"] = out.ok;
    return out;
}

// ---------------------------------------------------------------------------

/// Builds (or loads) a collection, evaluates it and returns it as a document.
inline CommandResult cmd_protocol(const RunConfig& c) {
    const auto spec = resolve_state(c).spec;
    MeasureCollection coll;
    if (!c.input.empty()) {
        coll = collection_from_json(json::parse(read_text(c.input)));
    } else if (c.kind == "hoeffding") {
        coll = build_hoeffding_collection(spec, c.n, c.r);
    } else if (c.kind == "zero-error") {
        coll = build_zero_error_collection(spec, c.n);
    } else if (c.kind == "stein") {
        coll = build_stein_collection(spec, c.n, c.eps);
    } else {
        throw std::invalid_argument("protocol: kind must be hoeffding, zero-error or stein");
    }
    const auto o = evaluate_test(spec, coll);
    CommandResult out{envelope("protocol"), std::nullopt, {}, true};
    auto& s = out.summary;
    s["kind"] = c.input.empty() ? c.kind : "input";
    s["n"] = coll.n;
    s["measure_count"] = coll.measure_count();
    s["outcome"] = to_json(o);
    if (c.input.empty() && c.kind == "hoeffding") {
        s["alpha_bound"] = hoeffding_alpha_bound(spec, c.n, c.r);
        s["log_beta_bound"] = hoeffding_log_beta_bound(spec, c.n, c.r);
    } else if (c.input.empty() && c.kind == "zero-error") {
        s["log_beta_bound"] = zero_error_log_beta_bound(spec, c.n);
    }
    out.extra_files.push_back({"collection.json", to_json(coll).dump(1) + "\n"});
    return out;
}

/// Sandwich over every achievable R' for each n of the grid.
inline CommandResult cmd_sep(const RunConfig& c) {
    const auto spec = resolve_state(c).spec;
    Table t{{"n", "R_prime", "log_beta", "alpha_lower", "alpha_upper", "R_min", "R_tilde", "monotone"}, {}};
    bool mono = true;
    for (int n : detail::grid_or(c.n_grid, {c.n})) {
        ThresholdGrid g(spec.lambdas(), n);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto sw = sep_sandwich(g, k, spec.dim_max());
            mono = mono && sw.monotone;
            t.rows.push_back({double(n), sw.R_prime, sw.log_beta, sw.alpha_lower, sw.alpha_upper,
                              sw.R_min.value_or(std::nan("")), sw.R_tilde.value_or(std::nan("")),
                              sw.monotone ? 1.0 : 0.0});
        }
    }
    CommandResult out{envelope("sep"), t, {}, true};
    out.summary["monotone"] = mono;
    return out;
}

/// Bahadur-Rao approximation against the exact tail.
inline CommandResult cmd_tail(const RunConfig& c) {
    require(!c.weights.empty() && c.weights.size() == c.values.size(), "tail: need weights and values of equal length");
    const auto t = detail::tail_rows(c.weights, c.values, c.threshold, detail::parse_side(c.side),
                                     detail::grid_or(c.n_grid, {c.n}));
    CommandResult out{envelope("tail"), t, {}, true};
    out.summary["threshold"] = c.threshold;
    out.summary["side"] = c.side;
    return out;
}

/// Writes the table (csv or json) and extra files under the output directory
/// and returns the written paths.
inline std::vector<std::string> write_outputs(const RunConfig& c, const std::string& stem, CommandResult& res) {
    namespace fs = std::filesystem;
    const fs::path dir = output_dir(c);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::string> paths;
    if (res.table) {
        const fs::path p = dir / (stem + "." + c.format);
        if (c.format == "csv") {
            write_text(p.string(), res.table->csv());
        } else {
            json doc = res.summary;
            doc["rows"] = res.table->to_json();
            write_text(p.string(), doc.dump(1) + "\n");
        }
        paths.push_back(p.string());
    }
    for (const auto& [name, text] : res.extra_files) {
        const fs::path p = dir / (stem + "_" + name);
        write_text(p.string(), text);
        paths.push_back(p.string());
    }
    const fs::path side = dir / (stem + "_summary.json");
    write_text(side.string(), res.summary.dump(1) + "\n");
    paths.push_back(side.string());
    return paths;
}

}  // namespace lht
