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

#include <CLI11.hpp>
#include <iostream>

#include "lht/cli.hpp"

namespace {

// Raw flag values; only the ones given on the command line override the
// config file.
struct Flags {
    std::string config;
    int d = 0;
    double lambda = 0;
    std::vector<double> spectrum;
    std::vector<int> dims;
    double r_min = 0, r_max = 0;
    int r_points = 0;
    std::vector<int> n_grid;
    int n = 0;
    double eps = 0, r = 0;
    std::string suite, kind, input, output_dir, format;
    std::uint64_t seed = 0;
    int samples = 0;
    std::vector<double> weights, values;
    double threshold = 0;
    std::string side;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "flat JSON config file");
    sub->add_option("--d", f.d, "dimension for the lambda shorthand");
    sub->add_option("--lambda", f.lambda, "lambda for the shorthand state");
    sub->add_option("--spectrum", f.spectrum, "explicit Schmidt coefficients")->delimiter(',');
    sub->add_option("--dims", f.dims, "local dimensions d_A,d_B")->delimiter(',')->expected(2);
    sub->add_option("--r-min", f.r_min);
    sub->add_option("--r-max", f.r_max);
    sub->add_option("--r-points", f.r_points);
    sub->add_option("--n-grid", f.n_grid)->delimiter(',');
    sub->add_option("--n", f.n);
    sub->add_option("--eps", f.eps);
    sub->add_option("--r", f.r);
    sub->add_option("--suite", f.suite);
    sub->add_option("--kind", f.kind, "hoeffding | zero-error | stein");
    sub->add_option("--input", f.input, "collection JSON to evaluate");
    sub->add_option("--output-dir", f.output_dir);
    sub->add_option("--format", f.format, "csv | json");
    sub->add_option("--seed", f.seed);
    sub->add_option("--samples", f.samples);
    sub->add_option("--weights", f.weights)->delimiter(',');
    sub->add_option("--values", f.values)->delimiter(',');
    sub->add_option("--threshold", f.threshold, "per-copy tail threshold R");
    sub->add_option("--side", f.side, "ge | le");
}

lht::RunConfig make_config(const CLI::App* sub, const Flags& f) {
    lht::RunConfig c;
    if (!f.config.empty()) c = lht::config_from_json(lht::json::parse(lht::read_text(f.config)));
    auto set = [&](const char* name) { return sub->count(name) > 0; };
    if (set("--d")) c.d = f.d;
    if (set("--lambda")) c.lambda = f.lambda;
    if (set("--spectrum")) c.spectrum = f.spectrum;
    if (set("--dims")) {
        c.dim_a = f.dims[0];
        c.dim_b = f.dims[1];
    }
    if (set("--r-min")) c.r_min = f.r_min;
    if (set("--r-max")) c.r_max = f.r_max;
    if (set("--r-points")) c.r_points = f.r_points;
    if (set("--n-grid")) c.n_grid = f.n_grid;
    if (set("--n")) c.n = f.n;
    if (set("--eps")) c.eps = f.eps;
    if (set("--r")) c.r = f.r;
    if (set("--suite")) c.suite = f.suite;
    if (set("--kind")) c.kind = f.kind;
    if (set("--input")) c.input = f.input;
    if (set("--output-dir")) c.output_dir = f.output_dir;
    if (set("--format")) c.format = f.format;
    if (set("--seed")) c.seed = f.seed;
    if (set("--samples")) c.samples = f.samples;
    if (set("--weights")) c.weights = f.weights;
    if (set("--values")) c.values = f.values;
    if (set("--threshold")) c.threshold = f.threshold;
    if (set("--side")) c.side = f.side;
    lht::require(c.format == "csv" || c.format == "json", "format must be csv or json");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local hypothesis testing: error exponents and finite-n checks"};
    app.require_subcommand(1);
    Flags flags;
    using Cmd = lht::CommandResult (*)(const lht::RunConfig&);
    const std::vector<std::tuple<const char*, const char*, Cmd>> cmds = {
        {"figure", "one-way and two-way Hoeffding curves as CSV", lht::cmd_figure},
        {"global", "global-POVM closed forms", lht::cmd_global},
        {"verify", "run a verification suite", lht::cmd_verify},
        {"protocol", "build, serialize and evaluate a measure collection", lht::cmd_protocol},
        {"sep", "separable sandwich sweep", lht::cmd_sep},
        {"tail", "Bahadur-Rao tail approximation against the exact tail", lht::cmd_tail},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, fn] : cmds) subs.push_back(app.add_subcommand(name, help));
    for (auto* s : subs) add_common(s, flags);
    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        const char* name = std::get<0>(cmds[i]);
        try {
            const auto cfg = make_config(subs[i], flags);
            auto res = std::get<2>(cmds[i])(cfg);
            const auto paths = lht::write_outputs(cfg, name, res);
            res.summary["files"] = paths;
            std::cout << res.summary.dump(1) << "\n";
            return res.ok ? 0 : 1;
        } catch (const std::exception& e) {
            std::cerr << "lht " << name << ": " << e.what() << "\n";
            return 2;
        }
    }
    return 2;
}
