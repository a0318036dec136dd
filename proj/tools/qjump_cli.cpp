// Copyright 2026 The qjump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qjump/driver.hpp"

namespace {

void print_summary(const qjump::RunOutcome& out) {
    if (out.analytic_fidelity)
        std::printf("reference vs analytic fidelity: %.12f\n", *out.analytic_fidelity);
    for (const auto& r : out.reports) {
        std::printf("%s\n  k  fidelity    cum_weight\n", r.strategy.c_str());
        for (std::size_t i = 0; i < r.k_values.size(); ++i)
            std::printf("  %-2zu %.6f  %.6f\n", r.k_values[i], r.fidelity[i], r.cumulative_weights[i]);
    }
    std::printf("artifacts written to %s\n", out.output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qjump: jump expansions of Markovian master equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QJUMP_VERSION);

    std::string config_path, manifest_path, strategies_arg, output_dir;
    std::size_t workers = 0;
    bool as_json = false, show_all = false, quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", workers, "worker threads (results do not depend on this)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--output-dir", output_dir, "output directory (overrides QJUMP_OUTPUT_DIR and the config)");
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    };

    CLI::App* run = app.add_subcommand("run", "run the strategies of a config");
    run->add_option("config", config_path, "config file")->required();
    add_common(run);

    CLI::App* compare = app.add_subcommand("compare", "compare strategies on one reference propagation");
    compare->add_option("config", config_path, "config file")->required();
    compare->add_option("--strategies", strategies_arg, "comma-separated strategy names");
    add_common(compare);

    CLI::App* list = app.add_subcommand("list-models", "print the model catalog");
    list->add_flag("--json", as_json, "machine-readable schema");
    list->add_flag("--all", show_all, "include auxiliary test models");

    CLI::App* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    add_common(replay);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (list->parsed()) {
            if (as_json)
                std::cout << qjump::catalog_json(show_all).dump(2) << '\n';
            else
                std::cout << qjump::catalog_text(show_all);
            return 0;
        }

        qjump::DriverOptions opts;
        if (workers > 0) opts.workers = workers;
        if (!output_dir.empty()) opts.output_dir = output_dir;
        if (!quiet) opts.log = &std::cerr;

        qjump::RunOutcome out;
        if (replay->parsed()) {
            out = qjump::replay(manifest_path, opts);
        } else {
            const qjump::RunConfig config = qjump::load_config(config_path);
            if (compare->parsed()) {
                opts.command = qjump::Command::Compare;
                std::string item;
                for (char c : strategies_arg + ",") {
                    if (c == ',') {
                        if (!item.empty()) opts.strategies.push_back(item);
                        item.clear();
                    } else if (c != ' ') {
                        item += c;
                    }
                }
            }
            out = qjump::execute(config, opts);
        }
        print_summary(out);
        return 0;
    } catch (const qjump::Error& e) {
        std::fprintf(stderr, "qjump: %s\n", e.what());
        return qjump::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qjump: %s\n", e.what());
        return 1;
    }
}
