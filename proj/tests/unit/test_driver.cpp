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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"

#include "helpers.hpp"
#include "qjump/driver.hpp"
#include "qjump/models.hpp"

using namespace qjump;
using namespace qjump::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qjump_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json small_config(const fs::path& out) {
    return {{"name", "small"},
            {"model", {{"name", "two_level"}, {"params", {{"gamma_down", 1.0}, {"gamma_up", 0.2}, {"omega", 1.0}}}}},
            {"initial_state", {{"kind", "fock"}, {"levels", {0, 1}}}},
            {"tau", 1.0},
            {"strategies", {{{"name", "optimal"}}, {{"name", "no_shift"}, {"sampler", {{"max_order", 5}}}}}},
            {"sampler", {{"n_samples", 200}, {"max_order", 3}, {"seed", 4}, {"dt", 0.01}}},
            {"reference", {{"dt", 0.001}}},
            {"output", {{"dir", out.string()}}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QJUMP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_config(const fs::path& path, const json& c) { std::ofstream(path) << c.dump(2); }

}  // namespace

TEST_CASE("config parsing") {
    const fs::path dir = scratch("parse");
    const RunConfig c = parse_config(small_config(dir));
    CHECK(c.model == "two_level");
    CHECK(c.strategies.size() == 2);
    CHECK(c.tau == 1.0);
    CHECK(parse_config(c.to_json()).to_json() == c.to_json());

    json bad = small_config(dir);
    bad["bogus"] = 1;
    CHECK(error_of([&] { parse_config(bad); }) == ErrorCode::Config);
    json dup = small_config(dir);
    dup["strategies"] = {{{"name", "optimal"}}, {{"name", "optimal"}}};
    CHECK(error_of([&] { parse_config(dup); }) == ErrorCode::Config);
    json neg = small_config(dir);
    neg["sampler"]["dt"] = -1.0;
    CHECK(error_of([&] { parse_config(neg); }) == ErrorCode::Config);
    CHECK(error_of([] { load_config("/nonexistent/qjump.cfg"); }) == ErrorCode::Config);
}

TEST_CASE("run writes the artifact set and replays byte-identically") {
    const fs::path dir = scratch("run");
    const RunConfig c = parse_config(small_config(dir / "a"));
    DriverOptions opts;
    const RunOutcome out = execute(c, opts);
    for (const char* f : {"reference_state.json", "reference.csv", "expansion_optimal.csv", "expansion_optimal.qjxd",
                          "report_optimal.csv", "report_no_shift.csv", "manifest.json"})
        CHECK(fs::exists(dir / "a" / f));
    CHECK(out.reports.size() == 2);

    DriverOptions again;
    again.output_dir = (dir / "b").string();
    again.workers = 3;
    replay((dir / "a" / "manifest.json").string(), again);
    for (const char* f : {"report_optimal.csv", "report_no_shift.csv", "expansion_optimal.csv", "reference.csv"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("output directory precedence") {
    const fs::path dir = scratch("precedence");
    const RunConfig c = parse_config(small_config(dir / "config"));
    DriverOptions opts;
    setenv(kOutputDirEnv, (dir / "env").string().c_str(), 1);
    CHECK(resolve_output_dir(c, opts) == (dir / "env").string());
    opts.output_dir = (dir / "flag").string();
    CHECK(resolve_output_dir(c, opts) == (dir / "flag").string());
    unsetenv(kOutputDirEnv);
    CHECK(resolve_output_dir(c, DriverOptions{}) == (dir / "config").string());
}

TEST_CASE("compare emits a combined report") {
    const fs::path dir = scratch("compare");
    json j = small_config(dir);
    j["strategies"] = {{{"name", "optimal"}}, {{"name", "piecewise_constant"}}, {{"name", "index_conditioned"}}};
    DriverOptions opts;
    opts.command = Command::Compare;
    const RunOutcome out = execute(parse_config(j), opts);
    CHECK(out.reports.size() == 3);
    CHECK(fs::exists(dir / "combined.csv"));

    opts.strategies = {"optimal"};
    CHECK(error_of([&] { execute(parse_config(j), opts); }) == ErrorCode::Config);
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("cli");
    CHECK(run_cli("list-models") == 0);
    CHECK(run_cli("list-models --json") == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("") == 2);

    json bad = small_config(dir / "bad_out");
    bad["model"] = "no_such_model";
    write_config(dir / "bad.cfg", bad);
    CHECK(run_cli("run " + (dir / "bad.cfg").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "bad_out"));

    CHECK(run_cli("run " + (dir / "missing.cfg").string()) == 2);

    json trunc = small_config(dir / "trunc_out");
    trunc["model"] = {{"name", "damped_ho"}, {"params", {{"fock_dim", 10}}}};
    trunc["initial_state"] = {{"kind", "fock"}, {"levels", {9}}};
    write_config(dir / "trunc.cfg", trunc);
    CHECK(run_cli("run " + (dir / "trunc.cfg").string()) == 3);

    write_config(dir / "ok.cfg", small_config(dir / "ok_out"));
    CHECK(run_cli("run --quiet " + (dir / "ok.cfg").string()) == 0);
    CHECK(run_cli("compare --quiet --strategies optimal " + (dir / "ok.cfg").string()) == 2);
    CHECK(run_cli("compare --quiet --strategies optimal,no_shift " + (dir / "ok.cfg").string()) == 0);
    CHECK(fs::exists(dir / "ok_out" / "combined.csv"));
    CHECK(run_cli("replay --quiet " + (dir / "ok_out" / "manifest.json").string()) == 0);
}

TEST_CASE("catalog through the CLI library surface") {
    const json j = catalog_json(false);
    std::set<std::string> names;
    for (const auto& m : j["models"]) names.insert(m["name"].get<std::string>());
    CHECK(names == std::set<std::string>{"damped_ho", "qbm", "colldec", "measure_fb"});
}
