// Copyright 2026 The Photocount Authors
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

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "photocount/config.hpp"
#include "photocount/errors.hpp"
#include "photocount/pump.hpp"
#include "photocount/results.hpp"
#include "photocount/waveform.hpp"

using namespace photocount;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("photocount-test-" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out, err;
  double seconds = 0.0;
};

Run cli(const Scratch& s, const std::string& args) {
  const auto out = s.dir / "stdout.txt";
  const auto err = s.dir / "stderr.txt";
  const std::string cmd = "cd '" + s.dir.string() + "' && env -u PHOTOCOUNT_RESULTS_DIR '" +
                          PHOTOCOUNT_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  Run r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<fs::path> entries(const fs::path& dir) {
  std::vector<fs::path> v;
  if (!fs::exists(dir)) return v;
  for (const auto& e : fs::directory_iterator(dir)) v.push_back(e.path());
  std::sort(v.begin(), v.end());
  return v;
}

bool has_temp_dirs(const fs::path& dir) {
  for (const auto& p : entries(dir))
    if (p.filename().string().rfind(".tmp-", 0) == 0) return true;
  return false;
}

}  // namespace

// ---- config ---------------------------------------------------------------

TEST_CASE("shipped config resolves to the built-in defaults") {
  auto shipped = config::load(std::string(PHOTOCOUNT_SOURCE_DIR) + "/config/default.json");
  CHECK(shipped.hash() == config::defaults().hash());
  CHECK(shipped.resolved() == config::defaults().resolved());
  CHECK(shipped.hash().size() == 16);
}

TEST_CASE("units are converted on load") {
  auto c = config::parse(R"({"device": {"chi_over_2pi_mhz": 1.0, "t1_memory_us": 2.0,
                                        "readout_duration_ns": 100}})");
  CHECK(std::abs(c.device.chi - 2 * M_PI * 1e6) < 1e-6);
  CHECK(std::abs(c.device.T1_m - 2e-6) < 1e-18);
  CHECK(std::abs(c.device.readout_duration - 100e-9) < 1e-20);
  CHECK(c.resolved()["device"]["chi_over_2pi_mhz"] == 1.0);

  auto off = config::parse(R"({"device": {"t1_qubit_us": null}})");
  CHECK(std::isinf(off.device.T1_q));
}

TEST_CASE("schema violations are config errors") {
  CHECK_THROWS_AS(config::parse(R"({"device": {"chi_mhz": 3}})"), ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"devices": {}})"), ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"device": {"t1_qubit_us": -1}})"), ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"protocol": {"n_questions": 5}})"), ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"protocol": {"flip_encoding": [true]}})"), ConfigError);
  CHECK_THROWS_AS(config::parse(R"({"run": {"sweep": {"parameter": "T3"}}})"), ConfigError);
  CHECK_THROWS_AS(config::parse("{ not json"), ConfigError);
  CHECK_THROWS_AS(config::load("/nonexistent/photocount.json"), IoError);
  try {
    config::parse(R"({"numerics": {"n_maxx": 3}})");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("numerics.n_maxx") != std::string::npos);
  }
}

TEST_CASE("hash ignores where results go and how many threads compute them") {
  auto a = config::parse(R"({"numerics": {"threads": 4}, "io": {"output_dir": "x", "cache": false}})");
  CHECK(a.hash() == config::defaults().hash());
  auto b = config::parse(R"({"numerics": {"n_max": 31}})");
  CHECK(b.hash() != config::defaults().hash());
}

// ---- result store --------------------------------------------------------

TEST_CASE("result store commits atomically and never overwrites") {
  Scratch s;
  const auto root = s.dir / "store";
  {
    results::Writer w(root, "demo", "abc", nlohmann::json{{"x", 1}});
    w.add_file("a.txt", "hello");
    // dropped without commit: nothing may remain
  }
  CHECK_FALSE(has_temp_dirs(root));
  CHECK_FALSE(results::lookup(root, "demo", "abc").has_value());

  results::Writer w1(root, "demo", "abc", nlohmann::json{{"x", 1}});
  w1.add_file("a.txt", "hello");
  auto first = w1.commit({{"metric", 2.5}});
  CHECK(first.dir.filename() == "demo-abc");
  CHECK(slurp(first.dir / "a.txt") == "hello");
  const std::string manifest = slurp(first.manifest);
  auto m = nlohmann::json::parse(manifest);
  CHECK(m["kind"] == "demo");
  CHECK(m["key"] == "abc");
  CHECK(m["config"]["x"] == 1);
  CHECK(m["summary"]["metric"] == 2.5);

  auto found = results::lookup(root, "demo", "abc");
  REQUIRE(found.has_value());
  CHECK(found->dir == first.dir);

  results::Writer w2(root, "demo", "abc", nlohmann::json{{"x", 1}});
  w2.add_file("a.txt", "again");
  auto second = w2.commit({{"metric", 3.0}});
  CHECK(second.dir.filename() == "demo-abc-r2");
  CHECK(slurp(first.manifest) == manifest);
  CHECK(slurp(first.dir / "a.txt") == "hello");
  CHECK_FALSE(has_temp_dirs(root));

  std::ifstream index(root / "index.jsonl");
  int lines = 0;
  for (std::string line; std::getline(index, line);) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("waveform CSV round trip is bit-identical") {
  Scratch s;
  auto w = pump::sech_input(52e-9, 400e-9, 0.5e-9);
  write_waveform_csv((s.dir / "w.csv").string(), w);
  auto back = read_waveform_csv((s.dir / "w.csv").string());
  REQUIRE(back.size() == w.size());
  CHECK(back.t0 == w.t0);
  CHECK(back.dt == w.dt);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(back.samples[i] == w.samples[i]);

  try {
    parse_waveform_csv("# dt = 1e-9\nre,im\n1,0\n");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("t0") != std::string::npos);
  }
  try {
    parse_waveform_csv("# t0 = 0\n# dt = 1e-9\nre,im\n1,0\n1;0\n");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

// ---- command line --------------------------------------------------------

TEST_CASE("validate-config") {
  Scratch s;
  auto ok = cli(s, "validate-config -c '" + std::string(PHOTOCOUNT_SOURCE_DIR) + "/config/default.json'");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("\"chi_over_2pi_mhz\": 3.28") != std::string::npos);
  CHECK(ok.out.find("validate-config: ok") != std::string::npos);

  s.write("bad.json", R"({"device": {"bogus_khz": 1}})");
  auto bad = cli(s, "validate-config -c bad.json");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("device.bogus_khz") != std::string::npos);

  auto missing = cli(s, "validate-config -c nowhere.json");
  CHECK(missing.code == 3);

  auto usage = cli(s, "count --no-such-flag");
  CHECK(usage.code == 1);
  auto unknown = cli(s, "frobnicate");
  CHECK(unknown.code == 1);
}

TEST_CASE("synth-pump round trip from a CSV input") {
  Scratch s;
  write_waveform_csv((s.dir / "sech52ns.csv").string(),
                               pump::sech_input(52e-9, 600e-9, 0.1e-9));
  auto r = cli(s, "synth-pump --input sech52ns.csv -o out");
  REQUIRE(r.code == 0);
  auto dirs = entries(s.dir / "out");
  fs::path run;
  for (const auto& d : dirs)
    if (fs::is_directory(d)) run = d;
  REQUIRE(!run.empty());
  CHECK(fs::exists(run / "pump.csv"));
  auto report = nlohmann::json::parse(slurp(run / "report.json"));
  CHECK(report["residual_fraction"].get<double>() < 1e-4);
  auto pump_wave = read_waveform_csv((run / "pump.csv").string());
  CHECK(pump_wave.size() > 0);
}

TEST_CASE("numerical and file failures leave no partial results") {
  Scratch s;
  s.write("short.json", R"({"run": {"pump": {"sigma_ns": 3.0}}})");
  auto narrow = cli(s, "synth-pump -c short.json -o out");
  CHECK(narrow.code == 2);
  CHECK(narrow.err.find("bandwidth") != std::string::npos);

  s.write("broken.csv", "# t0 = 0\n# dt = 1e-9\nre,im\n0.1,0\nzero,0\n");
  auto broken = cli(s, "synth-pump --input broken.csv -o out");
  CHECK(broken.code == 3);
  CHECK(broken.err.find("line 5") != std::string::npos);

  auto absent = cli(s, "synth-pump --input absent.csv -o out");
  CHECK(absent.code == 3);

  for (const auto& p : entries(s.dir / "out")) CHECK_FALSE(fs::is_directory(p));
}

TEST_CASE("ideal confusion prints the identity") {
  Scratch s;
  auto r = cli(s, "confusion --ideal -o out");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("|0>  1.00000  0.00000  0.00000  0.00000") != std::string::npos);
  CHECK(r.out.find("|3>  0.00000  0.00000  0.00000  1.00000") != std::string::npos);
}

TEST_CASE("cache hits, --force and --no-cache") {
  Scratch s;
  auto first = cli(s, "count -o out");
  REQUIRE(first.code == 0);
  auto dirs = entries(s.dir / "out");
  REQUIRE(dirs.size() == 2);  // the run and index.jsonl
  const fs::path run = dirs[0];
  const std::string manifest = slurp(run / "manifest.json");

  auto again = cli(s, "count -o out");
  CHECK(again.code == 0);
  CHECK(again.seconds < 1.0);
  CHECK(again.out.find("[cached]") != std::string::npos);
  CHECK(again.out.find(run.filename().string()) != std::string::npos);
  CHECK(entries(s.dir / "out").size() == 2);

  // threads do not change results, so they do not change the key either
  auto threads = cli(s, "count --threads 2 -o out");
  CHECK(threads.out.find("[cached]") != std::string::npos);

  auto forced = cli(s, "count --force -o out");
  CHECK(forced.code == 0);
  CHECK(forced.out.find("[cached]") == std::string::npos);
  CHECK(fs::exists(run.string() + "-r2"));
  CHECK(slurp(run / "manifest.json") == manifest);
  // branch mode is deterministic
  CHECK(slurp(run / "counting_curve.csv") == slurp(run.string() + "-r2/counting_curve.csv"));
  CHECK_FALSE(has_temp_dirs(s.dir / "out"));

  auto seeded = cli(s, "count --mode monte-carlo --seed 5 -o out");
  CHECK(seeded.code == 0);
  CHECK(seeded.out.find("[cached]") == std::string::npos);
}
