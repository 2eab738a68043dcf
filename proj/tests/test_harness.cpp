#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lanemden/harness.hpp"
#include "lanemden/io.hpp"

using namespace lanemden;
namespace h = lanemden::harness;
namespace fs = std::filesystem;
using h::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lanemden_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(LANE_EMDEN_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

json read_json(const fs::path& p) { return json::parse(io::read_text_file(p)); }

}  // namespace

TEST_CASE("config schema is strict") {
  CHECK_NOTHROW(h::parse_config("green", json::object()));
  CHECK_THROWS_WITH_AS(h::parse_config("green", {{"radius", 3}}), doctest::Contains("radius"), h::ConfigError);
  CHECK_THROWS_WITH_AS(h::parse_config("solve", {{"Q", {{"beta", 1}}}}), doctest::Contains("Q.beta"), h::ConfigError);
  CHECK_THROWS_AS(h::parse_config("green", {{"d", "three"}}), h::ConfigError);
  CHECK_THROWS_AS(h::parse_config("green", {{"d", 7}}), h::ConfigError);
  CHECK_THROWS_AS(h::parse_config("green", {{"kind", "torus"}}), h::ConfigError);
  CHECK_THROWS_AS(h::parse_config("nope", json::object()), h::ConfigError);
  const auto cfg = h::parse_config("solve", {{"Q", {{"alpha", 3}}}, {"p", 1.5}});
  CHECK(cfg.values["Q"]["alpha"] == 3);
  CHECK(cfg.values["Q"]["form"] == "power_law");
  for (const auto& c : h::commands()) CHECK(h::defaults(c).contains("output_dir"));
}

TEST_CASE("green command: rows, zero boundary, determinism") {
  const auto out = scratch("green");
  const auto cfg = h::parse_config("green", {{"kind", "half"}, {"d", 3}, {"R", 10.0}, {"pole", {1, 0, 0}},
                                             {"output_dir", out.string()}});
  const auto r1 = h::run(cfg);
  CHECK(r1.checks_passed);
  const auto dom = TruncatedDomain::make(DomainKind::Half, 3, 10);
  const auto rows = csv_rows(out / "green.csv");
  CHECK(static_cast<std::int64_t>(rows.size()) == dom->interior_count() + dom->boundary_count());
  for (const auto& row : rows) {
    if (row.rfind("0,", 0) == 0) CHECK(row.substr(row.rfind(',') + 1) == "0");
  }
  const auto side = read_json(out / "green.csv.json");
  CHECK(side["sha256"] == io::sha256_hex(io::read_text_file(out / "green.csv")));
  CHECK(side["config"]["values"]["R"] == 10.0);
  const auto first = io::read_text_file(out / "green.csv") + io::read_text_file(out / "green.csv.json") +
                     io::read_text_file(out / "green_bounds.json");
  h::run(cfg);
  const auto second = io::read_text_file(out / "green.csv") + io::read_text_file(out / "green.csv.json") +
                      io::read_text_file(out / "green_bounds.json");
  CHECK(first == second);
}

TEST_CASE("json artifacts carry the config and a content hash") {
  const auto out = scratch("classify");
  const auto cfg = h::parse_config("classify", {{"alpha", 1.0}, {"p", 3.5}, {"output_dir", out.string()}});
  h::run(cfg);
  auto j = read_json(out / "classify.json");
  CHECK(j["verdict"] == "Open");
  CHECK(j["config"]["command"] == "classify");
  const std::string hash = j["content_sha256"];
  j.erase("content_sha256");
  CHECK(hash == io::sha256_hex(j.dump()));
}

TEST_CASE("solve dispatch") {
  const auto out = scratch("solve");
  auto cfg = h::parse_config("solve", {{"Q", {{"alpha", 3.0}}}, {"p", 1.5}, {"R", 12.0}, {"output_dir", (out / "a").string()}});
  auto r = h::run(cfg);
  CHECK(r.checks_passed);
  auto j = read_json(out / "a" / "solve.json");
  CHECK(j["path"] == "monotone_solve");
  CHECK(j["monotone"] == true);
  CHECK(j.contains("decay_fit"));
  CHECK(fs::exists(out / "a" / "solve.csv"));

  cfg = h::parse_config("solve", {{"p", 2.0}, {"R", 10.0}, {"output_dir", (out / "b").string()}});
  r = h::run(cfg);
  CHECK_FALSE(r.checks_passed);
  j = read_json(out / "b" / "solve.json");
  CHECK(j["rejected"].get<std::string>().find("2*_{beta,alpha} < 2") != std::string::npos);

  cfg = h::parse_config("solve", {{"p", 7.0}, {"R", 12.0}, {"Q", {{"form", "compact"}, {"radius", 3.0}}},
                                  {"output_dir", (out / "c").string()}});
  r = h::run(cfg);
  CHECK(r.checks_passed);
  j = read_json(out / "c" / "solve.json");
  CHECK(j["path"] == "ground_state_solve");
  CHECK(j["level"].get<double>() > 0);
}

TEST_CASE("sweep rows and merge order") {
  const auto out = scratch("sweep");
  const auto cfg = h::parse_config("sweep", {{"alpha", {{"start", 0.0}, {"stop", 1.0}, {"step", 0.25}}},
                                             {"p", {{"start", 1.5}, {"stop", 5.0}, {"step", 0.5}}},
                                             {"output_dir", out.string()}});
  h::run(cfg);
  const auto rows = csv_rows(out / "sweep.csv");
  CHECK(rows.size() == 5 * 8);
  CHECK(rows.front().rfind("0,1.5,", 0) == 0);
  CHECK(rows.back().rfind("1,5,", 0) == 0);
  const auto first = io::read_text_file(out / "sweep.csv");
  h::run(cfg);
  CHECK(first == io::read_text_file(out / "sweep.csv"));
}

TEST_CASE("bootstrap command") {
  const auto out = scratch("bootstrap");
  auto r = h::run(h::parse_config("bootstrap", {{"q", 2.9}, {"output_dir", out.string()}}));
  CHECK(r.checks_passed);
  CHECK(read_json(out / "bootstrap.json")["j0"] == 2);
  r = h::run(h::parse_config("bootstrap", {{"q", 3.0}, {"output_dir", out.string()}}));
  CHECK_FALSE(r.checks_passed);
}

TEST_CASE("command line front end") {
  const auto out = scratch("cli");
  const auto o = " --output_dir " + out.string();
  CHECK(cli("classify --alpha 1 --p 3.5" + o) == 0);
  CHECK(read_json(out / "classify.json")["verdict"] == "Open");
  CHECK(cli("solve --p 2 --R 8" + o) != 0);
  CHECK(cli("solve --Q.alpha 3 --p 1.5 --R 10" + o) == 0);
  CHECK(cli("classify --no-such-flag 1" + o) != 0);
  {
    std::ofstream cfg(out / "bad.json");
    cfg << R"({"Q": {"zzz": 1}})";
  }
  CHECK(cli("solve --config " + (out / "bad.json").string()) == 2);
  {
    std::ofstream cfg(out / "good.json");
    cfg << R"({"kind": "quadrant", "d": 2, "alpha": 0.5, "p": 3})";
  }
  CHECK(cli("classify --config " + (out / "good.json").string() + " --p 1.5" + o) == 0);
  const auto j = read_json(out / "classify.json");
  CHECK(j["config"]["values"]["p"] == 1.5);
  CHECK(j["config"]["values"]["kind"] == "quadrant");
}
