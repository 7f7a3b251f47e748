#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rsk/cli/experiment.hpp"
#include "rsk/error.hpp"

using namespace rsk;
using cli::Json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rsk_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RSK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Json small_trace() {
  return Json::parse(R"({
    "domain": {"case": "interval", "b": 1, "alpha_bar": "dirichlet", "beta_bar": 0},
    "noise": {"preset": "bounded_gaussian"},
    "t_list": [0.3, 0.6], "n_paths": 8, "seed": 11
  })");
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "bogus": 2})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "noise": {"preset": "pink"}})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "noise": {"hurst": 0.7}})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::object()), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": -3})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "t_list": [0.5, -1]})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "n_paths": "many"})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("trace", Json::parse(R"({"seed": 1, "domain": {"case": "circle"}})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("lt-scaling", Json::parse(R"({"seed": 1, "q": 3})")), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("spectrum", Json::parse(R"({"subcommand": "airy"})")), ConfigError);

  const auto airy = cli::parse_config("airy", Json::object());
  CHECK(airy.t_list == std::vector<double>{0.25, 0.5, 1.0, 2.0});
  CHECK_FALSE(airy.echo.contains("domain"));

  cli::Overrides ov;
  ov.t_list = std::vector<double>{0.1, 0.2, 0.3, 0.4};
  ov.seed = 5;
  ov.threads = 3;
  const auto c = cli::parse_config("variance-scan", Json::parse(R"({"seed": 1, "t_list": [0.9]})"), ov);
  CHECK(c.t_list == *ov.t_list);
  CHECK(*c.seed == 5);
  CHECK(c.threads == 3);
  CHECK(c.echo["noise"]["preset"] == "white");
  CHECK(c.echo["potential"]["preset"] == "zero");
}

TEST_CASE("list parsing and error records") {
  CHECK(cli::parse_list("0.25,0.5, 1") == std::vector<double>{0.25, 0.5, 1.0});
  CHECK_THROWS_AS(cli::parse_list("0.25,abc"), InputError);
  CHECK_THROWS_AS(cli::parse_list(""), InputError);
  const auto j = Json::parse(cli::error_json("config", "bad \"value\"\nhere"));
  CHECK(j["error"]["kind"] == "config");
  CHECK(j["error"]["message"] == "bad \"value\"\nhere");
}

TEST_CASE("airy subcommand") {
  const auto a = cli::run(cli::parse_config("airy", Json::object()));
  REQUIRE(a.tables.size() == 1);
  const auto& t = a.tables[0];
  CHECK(t.columns == std::vector<std::string>{"t", "closed_form", "quadrature", "rel_diff"});
  REQUIRE(t.rows.size() == 4);
  for (const auto& r : t.rows) CHECK(r[3] < 1e-6);
}

TEST_CASE("runs are reproducible across repeats and thread counts") {
  auto raw = small_trace();
  const auto one = cli::run(cli::parse_config("trace", raw));
  const auto again = cli::run(cli::parse_config("trace", raw));
  raw["threads"] = 3;
  const auto three = cli::run(cli::parse_config("trace", raw));
  REQUIRE(one.tables.size() == 1);
  CHECK(cli::format_csv(one.tables[0]) == cli::format_csv(again.tables[0]));
  CHECK(cli::format_csv(one.tables[0]) == cli::format_csv(three.tables[0]));
  raw["seed"] = 12;
  CHECK(cli::format_csv(one.tables[0]) != cli::format_csv(cli::run(cli::parse_config("trace", raw)).tables[0]));

  const auto lt = Json::parse(R"({"n_paths": 200, "seed": 4})");
  auto lt3 = lt;
  lt3["threads"] = 2;
  CHECK(cli::format_csv(cli::run(cli::parse_config("lt-scaling", lt)).tables[0]) ==
        cli::format_csv(cli::run(cli::parse_config("lt-scaling", lt3)).tables[0]));
}

TEST_CASE("artifacts on disk") {
  const auto dir = scratch("artifacts");
  auto raw = small_trace();
  raw["out"] = dir.string();
  const auto cfg = cli::parse_config("trace", raw);
  const auto written = cli::write_artifacts(cfg, cli::run(cfg));
  REQUIRE(written.size() == 2);
  const auto csv = slurp(dir / "trace.csv");
  const auto side = slurp(dir / "trace.json");
  CHECK(csv.rfind("t,mean,stderr_mean,variance,stderr_variance,n_paths,n_pairs\n", 0) == 0);
  const auto j = Json::parse(side);
  CHECK(j["tool"] == "rsk");
  CHECK(j["config"]["seed"] == 11);
  CHECK(j["files"].size() == 1);
  CHECK(j["config_digest"].get<std::string>().size() == 16);

  cli::write_artifacts(cfg, cli::run(cfg));
  CHECK(slurp(dir / "trace.csv") == csv);
  CHECK(slurp(dir / "trace.json") == side);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
  fs::remove_all(dir);
}

TEST_CASE("executable exit codes") {
  const auto dir = scratch("exe");
  CHECK(run_cli("airy --t 0.5,1 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "airy.csv"));
  CHECK(fs::exists(dir / "airy.json"));

  const auto bad_dir = scratch("exe_bad");
  fs::create_directories(dir / "cfg");
  std::ofstream(dir / "cfg" / "broken.json") << "{\"seed\": 1,";
  std::ofstream(dir / "cfg" / "unknown.json") << R"({"seed": 1, "noise": {"preset": "pink"}})";
  CHECK(run_cli("trace --config " + (dir / "cfg" / "broken.json").string() + " --out " + bad_dir.string()) == 2);
  CHECK(run_cli("trace --config " + (dir / "cfg" / "unknown.json").string() + " --out " + bad_dir.string()) == 2);
  CHECK(run_cli("trace --out " + bad_dir.string()) == 2);
  CHECK(run_cli("airy --t 0.01 --out " + bad_dir.string()) == 2);
  CHECK(run_cli("--no-such-flag") == 2);
  CHECK(run_cli("") == 2);
  CHECK_FALSE(fs::exists(bad_dir));
  fs::remove_all(dir);
}
