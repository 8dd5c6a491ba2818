#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "wulffspread/cli.hpp"

using namespace wulffspread;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "wulffspread_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wulffspread");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c = parse_config(
      "[model]\nname = cubic_bistable\ntheta = 0.4\n[grid]\ndim = 1\nspacing = 0.1\n"
      "[run]\nT = 12.5\nobservers = interface, radius\n[verify]\ncontamination_error = false\n");
  CHECK(c.model == "cubic_bistable");
  CHECK(c.theta == 0.4);
  CHECK(c.spacing == 0.1);
  CHECK(c.T == 12.5);
  CHECK(c.observers == std::vector<std::string>{"interface", "radius"});
  CHECK_FALSE(c.contamination_error);

  CHECK_THROWS_AS(parse_config("[model]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[plot]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ndim = two\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = 4.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[verify]\ncontamination_error = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("resolve fills defaults and rejects bad values") {
  RunConfig c;
  RunConfig v = resolve(c, "verify");
  CHECK(v.dim == 2);
  CHECK(v.T == 30.0);
  CHECK(v.half_width == 0.0);
  CHECK(resolve(c, "simulate").half_width == 60.0);
  CHECK(resolve(c, "terrace").T == 200.0);
  CHECK(resolve(c, "speed").dim == 1);
  c.direction = 45.0;
  CHECK(resolve(c, "speed").dim == 2);
  c.dim = 1;
  CHECK_THROWS_AS(resolve(c, "speed"), ConfigError);

  auto bad = [](auto edit) {
    RunConfig b;
    edit(b);
    return b;
  };
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.model = "nope"; }), "speed"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.method = "guess"; }), "speed"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.eps = 1.5; }), "verify"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.angles = 16; }), "wulff"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.initial = "file"; }), "simulate"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.observers = {"camera"}; }), "simulate"), ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.theta = 2.0; b.model = "cubic_bistable"; }), "speed"),
                  ConfigError);
  CHECK_THROWS_AS(resolve(bad([](RunConfig& b) { b.eta_lo = 0.95; }), "verify"), ConfigError);
}

TEST_CASE("resolved config round-trips") {
  for (std::string sub : {"speed", "wulff", "simulate", "verify", "terrace"}) {
    RunConfig c;
    c.model = "ap_time_bistable";
    c.theta = 0.1 + 0.2 / 3.0;
    c.amplitude = 0.05;
    c.spacing = 1.0 / 30.0;
    c.observers = {"interface", "monotonicity"};
    c.initial_file = "some/field.bin";
    c.contamination_error = false;
    RunConfig r = resolve(c, sub);
    std::string text = serialize_config(r);
    CHECK(parse_config(text) == r);
    CHECK(serialize_config(parse_config(text)) == text);
  }
}

TEST_CASE("speed subcommand writes a record and maps exit codes") {
  fs::path dir = scratch("speed");
  std::ostringstream out;
  RunConfig c;
  RunOutcome ok = execute("speed", c, dir.string(), out);
  CHECK(ok.exit_code == exit_pass);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "config.resolved"));
  CHECK(std::abs(ok.summary["results"]["c_star"].get<double>() - 2.0) <= 1e-4);
  auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["status"] == "pass");
  CHECK(parse_config(summary["config"].get<std::string>()) == resolve(c, "speed"));

  // Same config, identical numeric payload.
  fs::path again = scratch("speed_again");
  RunOutcome ok2 = execute("speed", c, again.string(), out);
  CHECK(ok2.summary["results"] == ok.summary["results"]);
  CHECK(slurp(dir / "eigen_trace.csv") == slurp(again / "eigen_trace.csv"));

  RunConfig bistable;
  bistable.model = "cubic_bistable";
  fs::path guard_dir = scratch("guard");
  RunOutcome guard = execute("speed", bistable, guard_dir.string(), out);
  CHECK(guard.exit_code == exit_config_error);
  CHECK(guard.summary["error"].get<std::string>().find("outside KPP") != std::string::npos);
  CHECK(fs::exists(guard_dir / "summary.json"));

  bistable.method = "wave";
  bistable.theta = 0.3;
  RunOutcome wave = execute("speed", bistable, scratch("wave").string(), out);
  CHECK(wave.exit_code == exit_pass);
  CHECK(std::abs(wave.summary["results"]["speed"].get<double>() - 0.4 / std::sqrt(2.0)) <= 1e-5);

  // A horizon this short leaves the front well behind c* = 2.
  RunConfig early;
  early.method = "front";
  early.T = 4.0;
  RunOutcome slow = execute("speed", early, scratch("slow").string(), out);
  CHECK(slow.exit_code == exit_check_failed);
  CHECK(slow.summary["status"] == "fail");
}

TEST_CASE("command line") {
  fs::path root = scratch("cli");
  CHECK(cli({"speed", "--model", "homogeneous_kpp", "--output-root", root.string()}) == exit_pass);
  REQUIRE(std::distance(fs::directory_iterator(root), fs::directory_iterator{}) == 1);
  fs::path run = fs::directory_iterator(root)->path();
  CHECK(run.filename().string().ends_with("-speed"));
  CHECK(fs::exists(run / "summary.json"));

  CHECK(cli({"speed", "--bogus"}) == exit_config_error);
  CHECK(cli({}) == exit_config_error);
  fs::path bad = scratch("bad");
  CHECK(cli({"speed", "--model", "cubic_bistable", "--run-dir", bad.string()}) == exit_config_error);
  CHECK(fs::exists(bad / "summary.json"));

  fs::path cfg = scratch("cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "run.ini") << "[model]\nname = cubic_bistable\ntheta = 0.4\n[run]\nmethod = wave\n";
  fs::path from_file = scratch("from_file");
  CHECK(cli({"speed", "--config", (cfg / "run.ini").string(), "--run-dir", from_file.string()}) == exit_pass);
  auto s = nlohmann::json::parse(slurp(from_file / "summary.json"));
  CHECK(std::abs(s["results"]["speed"].get<double>() - 0.2 / std::sqrt(2.0)) <= 1e-5);
  // Flags override the file.
  fs::path overridden = scratch("overridden");
  CHECK(cli({"speed", "--config", (cfg / "run.ini").string(), "--theta", "0.3", "--run-dir", overridden.string()}) ==
        exit_pass);
  s = nlohmann::json::parse(slurp(overridden / "summary.json"));
  CHECK(std::abs(s["results"]["speed"].get<double>() - 0.4 / std::sqrt(2.0)) <= 1e-5);

  std::ofstream(cfg / "broken.ini") << "[model]\nname = cubic_bistable\nshade = 3\n";
  fs::path broken = scratch("broken");
  CHECK(cli({"speed", "--config", (cfg / "broken.ini").string(), "--run-dir", broken.string()}) == exit_config_error);
  CHECK(fs::exists(broken / "summary.json"));
}

TEST_CASE("run directories do not collide") {
  fs::path root = scratch("dirs");
  std::string a = make_run_dir(root.string(), "wulff");
  fs::create_directories(a);
  std::string b = make_run_dir(root.string(), "wulff");
  CHECK(a != b);
  CHECK(fs::path(a).filename().string().ends_with("-wulff"));
}

TEST_CASE("simulate subcommand continues from a dump") {
  std::ostringstream out;
  RunConfig c;
  c.model = "cubic_bistable";
  c.initial = "front";
  c.T = 10.0;
  c.half_width = 20.0;
  c.observers = {"interface", "monotonicity", "radius"};
  fs::path first = scratch("sim_first");
  RunOutcome r1 = execute("simulate", c, first.string(), out);
  REQUIRE(r1.exit_code == exit_pass);
  CHECK(fs::exists(first / "u_final.bin"));
  CHECK(fs::exists(first / "interface.csv"));
  CHECK(fs::exists(first / "radius.csv"));

  c.initial = "file";
  c.initial_file = (first / "u_final.bin").string();
  c.T = 2.0;
  RunOutcome r2 = execute("simulate", c, scratch("sim_second").string(), out);
  CHECK(r2.exit_code == exit_pass);
  CHECK(r2.summary["results"]["u_max"].get<double>() <= 1.0);
}

TEST_CASE("terrace subcommand rejects heterogeneous media") {
  std::ostringstream out;
  RunConfig c;
  c.model = "sinusoidal_kpp";
  CHECK(execute("terrace", c, scratch("terrace").string(), out).exit_code == exit_config_error);
}
