#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hslg/cli.hpp"
#include "hslg/errors.hpp"

using namespace hslg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int c = run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

fs::path tmpdir() {
  const fs::path d = fs::temp_directory_path() / ("hslg_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto m = parse_config_text("# comment\ntheta = 2\n\nwalk-samples = 10  # trailing\n");
  CHECK(m.at("theta").value == "2");
  CHECK(m.at("theta").line == 2);
  CHECK(m.at("walk_samples").value == "10");
  CHECK(m.at("walk_samples").line == 4);
  try {
    parse_config_text("theta = 1\nfoo = 3\n");
    FAIL("no throw");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("theta = 1\ntheta = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("theta =\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("theta\n"), ParseError);
}

TEST_CASE("flags override the config file") {
  const fs::path d = tmpdir();
  put(d / "c.cfg", "n = 64\nseed = 5\n");
  const Run r = run({"env", "gen", "--config", (d / "c.cfg").string(), "--n", "3", "--out", (d / "e.env").string()});
  REQUIRE(r.code == 0);
  const std::string env = slurp(d / "e.env");
  CHECK(env.find("\nn=3\n") != std::string::npos);
  CHECK(env.find("\nseed=5\n") != std::string::npos);
  const Run chk = run({"env", "check", (d / "e.env").string()});
  CHECK(chk.code == 0);
  put(d / "bad.env", slurp(d / "e.env").substr(0, 150));
  CHECK(run({"env", "check", (d / "bad.env").string()}).code == 1);
  fs::remove_all(d);
}

TEST_CASE("exit codes and messages") {
  const fs::path d = tmpdir();
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
  const Run miss = run({"experiment", "pinning", "--sizes", "8"});
  CHECK(miss.code == 2);
  CHECK(miss.err.find("--out") != std::string::npos);
  put(d / "a.cfg", "theta = 1\nalpha = 0.5\n");
  const Run ph = run({"experiment", "pinning", "--config", (d / "a.cfg").string(), "--out", (d / "x.csv").string()});
  CHECK(ph.code == 2);
  CHECK(ph.err.find("alpha < 0") != std::string::npos);
  put(d / "u.cfg", "theta = 1\nfoo = 2\n");
  const Run uk = run({"verify", "identity", "--config", (d / "u.cfg").string()});
  CHECK(uk.code == 2);
  CHECK(uk.err.find("line 2") != std::string::npos);
  CHECK(run({"--version"}).code == 0);
  fs::remove_all(d);
}

TEST_CASE("verify identity example") {
  const Run r = run({"verify", "identity", "--n", "5", "--envs", "50", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS", 0) == 0);
  const Run l = run({"verify", "lgv", "--n", "4", "--k", "2", "--envs", "3"});
  CHECK(l.code == 0);
}

TEST_CASE("experiment outputs and determinism") {
  const fs::path d = tmpdir();
  const std::vector<std::string> base{"experiment", "pinning", "--sizes", "8,12", "--samples", "30", "--resamples", "50", "--seed", "3"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  const Run a = run(with({"--out", (d / "a.csv").string()}));
  const Run b = run(with({"--out", (d / "b.csv").string(), "--threads", "3"}));
  CHECK(a.code != 2);
  CHECK(a.code == b.code);
  CHECK(fs::exists(d / "a.csv.meta"));
  CHECK(fs::exists(d / "a.json"));
  const std::string csv = slurp(d / "a.csv");
  CHECK(csv.rfind("N,k,median_tail,upper_q95_tail\n", 0) == 0);
  CHECK(csv == slurp(d / "b.csv"));
  CHECK(a.out.find("tail_at_k0_is_one") != std::string::npos);
  const std::string meta = slurp(d / "a.csv.meta");
  CHECK(meta.find("\"seed\"") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("seed from environment variable") {
  const fs::path d = tmpdir();
  ::setenv("HSLG_LAB_SEED", "42", 1);
  REQUIRE(run({"env", "gen", "--n", "2", "--out", (d / "e.env").string()}).code == 0);
  ::unsetenv("HSLG_LAB_SEED");
  CHECK(slurp(d / "e.env").find("\nseed=42\n") != std::string::npos);
  REQUIRE(run({"env", "gen", "--n", "2", "--out", (d / "f.env").string()}).code == 0);
  CHECK(slurp(d / "f.env").find("\nseed=1\n") != std::string::npos);
  fs::remove_all(d);
}
