#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "equidist/cli.hpp"

using namespace equidist;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = dispatch(args, o, e);
  return {code, o.str(), e.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("alpha parsing") {
  CHECK(parse_alpha({"0.5"}, 1)[0].raw == UnitFrac::kHalf);
  CHECK(parse_alpha({"golden"}, 1)[0] == golden_frac());
  const AlphaVec two = parse_alpha({"0.25,silver"}, 2);
  CHECK(two.dim() == 2);
  CHECK(two[1] == silver_frac());
  CHECK(parse_alpha({"random:7"}, 3) == AlphaVec::random(7, 3));
  CHECK(parse_alpha({"0x80000000000000000000000000000000"}, 1)[0].raw == UnitFrac::kHalf);
  CHECK_THROWS_AS(parse_alpha({"1.5"}, 1), std::invalid_argument);
  CHECK(parse_alpha({"0.5,0.25"}, 1).dim() == 2);  // dimension comes from the tokens
  CHECK_THROWS_AS(parse_alpha({"pi"}, 1), std::invalid_argument);
}

TEST_CASE("single point discrepancy") {
  const Run r = run({"discrepancy", "--alpha", "0.5", "--N", "1"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "discrepancy");
  CHECK(j["result"]["delta"].get<double>() == 0.5);
}

TEST_CASE("growth table") {
  const Run r = run({"growth", "--d", "2", "--seeds", "1", "--nmax", "16", "--no-timing"});
  REQUIRE(r.code == kExitOk);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "alpha_seed,d,N,delta,normalizer,ratio,exponent,wall_ms");
  CHECK(lines[1].rfind("0,2,16,", 0) == 0);
  CHECK(lines[1].substr(lines[1].size() - 2) == ",0");
}

TEST_CASE("validate reports a passing recombination") {
  const Run r = run({"validate", "--alpha", "random:42", "--N", "32", "--x", "0.3"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["result"]["recombination"]["pass"].get<bool>());
  CHECK(j["result"]["dual_path"]["pass"].get<bool>());
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"discrepancy", "--N", "4"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"discrepancy", "--alpha", "2.5", "--N", "4"}).code == kExitUsage);
  const Run big = run({"discrepancy", "--alpha", "random:1", "--d", "3", "--N", "100000"});
  CHECK(big.code == kExitBudget);
  CHECK_FALSE(big.err.empty());
  CHECK(run({"discrepancy", "--alpha", "golden", "--N", "1000", "--budget", "10"}).code == kExitBudget);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("every subcommand runs") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"discrepancy", "--alpha", "golden", "--N", "20", "--x", "0.4", "--format", "csv"},
           {"average", "--alpha", "0.3,0.7", "--N", "8", "--x", "0.5"},
           {"fourier", "--alpha", "golden", "--N", "16", "--x", "0.3", "--component", "all", "--s", "2", "--relaxed"},
           {"fourier", "--alpha", "golden", "--N", "16", "--x", "0.3", "--component", "pairs", "--s", "1", "--relaxed"},
           {"spectrum", "--alpha", "golden", "--M", "1000"},
           {"boxes", "--alpha", "golden", "--N", "64"},
           {"census", "--alpha", "golden", "--N", "64"},
       }) {
    const Run r = run(args);
    INFO(args[0]);
    CHECK(r.code == kExitOk);
    CHECK_FALSE(r.out.empty());
  }
}
