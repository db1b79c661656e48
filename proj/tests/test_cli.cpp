#include "harmonic/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using harmonic::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::pair<long, double>> pmf_rows(const std::string& csv, double* deficit = nullptr) {
  std::vector<std::pair<long, double>> rows;
  std::istringstream s(csv);
  std::string line;
  while (std::getline(s, line)) {
    if (line.rfind("# deficit=", 0) == 0 && deficit) *deficit = std::stod(line.substr(10));
    if (line.empty() || line[0] == '#' || line == "index,probability") continue;
    const auto comma = line.find(',');
    rows.emplace_back(std::stol(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace

TEST_CASE("pmf-s csv") {
  const Result r = call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "2", "--format", "csv"});
  CHECK(r.code == 0);
  const auto rows = pmf_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].second == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(rows[1].second == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rows[2].second == doctest::Approx(1.0 / 6).epsilon(1e-15));
  // 17 significant digits.
  CHECK(r.out.find("0.33333333333333337") != std::string::npos);
  for (const char* method : {"stirling", "generalized"}) {
    const Result m = call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "2", "--method", method});
    CHECK(m.code == 0);
    CHECK(pmf_rows(m.out)[1].second == doctest::Approx(0.5));
  }
  const Result d = call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "4", "--alpha", "0.5", "--method", "dobinski"});
  CHECK(d.code == 0);
}

TEST_CASE("invalid parameters exit 2") {
  const Result r = call({"pmf-s", "--w1", "0", "--w2", "1", "--n", "2"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(call({"pmf-s", "--w2", "1", "--n", "2"}).code == 2);
  CHECK(call({"pmf-s", "--w1", "abc", "--w2", "1", "--n", "2"}).code == 2);
  CHECK(call({"nope"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "2", "--format", "xml"}).code == 2);
  CHECK(call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "3", "--alpha", "0.5", "--method", "stirling"}).code == 2);
  CHECK(call({"simulate", "trials", "--w1", "1", "--w2", "1", "--n", "5"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("pmf outputs sum to one or carry a deficit line") {
  const std::vector<std::vector<std::string>> commands{
      {"pmf-s", "--w1", "0.3", "--w2", "2.6", "--n", "40"},
      {"pmf-k", "--w1", "1", "--w2", "1", "--l", "2", "--n-max", "30"},
      {"pmf-k", "--w1", "1", "--w2", "1", "--l", "2", "--n-max", "30", "--excess"},
      {"gap", "--w1", "2", "--w2", "1", "--l", "2", "--i-max", "20"},
      {"first-success", "--w1", "1.5", "--w2", "1", "--k-max", "25"},
      {"disaster", "--w1", "2", "--w2", "1", "--alpha", "1", "--query", "invariant", "--n-max", "50"},
      {"species", "--w1", "1", "--w2", "2", "--query", "marginal", "--n", "7"},
  };
  for (const auto& cmd : commands) {
    const Result r = call(cmd);
    CHECK(r.code == 0);
    double deficit = -1.0;
    const auto rows = pmf_rows(r.out, &deficit);
    double total = 0.0;
    for (const auto& row : rows) total += row.second;
    if (deficit < 0.0) {
      CHECK(std::abs(total - 1.0) <= 1e-9);
    } else {
      CHECK(std::abs(total + deficit - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("json pmf") {
  const Result r = call({"pmf-k", "--w1", "1", "--w2", "0", "--l", "2", "--n-max", "10", "--format", "json"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["offset"] == 1);
  CHECK(j["probabilities"][2].get<double>() == doctest::Approx(1.0 / 6));
  CHECK(j["deficit"].get<double>() == doctest::Approx(0.1));
}

TEST_CASE("estimate-seq exact case") {
  const Result r = call({"estimate-seq", "--constraint", "w2=0", "--format", "json"}, "# three trials\n1 1\n0\n");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["w1_hat"].get<double>() - std::sqrt(2.0)) <= 1e-9);
  CHECK(j["converged"] == true);
  CHECK(j["boundary"] == "none");
  CHECK(j["n"] == 3);
  CHECK(j["k"] == 2);

  const std::string path = "cli_bits_test.txt";
  std::ofstream(path) << "1 0 1\n";
  const Result f = call({"estimate-seq", "--input", path, "--constraint", "w2=0", "--format", "json"});
  std::remove(path.c_str());
  CHECK(f.code == 0);
  CHECK(std::abs(json::parse(f.out)["w1_hat"].get<double>() - std::sqrt(2.0)) <= 1e-9);
}

TEST_CASE("boundary estimates exit 4 with the result printed") {
  const Result r = call({"estimate-seq", "--format", "json"}, "0 0 0 0\n");
  CHECK(r.code == 4);
  const json j = json::parse(r.out);
  CHECK(j["boundary"] == "w1_zero");
  CHECK(j["converged"] == false);
  CHECK(call({"estimate-first", "--format", "json"}, "1\n1\n1\n").code == 4);
  CHECK(call({"estimate-seq"}, "0 1 2\n").code == 2);
  CHECK(call({"estimate-seq", "--input", "/nonexistent/bits"}).code == 2);
  CHECK(call({"estimate-first", "--method", "moments"}, "1 1 2\n").code == 4);
}

TEST_CASE("simulate and estimate round trip") {
  const Result sim = call({"simulate", "trials", "--w1", "1.5", "--w2", "2", "--n", "2000", "--seed", "7"});
  CHECK(sim.code == 0);
  const Result again = call({"simulate", "trials", "--w1", "1.5", "--w2", "2", "--n", "2000", "--seed", "7"});
  CHECK(sim.out == again.out);
  const Result est = call({"estimate-seq", "--format", "json"}, sim.out);
  const Result est2 = call({"estimate-seq", "--format", "json"}, again.out);
  CHECK(est.out == est2.out);
  CHECK(json::parse(est.out)["n"] == 2000);

  const Result fs = call({"simulate", "first-success", "--w1", "3", "--w2", "2", "--reps", "3000", "--seed", "1"});
  CHECK(fs.code == 0);
  const Result mle = call({"estimate-first", "--format", "json"}, fs.out);
  CHECK(mle.code == 0);
  CHECK(json::parse(mle.out)["converged"] == true);
  const Result mom = call({"estimate-first", "--method", "moments", "--format", "json"}, fs.out);
  CHECK(mom.code == 0);
}

TEST_CASE("other subcommands") {
  const Result m = call({"moments", "--w1", "1", "--w2", "1", "--n", "2", "--format", "json"});
  CHECK(m.code == 0);
  CHECK(json::parse(m.out)["mean"].get<double>() == doctest::Approx(5.0 / 6));
  CHECK(json::parse(m.out)["variance"].get<double>() == doctest::Approx(17.0 / 36));
  const Result p = call({"poisson-bounds", "--w1", "1", "--w2", "1", "--n", "100", "--format", "json"});
  const json pj = json::parse(p.out);
  CHECK(pj["tv_lower"].get<double>() <= pj["tv_exact"].get<double>());
  CHECK(pj["tv_exact"].get<double>() <= pj["tv_upper"].get<double>());
  const Result c = call({"disaster", "--w1", "2", "--w2", "1", "--alpha", "1", "--query", "tail", "--n0", "0", "--n", "1", "--l", "2", "--format", "json"});
  CHECK(json::parse(c.out)["overcrossing_tail"].get<double>() == doctest::Approx(5.0 / 6));
  const Result e = call({"disaster", "--w1", "1", "--w2", "0", "--alpha", "2", "--query", "extinction", "--n0", "5", "--z", "0.5", "--format", "json"});
  CHECK(e.code == 0);
  CHECK(json::parse(e.out)["escape_mass"].get<double>() > 0.0);
  CHECK(call({"disaster", "--w1", "1", "--w2", "1", "--alpha", "1", "--query", "invariant", "--n-max", "5"}).code == 2);
  const Result sp = call({"species", "--w1", "1", "--w2", "0", "--query", "dtg", "--parts", "2", "--format", "json"});
  CHECK(json::parse(sp.out)["probability"].get<double>() == doctest::Approx(0.5));
  const Result tab = call({"species", "--w1", "1", "--w2", "1", "--query", "table", "--n", "4"});
  CHECK(tab.code == 0);
  CHECK(call({"simulate", "disaster", "--w1", "2", "--w2", "1", "--alpha", "1", "--steps", "50", "--seed", "3", "--format", "json"}).code == 0);
  CHECK(call({"simulate", "species", "--w1", "2", "--w2", "1", "--alpha", "0.5", "--n", "10", "--reps", "4", "--seed", "3"}).code == 0);
  CHECK(call({"simulate", "power", "--w1", "2", "--w2", "1", "--a", "0.5", "--n", "10", "--seed", "3"}).code == 0);
}

TEST_CASE("output file") {
  const std::string path = "cli_out_test.csv";
  const Result r = call({"pmf-s", "--w1", "1", "--w2", "1", "--n", "2", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::remove(path.c_str());
  CHECK(pmf_rows(ss.str()).size() == 3);
}
