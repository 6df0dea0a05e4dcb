#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

using dgs::test::TempFile;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dgs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen, stats and spanner round trip") {
  TempFile g("cli_g.dgs"), h1("cli_h1.edges"), h2("cli_h2.edges"), h3("cli_h3.edges"), rep("cli_r.json");
  REQUIRE(run({"gen", "--n", "100", "--m", "300", "--churn", "1", "--seed", "5", "--out", g.path()}).code == 0);

  const auto stats = run({"stats", "--stream", g.path()});
  REQUIRE(stats.code == 0);
  const auto sj = nlohmann::json::parse(stats.out);
  CHECK(sj["n"] == 100);
  CHECK(sj["final_edges"] == 300);
  CHECK(sj["updates"] == 900);
  CHECK(sj["passes"] == 1);

  REQUIRE(run({"spanner", "--stream", g.path(), "--seed", "3", "--out", h1.path(), "--report", rep.path()}).code == 0);
  REQUIRE(run({"spanner", "--stream", g.path(), "--seed", "3", "--out", h2.path()}).code == 0);
  REQUIRE(run({"--permute-seed", "17", "spanner", "--stream", g.path(), "--seed", "3", "--out", h3.path()}).code == 0);
  CHECK(slurp(h1.path()) == slurp(h2.path()));
  CHECK(slurp(h1.path()) == slurp(h3.path()));

  const auto rj = nlohmann::json::parse(slurp(rep.path()));
  CHECK(rj["schema"] == "1");
  CHECK(rj["command"] == "spanner");
  CHECK(rj["passes"].get<double>() <= 10 * rj["params"]["beta"].get<double>());
  CHECK(rj.contains("peak_sketch_bytes"));
  CHECK(rj.contains("timings"));
  CHECK(rj.contains("output_size"));

  const auto v = run({"validate", "--graph", g.path(), "--spanner", h1.path(), "--eps", "0.5", "--beta", "216",
                      "--pairs", "200", "--json"});
  REQUIRE(v.code == 0);
  const auto vj = nlohmann::json::parse(v.out);
  CHECK(vj["validation"]["ok"] == true);
}

TEST_CASE("hopset and weighted asp commands") {
  TempFile g("cli_w.dgs"), hs("cli_w.hopset"), rep("cli_w.json"), tsv("cli_w.tsv");
  REQUIRE(run({"gen", "--n", "30", "--m", "60", "--seed", "2", "--weighted", "--max-weight", "4", "--out", g.path()})
              .code == 0);
  const auto r = run({"hopset", "--stream", g.path(), "--aspect", "256", "--phase-eps", "0.5", "--chi", "0.25",
                      "--path-reporting", "--validate", "--out", hs.path(), "--report", rep.path()});
  REQUIRE(r.code == 0);
  const auto rj = nlohmann::json::parse(slurp(rep.path()));
  CHECK(rj["validation"]["ok"] == true);

  const auto a = run({"asp", "--stream", g.path(), "--sources", "1,2", "--weighted", "--aspect", "256",
                      "--phase-eps", "0.5", "--chi", "0.25", "--out", tsv.path()});
  REQUIRE(a.code == 0);
  std::istringstream lines(slurp(tsv.path()));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 60);
}

TEST_CASE("argument errors exit with 2") {
  TempFile g("cli_e.dgs");
  REQUIRE(run({"gen", "--n", "10", "--m", "12", "--out", g.path()}).code == 0);
  CHECK(run({}).code == dgs::cli::kExitUsage);
  CHECK(run({"bogus"}).code == dgs::cli::kExitUsage);
  CHECK(run({"spanner", "--stream", g.path(), "--eps", "2"}).code == dgs::cli::kExitUsage);
  CHECK(run({"spanner", "--stream", g.path(), "--kappa", "1"}).code == dgs::cli::kExitUsage);
  CHECK(run({"asp", "--stream", g.path(), "--sources", "1,2,3,4,5"}).code == dgs::cli::kExitUsage);
  CHECK(run({"asp", "--stream", g.path(), "--sources", "99"}).code == dgs::cli::kExitUsage);
  CHECK(run({"gen", "--n", "1", "--m", "1", "--out", g.path()}).code == dgs::cli::kExitUsage);
}

TEST_CASE("unreadable stream files are reported") {
  const auto r = run({"stats", "--stream", "/nonexistent/stream.dgs"});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());
}
