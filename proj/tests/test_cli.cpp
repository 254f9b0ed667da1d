#include <doctest.h>

#include <sstream>

#include "reprofeat/cli.hpp"
#include "support.hpp"

using namespace reprofeat;
using testsupport::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_dir() { return (testsupport::fixture_dir() / "corpus").string(); }

// Separable synthetic matrix written through the regular table writer.
void write_separable(const std::filesystem::path &dir) {
  auto ds = testsupport::separable(60, 21, 4);
  FeatureMatrix m;
  m.values = ds.X;
  m.is_default = MaskMatrix::Constant(ds.X.rows(), ds.X.cols(), false);
  for (int j = 0; j < 4; ++j)
    m.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    m.paper_ids.push_back("s" + std::to_string(i));
    m.labels.push_back(ds.y[i] == 1);
  }
  write_matrix(m, dir / "m.csv", dir / "mask.csv");
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"extract"}).code == 2); // no corpus
  CHECK(cli({"evaluate", "--classifier", "perceptron"}).code == 2);
  CHECK(cli({"analyze", "--tau", "1.5"}).code == 2);
  CHECK(cli({"extract", "--corpus", "/nonexistent"}).code == 2);
  CHECK(cli({"extract", "--corpus", corpus_dir(), "--no-such-flag"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.command = "analyze";
  CHECK(c.validate().empty());
  c.folds = 1;
  c.sample_size_aggregation = "median";
  CHECK(c.validate().size() == 2);
}

TEST_CASE("extract on the fixture corpus") {
  TempDir dir;
  auto r = cli({"extract", "--corpus", corpus_dir(), "--offline", "--now-year", "2021",
                "--out", dir.path().string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto m = read_matrix(dir / "features.csv", dir / "mask.csv");
  CHECK(m.rows() == 20);
  CHECK(m.cols() == 41);
  CHECK(testsupport::read_lines(dir / "diagnostics.jsonl").size() == 20);
  CHECK(testsupport::read_file(dir / "warnings.txt").find("title mismatch") !=
        std::string::npos);

  REQUIRE(cli({"analyze", "--out", dir.path().string()}).code == 0);
  const auto core = testsupport::read_lines(dir / "core_features.txt");
  CHECK_FALSE(core.empty());
  for (const auto &name : core) {
    if (name.empty() || name[0] == '#')
      continue;
    CHECK(m.real_count(*m.column(name)) >= 15);
  }
}

TEST_CASE("evaluate on a separable matrix") {
  TempDir dir;
  write_separable(dir.path());
  auto args = [&](const std::string &out) {
    return std::vector<std::string>{"evaluate",
                                    "--matrix", (dir / "m.csv").string(),
                                    "--mask", (dir / "mask.csv").string(),
                                    "--mi-extra", "x3",
                                    "--out", (dir / out).string()};
  };
  auto r = cli(args("a"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto j = nlohmann::json::parse(testsupport::read_file(dir / "a" / "cv_results.json"));
  REQUIRE(j["results"].size() == 3 * 2 * 8);
  for (const auto &res : j["results"])
    CHECK(res["cv"]["mean_f1"].get<double>() >= 0.9);

  REQUIRE(cli(args("b")).code == 0);
  CHECK(testsupport::read_file(dir / "a" / "metrics.csv") ==
        testsupport::read_file(dir / "b" / "metrics.csv"));
}

TEST_CASE("sweep writes one row per k") {
  TempDir dir;
  write_separable(dir.path());
  auto r = cli({"sweep", "--matrix", (dir / "m.csv").string(), "--classifier", "gauss_nb",
                "--top-k", "3", "--repeats", "2", "--mi-extra", "x3", "--out",
                (dir / "o").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  int rows = 0;
  for (const auto &line : testsupport::read_lines(dir / "o" / "sweep.csv"))
    if (!line.empty() && line[0] != '#' && line.rfind("k,", 0) != 0)
      ++rows;
  CHECK(rows == 3);
}

}
