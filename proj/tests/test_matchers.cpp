#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "reprofeat/matchers.hpp"
#include "support.hpp"

using namespace reprofeat;

namespace {

RankTable small_table() {
  RankTable t;
  t.add(1, "University of Oxford");
  t.add(2, "Stanford University");
  t.add(5, "Massachusetts Institute of Technology");
  t.add(100, "Lund University");
  t.add(150, "University of Oslo");
  t.add_acronym("MIT", "Massachusetts Institute of Technology");
  return t;
}

ReferenceEntry ref_by(std::vector<AuthorName> authors) {
  ReferenceEntry r;
  r.authors = std::move(authors);
  return r;
}

} // namespace

TEST_SUITE("matchers") {

TEST_CASE("normalize_text") {
  CHECK(normalize_text("  Université   de Montréal ") == "universite de montreal");
  CHECK(normalize_text("O'Brien-Smith, J.") == "obrien smith j");
  CHECK(normalize_text("Zürich 東京") == "zurich");
  CHECK(normalize_text("") == "");
}

TEST_CASE("similarity examples") {
  CHECK(similarity("smith", "smith") == 1.0);
  CHECK(similarity("smith", "smyth") == doctest::Approx(0.8));
  CHECK(similarity("abc", "") == 0.0);
  CHECK(similarity("", "") == 1.0);
  CHECK(edit_distance("kitten", "sitting") == 3);
  // code points, not bytes
  CHECK(edit_distance("döe", "doe") == 1);
}

TEST_CASE("similarity is symmetric and bounded") {
  const std::vector<std::string> words = {"", "a", "smith", "smyth", "müller",
                                          "mueller", "kowalski", "kovalsky"};
  for (const auto &a : words)
    for (const auto &b : words) {
      const double s = similarity(a, b);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(s == similarity(b, a));
    }
}

TEST_CASE("author_match needs the same initial") {
  CHECK(author_match({"Doe", "Jane"}, {"Doe", "J."}));
  CHECK(author_match({"Döe", "J"}, {"Doe", "Jane"}));
  CHECK_FALSE(author_match({"Doe", "Jane"}, {"Doe", "Mary"}));
  CHECK_FALSE(author_match({"Doe", "Jane"}, {"Roe", "Jane"}));
  CHECK(first_initial("  élodie") == 'e');
  CHECK(first_initial("") == 0);
}

TEST_CASE("self-citation examples") {
  const std::vector<AuthorName> doe = {{"Doe", "J"}};
  auto sc = self_citation_ratio(
      doe, {ref_by({{"Doe", "J."}}), ref_by({{"Smith", "A"}}),
            ref_by({{"Brown", "B"}}), ref_by({{"Lee", "C"}})});
  CHECK(sc.count == 1);
  CHECK(sc.ratio == doctest::Approx(0.25));
  CHECK_FALSE(sc.is_default);

  sc = self_citation_ratio(doe, {ref_by({{"Smith", "A"}})});
  CHECK(sc.count == 0);
  CHECK(sc.ratio == 0.0);

  sc = self_citation_ratio(doe, {ref_by({{"Döe", "J."}})});
  CHECK(sc.count == 1);

  sc = self_citation_ratio(doe, {});
  CHECK(sc.is_default);
  CHECK(sc.count == 0);
}

TEST_CASE("self-citation hand-labeled fixture") {
  double se = 0;
  int n = 0;
  for (const auto &line :
       testsupport::read_lines(testsupport::fixture_dir() / "selfcite.jsonl")) {
    auto j = nlohmann::json::parse(line);
    std::vector<AuthorName> authors;
    for (const auto &a : j["authors"])
      authors.push_back({a["last"], a["first"]});
    std::vector<ReferenceEntry> refs;
    for (const auto &r : j["references"]) {
      ReferenceEntry e;
      for (const auto &a : r["authors"])
        e.authors.push_back({a["last"], a["first"]});
      refs.push_back(std::move(e));
    }
    const double d = self_citation_ratio(authors, refs).ratio -
                     j["true_ratio"].get<double>();
    se += d * d;
    ++n;
  }
  CHECK(n == 37);
  CHECK(std::sqrt(se / n) <= 0.09);
}

TEST_CASE("title_match examples") {
  const std::string t = "Estimating the reproducibility of psychological science";
  CHECK(title_match(t, t));
  CHECK(title_match(t, "ESTIMATING the reproducibility of psychological science."));
  // 60-character title missing 5 characters
  const std::string sixty = "A study of priming effects on memory in large online samples";
  REQUIRE(sixty.size() == 60);
  CHECK(title_match(sixty, sixty.substr(0, 55)));
  CHECK_FALSE(title_match(t, "Soil chemistry of alpine meadows"));
}

TEST_CASE("u_rank examples") {
  const auto table = small_table();
  CHECK(u_rank({"University of Oxford"}, table).value == doctest::Approx(0.99));
  CHECK(u_rank({"Lund University"}, table).value == doctest::Approx(0.0));
  auto nowhere = u_rank({"Institute of Nowhere"}, table);
  CHECK(nowhere.value == 2.0);
  CHECK(nowhere.is_default);
  auto oslo = u_rank({"University of Oslo"}, table);
  CHECK(oslo.value == 2.0);
  CHECK_FALSE(oslo.is_default);
  CHECK(u_rank({}, table).is_default);
}

TEST_CASE("u_rank segments, acronyms and author fallback") {
  const auto table = small_table();
  auto r = u_rank({"Department of Psychology, University of Oxford, Oxford, UK"}, table);
  CHECK(r.rank == 1);
  r = u_rank({"Dept. of Economics, MIT, Cambridge, MA"}, table);
  CHECK(r.rank == 5);
  CHECK(r.value == doctest::Approx(0.95));
  r = u_rank({"", "Stanford University"}, table);
  CHECK(r.rank == 2);
  // only the first two authors count
  CHECK(u_rank({"", "", "Stanford University"}, table).is_default);
  // the first author wins when present, even if unranked
  CHECK(u_rank({"Institute of Nowhere", "Stanford University"}, table).is_default);
}

TEST_CASE("u_rank is monotone in rank") {
  const auto table = small_table();
  const double a = u_rank({"University of Oxford"}, table).value;
  const double b = u_rank({"Stanford University"}, table).value;
  const double c = u_rank({"Lund University"}, table).value;
  CHECK(a > b);
  CHECK(b > c);
}

TEST_CASE("bundled rank table") {
  const auto dir = std::filesystem::path(REPROFEAT_SOURCE_DIR) / "data";
  auto table = RankTable::load(dir / "rank_table.tsv", dir / "acronyms.tsv");
  CHECK(table.entries().size() > 100);
  CHECK(u_rank({"School of Psychology, UCL, London"}, table).rank > 0);
  CHECK(u_rank({"University of Oxford"}, table).value == doctest::Approx(0.99));
  CHECK_THROWS_AS(RankTable::load(dir / "missing.tsv"), Error);
}

}
