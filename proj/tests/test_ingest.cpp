#include <doctest.h>

#include "reprofeat/ingest.hpp"
#include "support.hpp"

using namespace reprofeat;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

PaperRecord full_record() {
  PaperRecord r;
  r.id = "demo";
  r.doi = "10.1000/demo";
  r.title = "A complete record";
  r.pub_year = 2015;
  r.authors = {{"Doe", "Jane"}, {"Roe", "Richard"}};
  r.affiliations = {"University of Oxford", "MIT"};
  r.references = {{"Earlier work", "10.1000/old", {{"Doe", "J."}}, 2010}};
  r.venue_issn = "1234-5678";
  r.body_text = "We found t(12)=4.3, p=0.01.";
  r.ack_text = "Funded by grant 42.";
  r.funded_override = true;
  r.label = true;
  return r;
}

const char *kMinimal = R"({"title": "T", "pub_year": 2010})";

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("fixture corpus loads with its manifest labels") {
  auto corpus = load_corpus(testsupport::fixture_dir() / "corpus");
  REQUIRE(corpus.size() == 20);
  int pos = 0, neg = 0, unknown = 0;
  for (const auto &r : corpus) {
    if (!r.label)
      ++unknown;
    else
      (*r.label ? pos : neg)++;
    CHECK(validate_record(r, 2021).empty());
  }
  CHECK(pos == 10);
  CHECK(neg == 8);
  CHECK(unknown == 2);
  CHECK(corpus.front().id == "p01");
  CHECK(corpus.back().id == "p20");
}

TEST_CASE("manifest listing two records") {
  TempDir dir;
  write_file(dir / "a.json", kMinimal);
  write_file(dir / "sub/b.json", R"({"title": "U", "pub_year": 2011, "label": false})");
  write_file(dir / "manifest.csv", "# comment\n\na.json,1\nsub/b.json,unknown\n");
  auto corpus = load_corpus(dir.path());
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "a");
  CHECK(corpus[0].label == std::optional<bool>(true));
  CHECK(corpus[1].id == "b");
  // the manifest label overrides the one in the file
  CHECK_FALSE(corpus[1].label.has_value());
  // a manifest file path works as well as its directory
  CHECK(load_corpus(dir / "manifest.csv").size() == 2);
}

TEST_CASE("empty title is a schema error naming the field") {
  TempDir dir;
  write_file(dir / "bad.json", R"({"title": "", "pub_year": 2010})");
  write_file(dir / "manifest.csv", "bad.json,0\n");
  try {
    load_corpus(dir.path());
    FAIL("expected SchemaError");
  } catch (const SchemaError &e) {
    CHECK(e.field() == "title");
    CHECK(e.file().find("bad.json") != std::string::npos);
  }
}

TEST_CASE("malformed records name file and field") {
  CHECK_THROWS_AS(parse_record("{", "x.json"), SchemaError);
  CHECK_THROWS_AS(parse_record("[]", "x.json"), SchemaError);
  try {
    parse_record(R"({"title": "T", "pub_year": "2010"})", "x.json");
    FAIL("expected SchemaError");
  } catch (const SchemaError &e) {
    CHECK(e.field() == "pub_year");
  }
  try {
    parse_record(R"({"title": "T", "pub_year": 2010, "references": [{}]})", "x.json");
    FAIL("expected SchemaError");
  } catch (const SchemaError &e) {
    CHECK(e.field() == "references[0]");
  }
  CHECK_THROWS_AS(parse_record(R"({"title": "T", "pub_year": 2010, "funded": "yes"})", "x"),
                  SchemaError);
}

TEST_CASE("missing path and bad manifest lines") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus/dir"), Error);
  TempDir dir;
  write_file(dir / "a.json", kMinimal);
  write_file(dir / "manifest.csv", "a.json,maybe\n");
  CHECK_THROWS_AS(load_corpus(dir.path()), SchemaError);
  write_file(dir / "manifest.csv", "a.json\n");
  CHECK_THROWS_AS(load_corpus(dir.path()), SchemaError);
  write_file(dir / "manifest.csv", "missing.json,1\n");
  CHECK_THROWS_AS(load_corpus(dir.path()), Error);
}

TEST_CASE("validate_record") {
  CHECK(validate_record(full_record(), 2021).empty());

  auto r = full_record();
  r.pub_year = 2099;
  auto v = validate_record(r, 2021);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "pub_year");

  r = full_record();
  r.doi.reset();
  r.title.clear();
  v = validate_record(r, 2021);
  bool identifier = false;
  for (const auto &x : v)
    identifier |= x.rule == "identifier missing";
  CHECK(identifier);

  r = full_record();
  r.authors.push_back({"", "Anon"});
  v = validate_record(r, 2021);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "authors[2].last");

  // pure: same input, same report
  CHECK(validate_record(r, 2021) == validate_record(r, 2021));
}

TEST_CASE("serialize and parse round trip") {
  const auto r = full_record();
  CHECK(parse_record(serialize_record(r), "mem") == r);

  PaperRecord bare;
  bare.id = "b";
  bare.title = "Only a title";
  bare.pub_year = 2001;
  CHECK(parse_record(serialize_record(bare), "mem") == bare);
}

TEST_CASE("save_corpus then load_corpus") {
  TempDir dir;
  auto a = full_record();
  auto b = full_record();
  b.id = "second";
  b.label.reset();
  save_corpus({a, b}, dir.path());
  auto back = load_corpus(dir.path());
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
}

TEST_CASE("authors as strings split on the last space") {
  auto r = parse_record(
      R"({"title": "T", "pub_year": 2010, "authors": ["Mary Ann Smith", "Plato"]})", "m");
  REQUIRE(r.authors.size() == 2);
  CHECK(r.authors[0] == AuthorName{"Smith", "Mary Ann"});
  CHECK(r.authors[1] == AuthorName{"Plato", ""});
}

}
