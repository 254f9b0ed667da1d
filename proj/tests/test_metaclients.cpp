#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "reprofeat/metaclients.hpp"
#include "support.hpp"

// after Eigen: resolv.h, pulled in by httplib, defines _res
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

using namespace reprofeat;
using nlohmann::json;
using testsupport::TempDir;

namespace {

std::filesystem::path demo_dir() { return testsupport::fixture_dir() / "demo_providers"; }

MetadataClient demo_client(std::optional<std::filesystem::path> cache = {}) {
  ClientOptions o;
  o.offline = true;
  o.fixture_dir = demo_dir();
  o.cache_dir = std::move(cache);
  return MetadataClient(o);
}

// A local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
public:
  LocalServer() {
    port_ = svr.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  ~LocalServer() {
    svr.stop();
    thread_.join();
  }
  std::string url(const std::string &prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }
  httplib::Server svr;

private:
  int port_ = 0;
  std::thread thread_;
};

HttpConfig fast_http() {
  HttpConfig c;
  c.requests_per_second = 0; // unlimited
  c.max_retries = 3;
  c.initial_backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::seconds(5);
  return c;
}

// Provider stub counting calls and returning a fixed record.
class StubProvider : public Provider {
public:
  StubProvider(std::string name, std::optional<ProviderRecord> rec)
      : name_(std::move(name)), rec_(std::move(rec)) {}
  std::string name() const override { return name_; }
  std::optional<ProviderRecord> paper(const PaperQuery &) override {
    ++calls;
    if (fail)
      throw TransportError("connection refused");
    return rec_;
  }
  int calls = 0;
  bool fail = false;

private:
  std::string name_;
  std::optional<ProviderRecord> rec_;
};

} // namespace

TEST_SUITE("metaclients") {

TEST_CASE("normalize_identifier and author_key") {
  CHECK(normalize_identifier("https://doi.org/10.1177/ABC.123") == "10.1177_abc.123");
  CHECK(normalize_identifier("doi:10.1/x") == "10.1_x");
  CHECK(normalize_identifier("A Title: With Punctuation!") == "title_a_title_with_punctuation");
  CHECK(normalize_identifier(std::string(400, 'a')).size() == 160);
  CHECK(author_key({"van der Berg", "Anna"}) == "van_der_berg_a");
  CHECK(author_key({"Plato", ""}) == "plato");
}

TEST_CASE("merged citation count") {
  ProviderRecord r;
  r.citations_scopus = 12;
  r.citations_crossref = 10;
  CHECK(merged_citation_count(r) == 12);
  r.citations_scopus.reset();
  r.citations_crossref = 7;
  CHECK(merged_citation_count(r) == 7);
  r.citations_crossref.reset();
  CHECK(merged_citation_count(r) == 0);
}

TEST_CASE("fixture DOI merges all providers") {
  auto client = demo_client();
  auto rec = client.fetch({"10.x/demo1", "A demonstration record"});
  CHECK(rec.citations_scopus == 12);
  CHECK(rec.citations_crossref == 10);
  CHECK(merged_citation_count(rec) == 12);
  // first-available: S2 before Crossref before Scopus
  CHECK(rec.pub_year == 2018);
  CHECK(rec.open_access == true);
  // references_count takes the maximum
  CHECK(rec.references_count == 32);
  CHECK(rec.intents_in.methodology == 2);
  CHECK(client.warnings().empty());
}

TEST_CASE("unknown DOI gives an all-absent record") {
  auto client = demo_client();
  auto rec = client.fetch({"10.x/unknown", "Nothing here"});
  CHECK(rec == ProviderRecord{});
  CHECK(rec.empty());
}

TEST_CASE("cache hit makes no provider calls") {
  TempDir cache;
  auto client = demo_client(cache.path());
  auto first = client.fetch({"10.x/demo1", "A demonstration record"});
  const int calls = client.provider_calls();
  CHECK(calls == 3);
  auto second = client.fetch({"10.x/demo1", "A demonstration record"});
  CHECK(second == first);
  CHECK(client.provider_calls() == calls);
  // a fresh client over the same cache directory also hits
  auto other = demo_client(cache.path());
  CHECK(other.fetch({"10.x/demo1", "A demonstration record"}) == first);
  CHECK(other.provider_calls() == 0);
  // misses are cached too
  client.fetch({"10.x/unknown", "x"});
  const int after_miss = client.provider_calls();
  client.fetch({"10.x/unknown", "x"});
  CHECK(client.provider_calls() == after_miss);
}

TEST_CASE("provider record JSON round trip") {
  ProviderRecord r;
  r.title = "T";
  r.pub_year = 2012;
  r.graph_id = "g1";
  r.citations_scopus = 5;
  r.citation_velocity = 1.5;
  r.per_year_citations = {{2012, 1}, {2013, 4}};
  r.open_access = false;
  r.citing_paper_ids = {"a", "b"};
  r.intents_in = {1, 2, 3};
  r.intents_out.methodology = 4;
  r.upstream_influential_methodology_count = 2;
  CHECK(provider_record_from_json(json::parse(to_json(r).dump())) == r);

  VenueMetrics v;
  v.sjr = 1.4;
  v.subject_name = "Psychology";
  CHECK(venue_metrics_from_json(to_json(v)) == v);
  AuthorMetrics a;
  a.h_index = 3;
  CHECK(author_metrics_from_json(to_json(a)) == a);
}

TEST_CASE("venue and author metrics from fixtures") {
  auto client = demo_client();
  auto v = client.fetch_venue_metrics("1234-5678");
  CHECK(v.sjr == 1.4);
  CHECK(v.asjc_code == 3200);
  CHECK(client.fetch_venue_metrics("0000-0000") == VenueMetrics{});

  auto authors = client.fetch_author_metrics({{"Doe", "Jane"}, {"Roe", "Richard"}});
  REQUIRE(authors.size() == 2);
  CHECK(authors[0].h_index == 10);
  CHECK(authors[1].h_index == 20);
  auto missing = client.fetch_author_metrics({{"Nobody", "N"}});
  CHECK(missing[0] == AuthorMetrics{});
}

TEST_CASE("title mismatch rejects a candidate with a warning") {
  std::vector<std::unique_ptr<Provider>> ps;
  ProviderRecord wrong;
  wrong.title = "Something else entirely";
  wrong.citations_crossref = 99;
  ProviderRecord right;
  right.title = "The query title";
  right.citations_scopus = 3;
  ps.push_back(std::make_unique<StubProvider>("crossref", wrong));
  ps.push_back(std::make_unique<StubProvider>("scopus", right));
  std::vector<std::string> seen;
  MetadataClient client(std::move(ps), {}, [&](const std::string &w) { seen.push_back(w); });
  auto rec = client.fetch({std::nullopt, "The query title"});
  CHECK_FALSE(rec.citations_crossref.has_value());
  CHECK(rec.citations_scopus == 3);
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].find("title mismatch") != std::string::npos);
}

TEST_CASE("transport failure gives an absent record and a warning, uncached") {
  TempDir cache;
  std::vector<std::unique_ptr<Provider>> ps;
  auto stub = std::make_unique<StubProvider>("s2", ProviderRecord{});
  stub->fail = true;
  StubProvider *raw = stub.get();
  ps.push_back(std::move(stub));
  MetadataClient client(std::move(ps), cache.path());
  CHECK(client.fetch({"10.1/x", "T"}) == ProviderRecord{});
  CHECK(client.warnings().size() == 1);
  client.fetch({"10.1/x", "T"});
  CHECK(raw->calls == 2);
}

TEST_CASE("in-memory citation graph") {
  auto g = InMemoryCitationGraph::from_json(json::parse(R"({"nodes": {
      "t": {"year": 2010, "references": []},
      "a1": {"year": 2011, "references": ["t", "r1"]},
      "a2": {"year": 2012, "references": ["t", "r1", "t"]},
      "r1": {"year": 2010}}})"));
  CHECK(g.citers("t") == std::vector<std::string>{"a1", "a2"});
  CHECK(g.references("a2") == std::vector<std::string>{"t", "r1"});
  CHECK(g.year("r1") == 2010);
  CHECK_FALSE(g.citers("nope").has_value());
}

TEST_CASE("HTTP retries on 503, gives up on persistent failure, 404 is a miss") {
  LocalServer server;
  std::atomic<int> flaky{0}, broken{0};
  server.svr.Get("/flaky", [&](const httplib::Request &, httplib::Response &res) {
    if (flaky++ < 2) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"ok": true})", "application/json");
  });
  server.svr.Get("/broken", [&](const httplib::Request &, httplib::Response &res) {
    ++broken;
    res.status = 500;
  });
  server.svr.Get("/bad-request", [&](const httplib::Request &, httplib::Response &res) {
    res.status = 400;
  });

  HttpGetter http(server.url(), fast_http());
  auto ok = http.get_json("/flaky");
  REQUIRE(ok.has_value());
  CHECK((*ok)["ok"] == true);
  CHECK(flaky == 3);

  CHECK_FALSE(http.get_json("/missing").has_value());
  CHECK_THROWS_AS(http.get_json("/broken"), TransportError);
  CHECK(broken == 4);
  // client errors other than 429 are not retried
  const int before = http.requests_sent();
  CHECK_THROWS_AS(http.get_json("/bad-request"), TransportError);
  CHECK(http.requests_sent() == before + 1);
}

TEST_CASE("unreachable host raises TransportError") {
  HttpConfig c = fast_http();
  c.max_retries = 1;
  c.timeout = std::chrono::seconds(1);
  HttpGetter http("http://127.0.0.1:1", c);
  CHECK_THROWS_AS(http.get_json("/x"), TransportError);
}

TEST_CASE("rate limiter spaces requests") {
  LocalServer server;
  server.svr.Get("/r", [](const httplib::Request &, httplib::Response &res) {
    res.set_content("{}", "application/json");
  });
  HttpConfig c = fast_http();
  c.requests_per_second = 20;
  HttpGetter http(server.url(), c);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i)
    http.get_json("/r");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs >= 0.19);
  CHECK(http.requests_sent() == 5);

  RateLimiter unlimited(0);
  const auto t1 = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i)
    unlimited.acquire();
  CHECK(std::chrono::steady_clock::now() - t1 < std::chrono::milliseconds(100));
}

TEST_CASE("live providers against a local server, with caching") {
  LocalServer server;
  std::atomic<int> hits{0};
  server.svr.Get(R"(/crossref/works/(.+))", [&](const httplib::Request &req,
                                                 httplib::Response &res) {
    ++hits;
    if (req.matches[1] != "10.1000/demo") {
      res.status = 404;
      return;
    }
    res.set_content(R"({"message": {"title": ["A demonstration record"],
        "published": {"date-parts": [[2018, 3]]},
        "is-referenced-by-count": 10, "references-count": 32}})",
                    "application/json");
  });
  server.svr.Get(R"(/s2/paper/(.+))", [&](const httplib::Request &,
                                          httplib::Response &res) {
    ++hits;
    res.set_content(R"({"paperId": "abc", "title": "A demonstration record",
        "year": 2018, "citationVelocity": 3, "influentialCitationCount": 2,
        "isOpenAccess": true,
        "citations": [
          {"paperId": "c1", "year": 2019, "intent": ["methodology"]},
          {"paperId": "c2", "year": 2019, "intent": ["background", "result"]},
          {"paperId": "c3", "year": 2020, "intent": []}],
        "references": [
          {"paperId": "r1", "intent": ["methodology"], "isInfluential": true},
          {"paperId": "r2", "intent": ["background"], "isInfluential": false}]})",
                    "application/json");
  });

  TempDir cache;
  ClientOptions o;
  o.offline = false;
  o.crossref_url = server.url("/crossref");
  o.s2_url = server.url("/s2");
  o.http = fast_http();
  o.cache_dir = cache.path();
  MetadataClient client(o);
  auto rec = client.fetch({"10.1000/demo", "A demonstration record"});
  CHECK(rec.citations_crossref == 10);
  CHECK(rec.graph_id == "abc");
  CHECK(rec.pub_year == 2018);
  CHECK(rec.per_year_citations == std::map<int, long long>{{2019, 2}, {2020, 1}});
  CHECK(rec.intents_in.methodology == 1);
  CHECK(rec.intents_in.background == 1);
  CHECK(rec.intents_out.methodology == 1);
  CHECK(rec.influential_references_count == 1);
  CHECK(rec.upstream_influential_methodology_count == 1);
  CHECK(rec.references_count == 32);
  CHECK(rec.citing_paper_ids == std::vector<std::string>{"c1", "c2", "c3"});
  const int after_first = hits;
  CHECK(after_first == 2);

  auto again = client.fetch({"10.1000/demo", "A demonstration record"});
  CHECK(again == rec);
  CHECK(hits == after_first);
}

TEST_CASE("scopus serial parser") {
  auto v = ScopusProvider::parse_serial(json::parse(R"J({
      "SJRList": {"SJR": {"$": "1.4"}},
      "SNIPList": {"SNIP": {"$": "0.9"}},
      "citeScoreYearInfoList": {"citeScoreCurrentMetric": "3.2",
        "citeScoreYearInfo": {"citeScoreInformationList": {"citeScoreInfo": {
          "scholarlyOutput": "120", "percentCited": "75", "citationCount": "384"}}}},
      "subject-area": {"@code": "3200", "$": "Psychology (all)"}})J"));
  CHECK(v.sjr == 1.4);
  CHECK(v.snip == 0.9);
  CHECK(v.cite_score == 3.2);
  CHECK(v.scholarly_output == 120);
  CHECK(v.percent_cited == 75);
  CHECK(v.citation_count == 384);
  CHECK(v.asjc_code == 3200);
}

}
