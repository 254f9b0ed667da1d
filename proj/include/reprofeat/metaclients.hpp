#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprofeat/ingest.hpp"
#include "reprofeat/matchers.hpp"

namespace reprofeat {

struct IntentCounts {
  std::optional<int> background;
  std::optional<int> methodology;
  std::optional<int> result;

  bool operator==(const IntentCounts &) const = default;
};

/// Merged external-metadata view of one paper. Absent fields stay absent;
/// defaults are applied by the feature layer.
struct ProviderRecord {
  std::optional<std::string> title;
  std::optional<int> pub_year;
  std::optional<std::string> graph_id; // node id in the citation graph
  std::optional<long long> citations_scopus;
  std::optional<long long> citations_crossref;
  std::optional<double> citation_velocity;
  std::map<int, long long> per_year_citations;
  std::optional<long long> influential_citation_count;
  std::optional<long long> influential_references_count;
  std::optional<long long> references_count;
  std::optional<bool> open_access;
  std::vector<std::string> citing_paper_ids;
  IntentCounts intents_in;  // citations received
  IntentCounts intents_out; // references made
  std::optional<long long> upstream_influential_methodology_count;

  bool empty() const;
  bool operator==(const ProviderRecord &) const = default;
};

struct VenueMetrics {
  std::optional<double> cite_score;
  std::optional<double> snip;
  std::optional<double> scholarly_output;
  std::optional<double> percent_cited;
  std::optional<double> citation_count;
  std::optional<double> sjr;
  std::optional<int> asjc_code;            // subject field, e.g. 3200
  std::optional<std::string> subject_name; // used when no code is given

  bool operator==(const VenueMetrics &) const = default;
};

struct AuthorMetrics {
  std::optional<double> pub_count;
  std::optional<double> h_index;
  std::optional<double> highly_influential_cites;
  std::optional<double> total_cites;

  bool operator==(const AuthorMetrics &) const = default;
};

nlohmann::json to_json(const ProviderRecord &r);
ProviderRecord provider_record_from_json(const nlohmann::json &j);
nlohmann::json to_json(const VenueMetrics &v);
VenueMetrics venue_metrics_from_json(const nlohmann::json &j);
nlohmann::json to_json(const AuthorMetrics &a);
AuthorMetrics author_metrics_from_json(const nlohmann::json &j);

/// Larger of the Scopus and Crossref citation counts, 0 when both absent.
long long merged_citation_count(const ProviderRecord &r);

/// Cache / fixture key: a lowercased DOI (resolver prefix stripped) or
/// "title_" plus the normalized title, reduced to [a-z0-9._-].
std::string normalize_identifier(std::string_view doi_or_title);
std::string author_key(const AuthorName &a);

struct PaperQuery {
  std::optional<std::string> doi;
  std::string title;
};

/// Citation graph access for co-citation counting.
class CitationGraph {
public:
  virtual ~CitationGraph() = default;
  virtual std::optional<std::vector<std::string>>
  citers(const std::string &id) = 0;
  virtual std::optional<std::vector<std::string>>
  references(const std::string &id) = 0;
  virtual std::optional<int> year(const std::string &id) = 0;
};

class InMemoryCitationGraph : public CitationGraph {
public:
  void add_paper(const std::string &id, std::optional<int> year,
                 const std::vector<std::string> &references);
  /// {"nodes": {"<id>": {"year": 2015, "references": ["<id>", ...]}}}
  static InMemoryCitationGraph from_json(const nlohmann::json &j);

  std::optional<std::vector<std::string>>
  citers(const std::string &id) override;
  std::optional<std::vector<std::string>>
  references(const std::string &id) override;
  std::optional<int> year(const std::string &id) override;

private:
  struct Node {
    std::optional<int> year;
    std::vector<std::string> references;
    std::vector<std::string> citers;
  };
  std::map<std::string, Node> nodes_;
};

/// Raised by live providers for transport-level failures (after retries).
class TransportError : public Error {
public:
  using Error::Error;
};

/// One metadata source. `nullopt` means the provider has no record.
class Provider {
public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  virtual std::optional<ProviderRecord> paper(const PaperQuery &q) = 0;
  virtual std::optional<VenueMetrics> venue(const std::string &) {
    return std::nullopt;
  }
  virtual std::optional<AuthorMetrics> author(const AuthorName &) {
    return std::nullopt;
  }
  virtual CitationGraph *graph() { return nullptr; }
};

/// Token bucket; `acquire` blocks until a token is available.
class RateLimiter {
public:
  explicit RateLimiter(double per_second = 1.0, double burst = 1.0);
  void acquire();

private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct HttpConfig {
  double requests_per_second = 1.0;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{20};
};

/// HTTP GET helper with rate limiting and exponential-backoff retries.
/// Returns nullopt on 404; throws TransportError on persistent failure.
class HttpGetter {
public:
  HttpGetter(std::string base_url, HttpConfig cfg,
             std::vector<std::pair<std::string, std::string>> headers = {});
  std::optional<nlohmann::json> get_json(const std::string &path);
  int requests_sent() const { return requests_; }

private:
  std::string base_url_;
  HttpConfig cfg_;
  std::vector<std::pair<std::string, std::string>> headers_;
  RateLimiter limiter_;
  std::mutex count_mu_;
  int requests_ = 0;
};

/// Reads fixture files: papers/<key>.json holds one section per provider
/// ("s2", "crossref", "scopus"). Like the live services, venue metrics
/// (venues/<issn>.json) are served by the "scopus" section and author
/// metrics (authors/<key>.json) and the citation graph (graph.json) by "s2".
class FixtureProvider : public Provider {
public:
  FixtureProvider(std::filesystem::path root, std::string section);
  std::string name() const override { return section_; }
  std::optional<ProviderRecord> paper(const PaperQuery &q) override;
  std::optional<VenueMetrics> venue(const std::string &issn) override;
  std::optional<AuthorMetrics> author(const AuthorName &a) override;
  CitationGraph *graph() override;

private:
  std::filesystem::path root_;
  std::string section_;
  std::once_flag graph_once_;
  std::unique_ptr<InMemoryCitationGraph> graph_;
};

/// Crossref REST works API (`/works/{doi}`, `/works?query.bibliographic=`).
class CrossrefProvider : public Provider {
public:
  explicit CrossrefProvider(std::string base_url = "https://api.crossref.org",
                            HttpConfig cfg = {}, std::string mailto = {});
  std::string name() const override { return "crossref"; }
  std::optional<ProviderRecord> paper(const PaperQuery &q) override;

  static ProviderRecord parse_work(const nlohmann::json &message);

private:
  HttpGetter http_;
};

/// Semantic Scholar paper endpoint with embedded citation and reference
/// lists (`/paper/{id}`), plus `/author/search`.
class SemanticScholarProvider : public Provider {
public:
  explicit SemanticScholarProvider(
      std::string base_url = "https://api.semanticscholar.org/v1",
      HttpConfig cfg = {}, std::string api_key = {});
  std::string name() const override { return "s2"; }
  std::optional<ProviderRecord> paper(const PaperQuery &q) override;
  std::optional<AuthorMetrics> author(const AuthorName &a) override;
  CitationGraph *graph() override { return &graph_; }

  static ProviderRecord parse_paper(const nlohmann::json &j);

private:
  class Graph : public CitationGraph {
  public:
    explicit Graph(SemanticScholarProvider &owner) : owner_(owner) {}
    std::optional<std::vector<std::string>>
    citers(const std::string &id) override;
    std::optional<std::vector<std::string>>
    references(const std::string &id) override;
    std::optional<int> year(const std::string &id) override;

  private:
    const nlohmann::json *node(const std::string &id);
    SemanticScholarProvider &owner_;
    std::mutex mu_;
    std::map<std::string, std::optional<nlohmann::json>> nodes_;
  };

  HttpGetter http_;
  Graph graph_{*this};
};

/// Elsevier abstract and serial-title APIs; requires an API key.
class ScopusProvider : public Provider {
public:
  ScopusProvider(std::string api_key,
                 std::string base_url = "https://api.elsevier.com",
                 HttpConfig cfg = {});
  std::string name() const override { return "scopus"; }
  std::optional<ProviderRecord> paper(const PaperQuery &q) override;
  std::optional<VenueMetrics> venue(const std::string &issn) override;

  static VenueMetrics parse_serial(const nlohmann::json &entry);

private:
  HttpGetter http_;
};

/// One JSON file per response under <root>/<provider>/<key>.json, written
/// atomically (temp file then rename).
class ResponseCache {
public:
  explicit ResponseCache(std::filesystem::path root);
  std::optional<nlohmann::json> get(const std::string &provider,
                                    const std::string &kind,
                                    const std::string &key) const;
  void put(const std::string &provider, const std::string &kind,
           const std::string &key, const nlohmann::json &value) const;

private:
  std::filesystem::path path(const std::string &provider,
                             const std::string &kind,
                             const std::string &key) const;
  std::filesystem::path root_;
};

struct ClientOptions {
  bool offline = true;
  std::filesystem::path fixture_dir; // used when offline
  std::optional<std::filesystem::path> cache_dir;
  std::string crossref_url = "https://api.crossref.org";
  std::string s2_url = "https://api.semanticscholar.org/v1";
  std::string scopus_url = "https://api.elsevier.com";
  HttpConfig http;
  /// API keys; empty values are filled from S2_API_KEY, SCOPUS_API_KEY and
  /// CROSSREF_MAILTO by `from_environment`.
  std::string s2_key, scopus_key, crossref_mailto;
  double title_threshold = kTitleMatchThreshold;
  std::function<void(const std::string &)> on_warning;

  void from_environment();
};

/// Provider fan-out with caching and merge rules: citation counts keep their
/// per-provider fields, references_count takes the maximum, every other
/// field is taken from the first provider (S2, Crossref, Scopus) that has
/// it. Candidates whose title fails `title_match` against the query are
/// discarded. Thread-safe.
class MetadataClient {
public:
  explicit MetadataClient(ClientOptions opts);
  /// For tests: explicit providers in precedence order.
  MetadataClient(std::vector<std::unique_ptr<Provider>> providers,
                 std::optional<std::filesystem::path> cache_dir = {},
                 std::function<void(const std::string &)> on_warning = {});

  ProviderRecord fetch(const PaperQuery &q);
  VenueMetrics fetch_venue_metrics(const std::string &issn);
  std::vector<AuthorMetrics>
  fetch_author_metrics(const std::vector<AuthorName> &authors);
  CitationGraph *graph();

  int provider_calls() const;
  std::vector<std::string> warnings() const;
  void set_title_threshold(double t) { title_threshold_ = t; }

private:
  void warn(const std::string &msg);
  template <class T, class Call>
  std::optional<T> cached(Provider &p, const std::string &kind,
                          const std::string &key, Call &&call);

  std::vector<std::unique_ptr<Provider>> providers_;
  std::optional<ResponseCache> cache_;
  std::function<void(const std::string &)> on_warning_;
  double title_threshold_ = kTitleMatchThreshold;
  mutable std::mutex mu_;
  int provider_calls_ = 0;
  std::vector<std::string> warnings_;
};

} // namespace reprofeat
