#include "reprofeat/metaclients.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "reprofeat/matchers.hpp"

namespace reprofeat {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class T>
void read_opt(const json &j, const char *key, std::optional<T> &out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    return;
  out = it->get<T>();
}

template <class T>
void write_opt(json &j, const char *key, const std::optional<T> &v) {
  if (v)
    j[key] = *v;
}

// Numbers that some APIs return as strings ("12", "1.43").
std::optional<double> loose_number(const json &j) {
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0')
      return v;
  }
  return std::nullopt;
}

const json *path(const json &j, std::initializer_list<const char *> keys) {
  const json *cur = &j;
  for (const char *k : keys) {
    if (cur->is_array()) {
      if (cur->empty())
        return nullptr;
      cur = &(*cur)[0];
    }
    if (!cur->is_object())
      return nullptr;
    auto it = cur->find(k);
    if (it == cur->end() || it->is_null())
      return nullptr;
    cur = &*it;
  }
  return cur;
}

json intents_json(const IntentCounts &c) {
  json j = json::object();
  write_opt(j, "background", c.background);
  write_opt(j, "methodology", c.methodology);
  write_opt(j, "result", c.result);
  return j;
}

IntentCounts intents_from(const json &j) {
  IntentCounts c;
  if (!j.is_object())
    return c;
  read_opt(j, "background", c.background);
  read_opt(j, "methodology", c.methodology);
  read_opt(j, "result", c.result);
  return c;
}

std::string url_encode(std::string_view s, bool keep_slash) {
  static const char *hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' ||
        (keep_slash && c == '/')) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::optional<json> read_json_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw Error(p.string() + ": " + e.what());
  }
}

} // namespace

bool ProviderRecord::empty() const { return *this == ProviderRecord{}; }

json to_json(const ProviderRecord &r) {
  json j = json::object();
  write_opt(j, "title", r.title);
  write_opt(j, "pub_year", r.pub_year);
  write_opt(j, "graph_id", r.graph_id);
  write_opt(j, "citations_scopus", r.citations_scopus);
  write_opt(j, "citations_crossref", r.citations_crossref);
  write_opt(j, "citation_velocity", r.citation_velocity);
  if (!r.per_year_citations.empty()) {
    json py = json::object();
    for (const auto &[y, c] : r.per_year_citations)
      py[std::to_string(y)] = c;
    j["per_year_citations"] = py;
  }
  write_opt(j, "influential_citation_count", r.influential_citation_count);
  write_opt(j, "influential_references_count", r.influential_references_count);
  write_opt(j, "references_count", r.references_count);
  write_opt(j, "open_access", r.open_access);
  if (!r.citing_paper_ids.empty())
    j["citing_paper_ids"] = r.citing_paper_ids;
  if (r.intents_in != IntentCounts{})
    j["intents_in"] = intents_json(r.intents_in);
  if (r.intents_out != IntentCounts{})
    j["intents_out"] = intents_json(r.intents_out);
  write_opt(j, "upstream_influential_methodology_count",
            r.upstream_influential_methodology_count);
  return j;
}

ProviderRecord provider_record_from_json(const json &j) {
  ProviderRecord r;
  if (!j.is_object())
    throw Error("provider record: expected an object");
  read_opt(j, "title", r.title);
  read_opt(j, "pub_year", r.pub_year);
  read_opt(j, "graph_id", r.graph_id);
  read_opt(j, "citations_scopus", r.citations_scopus);
  read_opt(j, "citations_crossref", r.citations_crossref);
  read_opt(j, "citation_velocity", r.citation_velocity);
  if (auto it = j.find("per_year_citations"); it != j.end() && it->is_object())
    for (const auto &[y, c] : it->items())
      r.per_year_citations[std::stoi(y)] = c.get<long long>();
  read_opt(j, "influential_citation_count", r.influential_citation_count);
  read_opt(j, "influential_references_count", r.influential_references_count);
  read_opt(j, "references_count", r.references_count);
  read_opt(j, "open_access", r.open_access);
  if (auto it = j.find("citing_paper_ids"); it != j.end() && it->is_array())
    r.citing_paper_ids = it->get<std::vector<std::string>>();
  if (auto it = j.find("intents_in"); it != j.end())
    r.intents_in = intents_from(*it);
  if (auto it = j.find("intents_out"); it != j.end())
    r.intents_out = intents_from(*it);
  read_opt(j, "upstream_influential_methodology_count",
           r.upstream_influential_methodology_count);
  return r;
}

json to_json(const VenueMetrics &v) {
  json j = json::object();
  write_opt(j, "cite_score", v.cite_score);
  write_opt(j, "snip", v.snip);
  write_opt(j, "scholarly_output", v.scholarly_output);
  write_opt(j, "percent_cited", v.percent_cited);
  write_opt(j, "citation_count", v.citation_count);
  write_opt(j, "sjr", v.sjr);
  write_opt(j, "asjc_code", v.asjc_code);
  write_opt(j, "subject_name", v.subject_name);
  return j;
}

VenueMetrics venue_metrics_from_json(const json &j) {
  VenueMetrics v;
  read_opt(j, "cite_score", v.cite_score);
  read_opt(j, "snip", v.snip);
  read_opt(j, "scholarly_output", v.scholarly_output);
  read_opt(j, "percent_cited", v.percent_cited);
  read_opt(j, "citation_count", v.citation_count);
  read_opt(j, "sjr", v.sjr);
  read_opt(j, "asjc_code", v.asjc_code);
  read_opt(j, "subject_name", v.subject_name);
  if (v.percent_cited && (*v.percent_cited < 0 || *v.percent_cited > 100))
    throw Error("venue metrics: percent_cited outside [0, 100]");
  return v;
}

json to_json(const AuthorMetrics &a) {
  json j = json::object();
  write_opt(j, "pub_count", a.pub_count);
  write_opt(j, "h_index", a.h_index);
  write_opt(j, "highly_influential_cites", a.highly_influential_cites);
  write_opt(j, "total_cites", a.total_cites);
  return j;
}

AuthorMetrics author_metrics_from_json(const json &j) {
  AuthorMetrics a;
  read_opt(j, "pub_count", a.pub_count);
  read_opt(j, "h_index", a.h_index);
  read_opt(j, "highly_influential_cites", a.highly_influential_cites);
  read_opt(j, "total_cites", a.total_cites);
  return a;
}

long long merged_citation_count(const ProviderRecord &r) {
  long long c = 0;
  if (r.citations_scopus)
    c = std::max(c, *r.citations_scopus);
  if (r.citations_crossref)
    c = std::max(c, *r.citations_crossref);
  return c;
}

std::string normalize_identifier(std::string_view id) {
  std::string s(id);
  std::string lower;
  for (char c : s)
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (std::string_view prefix :
       {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
        "http://dx.doi.org/", "doi:"}) {
    if (lower.starts_with(prefix)) {
      lower = lower.substr(prefix.size());
      break;
    }
  }
  const bool is_doi = lower.starts_with("10.");
  std::string base = is_doi ? lower : "title_" + normalize_text(s);
  std::string out;
  for (char c : base) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  if (out.size() > 160)
    out.resize(160);
  return out;
}

std::string author_key(const AuthorName &a) {
  std::string key = normalize_text(a.last);
  std::replace(key.begin(), key.end(), ' ', '_');
  const char ini = first_initial(a.first);
  if (ini)
    key += std::string("_") + ini;
  return key;
}

// ---------------------------------------------------------------------------

void InMemoryCitationGraph::add_paper(const std::string &id,
                                      std::optional<int> year,
                                      const std::vector<std::string> &refs) {
  auto &node = nodes_[id];
  node.year = year;
  for (const auto &r : refs) {
    if (std::find(node.references.begin(), node.references.end(), r) !=
        node.references.end())
      continue;
    node.references.push_back(r);
    nodes_[r].citers.push_back(id);
  }
}

InMemoryCitationGraph InMemoryCitationGraph::from_json(const json &j) {
  InMemoryCitationGraph g;
  const auto nodes = j.find("nodes");
  if (nodes == j.end() || !nodes->is_object())
    throw Error("citation graph: expected a 'nodes' object");
  for (const auto &[id, n] : nodes->items()) {
    std::optional<int> year;
    read_opt(n, "year", year);
    std::vector<std::string> refs;
    if (auto it = n.find("references"); it != n.end())
      refs = it->get<std::vector<std::string>>();
    g.add_paper(id, year, refs);
  }
  return g;
}

std::optional<std::vector<std::string>>
InMemoryCitationGraph::citers(const std::string &id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    return std::nullopt;
  return it->second.citers;
}

std::optional<std::vector<std::string>>
InMemoryCitationGraph::references(const std::string &id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    return std::nullopt;
  return it->second.references;
}

std::optional<int> InMemoryCitationGraph::year(const std::string &id) {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? std::nullopt : it->second.year;
}

// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(double per_second, double burst)
    : rate_(per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0)
    return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_;
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

HttpGetter::HttpGetter(std::string base_url, HttpConfig cfg,
                       std::vector<std::pair<std::string, std::string>> headers)
    : base_url_(std::move(base_url)), cfg_(cfg), headers_(std::move(headers)),
      limiter_(cfg.requests_per_second) {}

std::optional<json> HttpGetter::get_json(const std::string &rel) {
  // Split "scheme://host[:port][/prefix]".
  const auto scheme_end = base_url_.find("://");
  const auto path_begin = base_url_.find(
      '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string host = base_url_.substr(0, path_begin);
  const std::string prefix =
      path_begin == std::string::npos ? "" : base_url_.substr(path_begin);

  httplib::Client cli(host);
  cli.set_follow_location(true);
  cli.set_connection_timeout(cfg_.timeout);
  cli.set_read_timeout(cfg_.timeout);
  httplib::Headers headers;
  for (const auto &[k, v] : headers_)
    headers.emplace(k, v);

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(cfg_.initial_backoff * (1 << (attempt - 1)));
    limiter_.acquire();
    {
      std::lock_guard lock(count_mu_);
      ++requests_;
    }
    auto res = cli.Get(prefix + rel, headers);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error &e) {
        throw TransportError(base_url_ + rel + ": malformed JSON: " + e.what());
      }
    }
    if (res->status == 404)
      return std::nullopt;
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500)
      break;
  }
  throw TransportError(base_url_ + rel + ": " + last_error);
}

// ---------------------------------------------------------------------------

FixtureProvider::FixtureProvider(fs::path root, std::string section)
    : root_(std::move(root)), section_(std::move(section)) {}

std::optional<ProviderRecord> FixtureProvider::paper(const PaperQuery &q) {
  std::vector<std::string> keys;
  if (q.doi && !q.doi->empty())
    keys.push_back(normalize_identifier(*q.doi));
  if (!q.title.empty())
    keys.push_back(normalize_identifier(q.title));
  for (const auto &key : keys) {
    auto j = read_json_file(root_ / "papers" / (key + ".json"));
    if (!j)
      continue;
    auto it = j->find(section_);
    if (it == j->end() || it->is_null())
      return std::nullopt;
    return provider_record_from_json(*it);
  }
  return std::nullopt;
}

std::optional<VenueMetrics> FixtureProvider::venue(const std::string &issn) {
  if (section_ != "scopus")
    return std::nullopt;
  auto j = read_json_file(root_ / "venues" / (normalize_identifier(issn) + ".json"));
  if (!j)
    return std::nullopt;
  return venue_metrics_from_json(*j);
}

std::optional<AuthorMetrics> FixtureProvider::author(const AuthorName &a) {
  if (section_ != "s2")
    return std::nullopt;
  auto j = read_json_file(root_ / "authors" / (author_key(a) + ".json"));
  if (!j)
    return std::nullopt;
  return author_metrics_from_json(*j);
}

CitationGraph *FixtureProvider::graph() {
  if (section_ != "s2")
    return nullptr;
  std::call_once(graph_once_, [&] {
    if (auto j = read_json_file(root_ / "graph.json"))
      graph_ = std::make_unique<InMemoryCitationGraph>(
          InMemoryCitationGraph::from_json(*j));
  });
  return graph_.get();
}

// ---------------------------------------------------------------------------

CrossrefProvider::CrossrefProvider(std::string base_url, HttpConfig cfg,
                                   std::string mailto)
    : http_(std::move(base_url), cfg,
            mailto.empty()
                ? std::vector<std::pair<std::string, std::string>>{}
                : std::vector<std::pair<std::string, std::string>>{
                      {"User-Agent", "reprofeat (mailto:" + mailto + ")"}}) {}

ProviderRecord CrossrefProvider::parse_work(const json &m) {
  ProviderRecord r;
  if (auto t = path(m, {"title"}); t && t->is_array() && !t->empty())
    r.title = (*t)[0].get<std::string>();
  else if (t && t->is_string())
    r.title = t->get<std::string>();
  for (const char *field : {"published", "published-print", "issued"}) {
    if (auto dp = path(m, {field, "date-parts"});
        dp && dp->is_array() && !dp->empty() && (*dp)[0].is_array() &&
        !(*dp)[0].empty() && (*dp)[0][0].is_number_integer()) {
      r.pub_year = (*dp)[0][0].get<int>();
      break;
    }
  }
  if (auto c = path(m, {"is-referenced-by-count"}))
    r.citations_crossref = c->get<long long>();
  if (auto c = path(m, {"references-count"}))
    r.references_count = c->get<long long>();
  else if (auto c2 = path(m, {"reference-count"}))
    r.references_count = c2->get<long long>();
  return r;
}

std::optional<ProviderRecord> CrossrefProvider::paper(const PaperQuery &q) {
  if (q.doi && !q.doi->empty()) {
    auto j = http_.get_json("/works/" + url_encode(*q.doi, true));
    if (!j)
      return std::nullopt;
    if (auto m = path(*j, {"message"}))
      return parse_work(*m);
    return std::nullopt;
  }
  auto j = http_.get_json("/works?rows=5&query.bibliographic=" +
                          url_encode(q.title, false));
  if (!j)
    return std::nullopt;
  if (auto items = path(*j, {"message", "items"}); items && items->is_array())
    for (const auto &item : *items) {
      ProviderRecord r = parse_work(item);
      if (r.title && title_match(q.title, *r.title))
        return r;
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

SemanticScholarProvider::SemanticScholarProvider(std::string base_url,
                                                 HttpConfig cfg,
                                                 std::string api_key)
    : http_(std::move(base_url), cfg,
            api_key.empty()
                ? std::vector<std::pair<std::string, std::string>>{}
                : std::vector<std::pair<std::string, std::string>>{
                      {"x-api-key", api_key}}) {}

namespace {

bool has_intent(const json &entry, const char *intent) {
  auto it = entry.find("intent");
  if (it == entry.end() || !it->is_array())
    return false;
  return std::any_of(it->begin(), it->end(), [&](const json &x) {
    return x.is_string() && x.get<std::string>() == intent;
  });
}

bool is_influential(const json &entry) {
  auto it = entry.find("isInfluential");
  return it != entry.end() && it->is_boolean() && it->get<bool>();
}

} // namespace

ProviderRecord SemanticScholarProvider::parse_paper(const json &j) {
  ProviderRecord r;
  read_opt(j, "title", r.title);
  if (auto y = path(j, {"year"}); y && y->is_number_integer())
    r.pub_year = y->get<int>();
  read_opt(j, "paperId", r.graph_id);
  if (auto v = path(j, {"citationVelocity"}))
    r.citation_velocity = loose_number(*v);
  read_opt(j, "influentialCitationCount", r.influential_citation_count);
  read_opt(j, "isOpenAccess", r.open_access);
  if (auto cites = path(j, {"citations"}); cites && cites->is_array()) {
    IntentCounts in{0, 0, 0};
    for (const auto &c : *cites) {
      if (auto id = c.find("paperId"); id != c.end() && id->is_string())
        r.citing_paper_ids.push_back(id->get<std::string>());
      if (auto y = c.find("year"); y != c.end() && y->is_number_integer())
        ++r.per_year_citations[y->get<int>()];
      *in.background += has_intent(c, "background");
      *in.methodology += has_intent(c, "methodology");
      *in.result += has_intent(c, "result");
    }
    r.intents_in = in;
  }
  if (auto refs = path(j, {"references"}); refs && refs->is_array()) {
    IntentCounts out{0, 0, 0};
    long long influential = 0, upstream = 0;
    for (const auto &c : *refs) {
      *out.background += has_intent(c, "background");
      *out.methodology += has_intent(c, "methodology");
      *out.result += has_intent(c, "result");
      influential += is_influential(c);
      upstream += is_influential(c) && has_intent(c, "methodology");
    }
    r.intents_out = out;
    r.references_count = static_cast<long long>(refs->size());
    r.influential_references_count = influential;
    r.upstream_influential_methodology_count = upstream;
  }
  return r;
}

std::optional<ProviderRecord>
SemanticScholarProvider::paper(const PaperQuery &q) {
  std::optional<json> j;
  if (q.doi && !q.doi->empty())
    j = http_.get_json("/paper/" + url_encode(*q.doi, true));
  else
    j = http_.get_json("/paper/search?limit=5&query=" +
                       url_encode(q.title, false));
  if (!j)
    return std::nullopt;
  if (auto data = path(*j, {"data"}); data && data->is_array()) {
    for (const auto &hit : *data) {
      std::optional<std::string> t;
      read_opt(hit, "title", t);
      std::optional<std::string> id;
      read_opt(hit, "paperId", id);
      if (t && id && title_match(q.title, *t)) {
        auto full = http_.get_json("/paper/" + url_encode(*id, false));
        return full ? std::optional(parse_paper(*full)) : std::nullopt;
      }
    }
    return std::nullopt;
  }
  return parse_paper(*j);
}

std::optional<AuthorMetrics>
SemanticScholarProvider::author(const AuthorName &a) {
  auto j = http_.get_json(
      "/author/search?fields=paperCount,hIndex,citationCount,"
      "influentialCitationCount&query=" +
      url_encode(a.first + " " + a.last, false));
  if (!j)
    return std::nullopt;
  auto data = path(*j, {"data"});
  if (!data || !data->is_array() || data->empty())
    return std::nullopt;
  const json &hit = (*data)[0];
  AuthorMetrics m;
  if (auto v = path(hit, {"paperCount"}))
    m.pub_count = loose_number(*v);
  if (auto v = path(hit, {"hIndex"}))
    m.h_index = loose_number(*v);
  if (auto v = path(hit, {"influentialCitationCount"}))
    m.highly_influential_cites = loose_number(*v);
  if (auto v = path(hit, {"citationCount"}))
    m.total_cites = loose_number(*v);
  return m;
}

const json *SemanticScholarProvider::Graph::node(const std::string &id) {
  std::lock_guard lock(mu_);
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    it = nodes_.emplace(id, owner_.http_.get_json("/paper/" +
                                                  url_encode(id, false)))
             .first;
  return it->second ? &*it->second : nullptr;
}

std::optional<std::vector<std::string>>
SemanticScholarProvider::Graph::citers(const std::string &id) {
  const json *n = node(id);
  if (!n)
    return std::nullopt;
  return parse_paper(*n).citing_paper_ids;
}

std::optional<std::vector<std::string>>
SemanticScholarProvider::Graph::references(const std::string &id) {
  const json *n = node(id);
  if (!n)
    return std::nullopt;
  std::vector<std::string> out;
  if (auto refs = path(*n, {"references"}); refs && refs->is_array())
    for (const auto &r : *refs)
      if (auto pid = r.find("paperId"); pid != r.end() && pid->is_string())
        out.push_back(pid->get<std::string>());
  return out;
}

std::optional<int> SemanticScholarProvider::Graph::year(const std::string &id) {
  const json *n = node(id);
  if (!n)
    return std::nullopt;
  return parse_paper(*n).pub_year;
}

// ---------------------------------------------------------------------------

ScopusProvider::ScopusProvider(std::string api_key, std::string base_url,
                               HttpConfig cfg)
    : http_(std::move(base_url), cfg,
            {{"X-ELS-APIKey", std::move(api_key)},
             {"Accept", "application/json"}}) {}

std::optional<ProviderRecord> ScopusProvider::paper(const PaperQuery &q) {
  if (!q.doi || q.doi->empty())
    return std::nullopt;
  auto j = http_.get_json("/content/abstract/doi/" + url_encode(*q.doi, true));
  if (!j)
    return std::nullopt;
  const json *core = path(*j, {"abstracts-retrieval-response", "coredata"});
  if (!core)
    return std::nullopt;
  ProviderRecord r;
  read_opt(*core, "dc:title", r.title);
  if (auto c = path(*core, {"citedby-count"}))
    if (auto v = loose_number(*c))
      r.citations_scopus = static_cast<long long>(*v);
  if (auto oa = path(*core, {"openaccessFlag"})) {
    if (oa->is_boolean())
      r.open_access = oa->get<bool>();
    else if (oa->is_string())
      r.open_access = oa->get<std::string>() == "true";
  }
  if (auto d = path(*core, {"prism:coverDate"}); d && d->is_string()) {
    const std::string s = d->get<std::string>();
    if (s.size() >= 4)
      r.pub_year = std::atoi(s.substr(0, 4).c_str());
  }
  return r;
}

VenueMetrics ScopusProvider::parse_serial(const json &e) {
  VenueMetrics v;
  if (auto c = path(e, {"citeScoreYearInfoList", "citeScoreCurrentMetric"}))
    v.cite_score = loose_number(*c);
  if (auto s = path(e, {"SNIPList", "SNIP", "$"}))
    v.snip = loose_number(*s);
  if (auto s = path(e, {"SJRList", "SJR", "$"}))
    v.sjr = loose_number(*s);
  if (auto info = path(e, {"citeScoreYearInfoList", "citeScoreYearInfo",
                           "citeScoreInformationList", "citeScoreInfo"})) {
    if (auto x = path(*info, {"scholarlyOutput"}))
      v.scholarly_output = loose_number(*x);
    if (auto x = path(*info, {"percentCited"}))
      v.percent_cited = loose_number(*x);
    if (auto x = path(*info, {"citationCount"}))
      v.citation_count = loose_number(*x);
  }
  if (auto area = path(e, {"subject-area"})) {
    if (auto code = path(*area, {"@code"}))
      if (auto c = loose_number(*code))
        v.asjc_code = static_cast<int>(*c);
    if (auto name = path(*area, {"$"}); name && name->is_string())
      v.subject_name = name->get<std::string>();
  }
  return v;
}

std::optional<VenueMetrics> ScopusProvider::venue(const std::string &issn) {
  auto j = http_.get_json("/content/serial/title/issn/" +
                          url_encode(issn, false) + "?view=ENHANCED");
  if (!j)
    return std::nullopt;
  if (auto entry = path(*j, {"serial-metadata-response", "entry"}))
    return parse_serial(*entry);
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {}

fs::path ResponseCache::path(const std::string &provider,
                             const std::string &kind,
                             const std::string &key) const {
  return root_ / provider / kind / (key + ".json");
}

std::optional<json> ResponseCache::get(const std::string &provider,
                                       const std::string &kind,
                                       const std::string &key) const {
  return read_json_file(path(provider, kind, key));
}

void ResponseCache::put(const std::string &provider, const std::string &kind,
                        const std::string &key, const json &value) const {
  const fs::path target = path(provider, kind, key);
  fs::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  std::ostringstream tmp_name;
  tmp_name << target.filename().string() << ".tmp."
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << counter++;
  const fs::path tmp = target.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write cache file " + tmp.string());
    out << value.dump() << "\n";
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------

void ClientOptions::from_environment() {
  auto env = [](const char *name) {
    const char *v = std::getenv(name);
    return v ? std::string(v) : std::string();
  };
  if (s2_key.empty())
    s2_key = env("S2_API_KEY");
  if (scopus_key.empty())
    scopus_key = env("SCOPUS_API_KEY");
  if (crossref_mailto.empty())
    crossref_mailto = env("CROSSREF_MAILTO");
}

MetadataClient::MetadataClient(ClientOptions opts)
    : on_warning_(std::move(opts.on_warning)),
      title_threshold_(opts.title_threshold) {
  if (opts.offline) {
    for (const char *section : {"s2", "crossref", "scopus"})
      providers_.push_back(
          std::make_unique<FixtureProvider>(opts.fixture_dir, section));
  } else {
    providers_.push_back(std::make_unique<SemanticScholarProvider>(
        opts.s2_url, opts.http, opts.s2_key));
    providers_.push_back(std::make_unique<CrossrefProvider>(
        opts.crossref_url, opts.http, opts.crossref_mailto));
    if (!opts.scopus_key.empty())
      providers_.push_back(std::make_unique<ScopusProvider>(
          opts.scopus_key, opts.scopus_url, opts.http));
  }
  if (opts.cache_dir)
    cache_.emplace(*opts.cache_dir);
}

MetadataClient::MetadataClient(
    std::vector<std::unique_ptr<Provider>> providers,
    std::optional<fs::path> cache_dir,
    std::function<void(const std::string &)> on_warning)
    : providers_(std::move(providers)), on_warning_(std::move(on_warning)) {
  if (cache_dir)
    cache_.emplace(*cache_dir);
}

void MetadataClient::warn(const std::string &msg) {
  {
    std::lock_guard lock(mu_);
    warnings_.push_back(msg);
  }
  if (on_warning_)
    on_warning_(msg);
}

int MetadataClient::provider_calls() const {
  std::lock_guard lock(mu_);
  return provider_calls_;
}

std::vector<std::string> MetadataClient::warnings() const {
  std::lock_guard lock(mu_);
  return warnings_;
}

namespace {

json wrap(const std::optional<ProviderRecord> &r) {
  return r ? json{{"found", true}, {"value", to_json(*r)}}
           : json{{"found", false}};
}
json wrap(const std::optional<VenueMetrics> &v) {
  return v ? json{{"found", true}, {"value", to_json(*v)}}
           : json{{"found", false}};
}
json wrap(const std::optional<AuthorMetrics> &a) {
  return a ? json{{"found", true}, {"value", to_json(*a)}}
           : json{{"found", false}};
}

template <class T> std::optional<T> unwrap(const json &j);
template <> std::optional<ProviderRecord> unwrap(const json &j) {
  if (!j.value("found", false))
    return std::nullopt;
  return provider_record_from_json(j.at("value"));
}
template <> std::optional<VenueMetrics> unwrap(const json &j) {
  if (!j.value("found", false))
    return std::nullopt;
  return venue_metrics_from_json(j.at("value"));
}
template <> std::optional<AuthorMetrics> unwrap(const json &j) {
  if (!j.value("found", false))
    return std::nullopt;
  return author_metrics_from_json(j.at("value"));
}

template <class T> void take_first(std::optional<T> &dst, const std::optional<T> &src) {
  if (!dst && src)
    dst = src;
}

void merge_into(ProviderRecord &dst, const ProviderRecord &src) {
  take_first(dst.title, src.title);
  take_first(dst.pub_year, src.pub_year);
  take_first(dst.graph_id, src.graph_id);
  take_first(dst.citations_scopus, src.citations_scopus);
  take_first(dst.citations_crossref, src.citations_crossref);
  take_first(dst.citation_velocity, src.citation_velocity);
  if (dst.per_year_citations.empty())
    dst.per_year_citations = src.per_year_citations;
  take_first(dst.influential_citation_count, src.influential_citation_count);
  take_first(dst.influential_references_count,
             src.influential_references_count);
  if (src.references_count)
    dst.references_count =
        std::max(dst.references_count.value_or(0), *src.references_count);
  take_first(dst.open_access, src.open_access);
  if (dst.citing_paper_ids.empty())
    dst.citing_paper_ids = src.citing_paper_ids;
  take_first(dst.intents_in.background, src.intents_in.background);
  take_first(dst.intents_in.methodology, src.intents_in.methodology);
  take_first(dst.intents_in.result, src.intents_in.result);
  take_first(dst.intents_out.background, src.intents_out.background);
  take_first(dst.intents_out.methodology, src.intents_out.methodology);
  take_first(dst.intents_out.result, src.intents_out.result);
  take_first(dst.upstream_influential_methodology_count,
             src.upstream_influential_methodology_count);
}

} // namespace

template <class T, class Call>
std::optional<T> MetadataClient::cached(Provider &p, const std::string &kind,
                                        const std::string &key, Call &&call) {
  if (cache_)
    if (auto hit = cache_->get(p.name(), kind, key))
      return unwrap<T>(*hit);
  std::optional<T> result;
  {
    std::lock_guard lock(mu_);
    ++provider_calls_;
  }
  try {
    result = call();
  } catch (const Error &e) {
    warn(p.name() + " " + kind + " lookup failed for '" + key +
         "': " + e.what());
    return std::nullopt; // transport failures are not cached
  }
  if (cache_)
    cache_->put(p.name(), kind, key, wrap(result));
  return result;
}

ProviderRecord MetadataClient::fetch(const PaperQuery &q) {
  const std::string key = normalize_identifier(
      q.doi && !q.doi->empty() ? std::string_view(*q.doi) : q.title);
  ProviderRecord merged;
  for (auto &p : providers_) {
    auto rec = cached<ProviderRecord>(*p, "paper", key,
                                      [&] { return p->paper(q); });
    if (!rec)
      continue;
    if (rec->title && !q.title.empty() && !title_match(q.title, *rec->title, title_threshold_)) {
      warn(p->name() + ": rejected candidate '" + *rec->title +
           "' for query '" + q.title + "' (title mismatch)");
      continue;
    }
    merge_into(merged, *rec);
  }
  return merged;
}

VenueMetrics MetadataClient::fetch_venue_metrics(const std::string &issn) {
  const std::string key = normalize_identifier(issn);
  VenueMetrics merged;
  for (auto &p : providers_) {
    auto v = cached<VenueMetrics>(*p, "venue", key,
                                  [&] { return p->venue(issn); });
    if (!v)
      continue;
    take_first(merged.cite_score, v->cite_score);
    take_first(merged.snip, v->snip);
    take_first(merged.scholarly_output, v->scholarly_output);
    take_first(merged.percent_cited, v->percent_cited);
    take_first(merged.citation_count, v->citation_count);
    take_first(merged.sjr, v->sjr);
    take_first(merged.asjc_code, v->asjc_code);
    take_first(merged.subject_name, v->subject_name);
  }
  return merged;
}

std::vector<AuthorMetrics>
MetadataClient::fetch_author_metrics(const std::vector<AuthorName> &authors) {
  std::vector<AuthorMetrics> out;
  for (const auto &a : authors) {
    AuthorMetrics merged;
    for (auto &p : providers_) {
      auto m = cached<AuthorMetrics>(*p, "author", author_key(a),
                                     [&] { return p->author(a); });
      if (!m)
        continue;
      take_first(merged.pub_count, m->pub_count);
      take_first(merged.h_index, m->h_index);
      take_first(merged.highly_influential_cites, m->highly_influential_cites);
      take_first(merged.total_cites, m->total_cites);
    }
    out.push_back(merged);
  }
  return out;
}

CitationGraph *MetadataClient::graph() {
  for (auto &p : providers_)
    if (auto *g = p->graph())
      return g;
  return nullptr;
}

} // namespace reprofeat
