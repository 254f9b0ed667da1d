#include "reprofeat/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace reprofeat {

namespace fs = std::filesystem;

std::size_t feature_index(std::string_view name) {
  auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
  if (it == kFeatureNames.end())
    throw Error("unknown feature: " + std::string(name));
  return static_cast<std::size_t>(it - kFeatureNames.begin());
}

bool is_categorical_feature(std::string_view name) {
  return name == "subject" || name == "subject_code";
}

// ---------------------------------------------------------------------------

void SubjectTable::add(int code, std::string_view name) {
  names_[code] = std::string(name);
  by_name_[normalize_text(name)] = code;
}

SubjectTable SubjectTable::load(const fs::path &file) {
  std::ifstream in(file);
  if (!in)
    throw Error("cannot open subject table: " + file.string());
  SubjectTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(file.string() + ": expected 'code<TAB>name': " + line);
    t.add(std::stoi(line.substr(0, tab)), line.substr(tab + 1));
  }
  return t;
}

std::optional<int> SubjectTable::code_for(std::string_view field_name) const {
  auto it = by_name_.find(normalize_text(field_name));
  if (it == by_name_.end())
    return std::nullopt;
  return it->second;
}

int SubjectTable::area_id(int code) {
  const int group = code / 100;
  switch (group) {
  case 10:
    return 1;
  case 11: case 13: case 24: case 28: case 30:
    return 2;
  case 12: case 14: case 18: case 20: case 32: case 33:
    return 3;
  case 15: case 16: case 17: case 19: case 21: case 22: case 23: case 25:
  case 26: case 31:
    return 4;
  case 27: case 29: case 34: case 35: case 36:
    return 5;
  default:
    return 0;
  }
}

// ---------------------------------------------------------------------------

CoCitation co_citation_features(const std::string &target_id, int pub_year,
                                CitationGraph *graph) {
  CoCitation out;
  if (!graph)
    return out;
  auto citers = graph->citers(target_id);
  if (!citers)
    return out;
  out.is_default = false;

  const std::set<std::string> cited_by_target_citers(citers->begin(),
                                                     citers->end());
  std::set<std::string> candidates;
  for (const auto &a : cited_by_target_citers)
    if (auto refs = graph->references(a))
      for (const auto &q : *refs)
        if (q != target_id)
          candidates.insert(q);

  for (const auto &q : candidates) {
    auto q_citers = graph->citers(q);
    if (!q_citers)
      continue;
    const std::set<std::string> sb(q_citers->begin(), q_citers->end());
    std::size_t index = 0;
    for (const auto &a : cited_by_target_citers)
      index += sb.count(a);
    if (index == 0)
      continue;
    auto y = graph->year(q);
    if (!y)
      continue;
    if (*y >= pub_year && *y <= pub_year + 2)
      ++out.cocite2;
    if (*y >= pub_year && *y <= pub_year + 3)
      ++out.cocite3;
  }
  return out;
}

bool funding_heuristic(std::string_view ack_text) {
  static const std::vector<std::string> phrases = {
      "funded by", "supported by", "grant", "grants", "funding",
      "financial support", "fellowship",
      "national science foundation", "nsf", "nih",
      "national institutes of health", "european research council", "erc",
      "darpa", "dfg", "deutsche forschungsgemeinschaft", "esrc", "nserc",
      "sshrc", "wellcome trust", "economic and social research council",
      "templeton"};
  const std::string text = " " + normalize_text(ack_text) + " ";
  return std::any_of(phrases.begin(), phrases.end(), [&](const auto &p) {
    return text.find(" " + p + " ") != std::string::npos;
  });
}

FeatureVector derive_features(const PaperRecord &rec,
                              const ProviderRecord &meta,
                              const VenueMetrics &venue,
                              const std::vector<AuthorMetrics> &authors,
                              const StatFeatures &stats,
                              const RankTable &rank, int now_year,
                              const std::optional<CoCitation> &cocite,
                              const SubjectTable &subjects,
                              const MatchThresholds &thresholds) {
  if (now_year < rec.pub_year)
    throw Error("now_year " + std::to_string(now_year) +
                " precedes publication year of " + rec.id);

  FeatureVector f;
  f.paper_id = rec.id;
  f.is_default.fill(true);
  auto set = [&](std::string_view name, double v, bool is_default = false) {
    const std::size_t i = feature_index(name);
    f.values[i] = v;
    f.is_default[i] = is_default;
  };
  auto set_opt = [&](std::string_view name, const auto &opt,
                     double fallback = 0.0) {
    if (opt)
      set(name, static_cast<double>(*opt));
    else
      set(name, fallback, true);
  };

  const int age = now_year - rec.pub_year;

  // bibliometric
  const bool have_count = meta.citations_scopus || meta.citations_crossref;
  const double citations = static_cast<double>(merged_citation_count(meta));
  set("num_citations", citations, !have_count);
  if (have_count && age > 0)
    set("normalized_citations", citations / age);
  else
    set("normalized_citations", 0.0, true);
  set_opt("citation_Velocity", meta.citation_velocity);

  const int window = std::min(3, age);
  if (window > 0 && !meta.per_year_citations.empty()) {
    double sum = 0;
    for (int i = 1; i <= window; ++i) {
      auto it = meta.per_year_citations.find(rec.pub_year + i - 1);
      if (it != meta.per_year_citations.end())
        sum += static_cast<double>(it->second);
    }
    set("citation_next", sum / window);
  } else {
    set("citation_next", 0.0, true);
  }
  set_opt("influentialCitationCount", meta.influential_citation_count);
  set_opt("influentialReferencesCount", meta.influential_references_count);
  set_opt("references_count", meta.references_count);

  const SelfCitation sc = self_citation_ratio(rec.authors, rec.references, thresholds.author);
  set("self_citations", sc.ratio, sc.is_default);
  if (meta.open_access)
    set("openaccessflag", *meta.open_access ? 1.0 : 0.0);
  else
    set("openaccessflag", 0.0, true);
  set("age", age);
  if (cocite && !cocite->is_default) {
    set("coCite2", cocite->cocite2);
    set("coCite3", cocite->cocite3);
  } else {
    set("coCite2", 0.0, true);
    set("coCite3", 0.0, true);
  }
  const URank ur = u_rank(rec.affiliations, rank, thresholds.university);
  set("u_rank", ur.value, ur.is_default);

  // author
  set("author_count", static_cast<double>(rec.authors.size()),
      rec.authors.empty());
  auto mean_of = [&](std::string_view name, auto member) {
    double sum = 0;
    int n = 0;
    for (const auto &a : authors)
      if (const auto &v = a.*member) {
        sum += *v;
        ++n;
      }
    if (n > 0)
      set(name, sum / n);
    else
      set(name, 0.0, true);
  };
  mean_of("avg_pub", &AuthorMetrics::pub_count);
  mean_of("avg_hidx", &AuthorMetrics::h_index);
  mean_of("avg_high_inf_cites", &AuthorMetrics::highly_influential_cites);
  mean_of("avg_auth_cites", &AuthorMetrics::total_cites);

  // venue
  set_opt("Venue_CiteScore", venue.cite_score);
  set_opt("Venue_SNIP", venue.snip);
  set_opt("Venue_Scholarly_Output", venue.scholarly_output);
  set_opt("Venue_Percent_Cited", venue.percent_cited);
  set_opt("Venue_Citation_Count", venue.citation_count);
  set_opt("SJR", venue.sjr);

  // statistical
  const auto &d = stats.is_default;
  set("real_p", stats.real_p, d.real_p);
  set("real_p_sign", stats.real_p_sign, d.real_p_sign);
  set("p_val_range", stats.p_val_range, d.p_val_range);
  set("num_hypo_tested", stats.num_hypo_tested, d.num_hypo_tested);
  set("extend_p", stats.extend_p ? 1.0 : 0.0, d.extend_p);
  set("num_significant", stats.num_significant, d.num_significant);
  set("sample_size", stats.sample_size.value_or(0),
      d.sample_size || !stats.sample_size);

  // semantic
  set_opt("reference_background", meta.intents_out.background);
  set_opt("reference_methodology", meta.intents_out.methodology);
  set_opt("reference_result", meta.intents_out.result);
  set_opt("citations_background", meta.intents_in.background);
  set_opt("citations_methodology", meta.intents_in.methodology);
  set_opt("citations_result", meta.intents_in.result);
  set_opt("upstream_influential_methodology_count",
          meta.upstream_influential_methodology_count);
  if (rec.funded_override)
    set("funded", *rec.funded_override ? 1.0 : 0.0);
  else if (rec.ack_text && !rec.ack_text->empty())
    set("funded", funding_heuristic(*rec.ack_text) ? 1.0 : 0.0);
  else
    set("funded", 0.0, true);

  std::optional<int> code = venue.asjc_code;
  if (!code && venue.subject_name)
    code = subjects.code_for(*venue.subject_name);
  if (code) {
    set("subject", *code);
    set("subject_code", SubjectTable::area_id(*code),
        SubjectTable::area_id(*code) == 0);
  } else {
    set("subject", 0.0, true);
    set("subject_code", 0.0, true);
  }
  return f;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> FeatureMatrix::column(std::string_view name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end())
    return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

std::size_t FeatureMatrix::real_count(std::size_t col) const {
  std::size_t n = 0;
  for (Eigen::Index r = 0; r < is_default.rows(); ++r)
    n += is_default(r, static_cast<Eigen::Index>(col)) ? 0 : 1;
  return n;
}

FeatureMatrix
FeatureMatrix::select_columns(const std::vector<std::size_t> &cols) const {
  FeatureMatrix out;
  out.paper_ids = paper_ids;
  out.labels = labels;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
  out.is_default.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] >= feature_names.size())
      throw Error("column index out of range");
    out.feature_names.push_back(feature_names[cols[j]]);
    out.values.col(static_cast<Eigen::Index>(j)) =
        values.col(static_cast<Eigen::Index>(cols[j]));
    out.is_default.col(static_cast<Eigen::Index>(j)) =
        is_default.col(static_cast<Eigen::Index>(cols[j]));
  }
  return out;
}

FeatureMatrix
FeatureMatrix::select_columns(const std::vector<std::string> &names) const {
  std::vector<std::size_t> cols;
  for (const auto &n : names) {
    auto c = column(n);
    if (!c)
      throw Error("feature not present in matrix: " + n);
    cols.push_back(*c);
  }
  return select_columns(cols);
}

FeatureMatrix
FeatureMatrix::select_rows(const std::vector<std::size_t> &rows) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.is_default.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.paper_ids.push_back(paper_ids.at(rows[i]));
    out.labels.push_back(labels.at(rows[i]));
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(r);
    out.is_default.row(static_cast<Eigen::Index>(i)) = is_default.row(r);
  }
  return out;
}

FeatureMatrix FeatureMatrix::labeled_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i])
      rows.push_back(i);
  return select_rows(rows);
}

std::vector<int> FeatureMatrix::binary_labels() const {
  std::vector<int> y;
  for (const auto &l : labels) {
    if (!l)
      throw Error("matrix has rows without labels");
    y.push_back(*l ? 1 : 0);
  }
  return y;
}

FeatureMatrix assemble_matrix(const std::vector<FeatureVector> &vectors,
                              const std::vector<std::optional<bool>> &labels) {
  if (vectors.size() != labels.size())
    throw Error("assemble_matrix: " + std::to_string(vectors.size()) +
                " vectors but " + std::to_string(labels.size()) + " labels");
  FeatureMatrix m;
  m.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  const auto n = static_cast<Eigen::Index>(vectors.size());
  m.values.resize(n, kFeatureCount);
  m.is_default.resize(n, kFeatureCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &v = vectors[static_cast<std::size_t>(i)];
    m.paper_ids.push_back(v.paper_id);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      m.values(i, static_cast<Eigen::Index>(j)) = v.values[j];
      m.is_default(i, static_cast<Eigen::Index>(j)) = v.is_default[j];
    }
  }
  m.labels = labels;
  return m;
}

FeatureMatrix filter_core_features(const FeatureMatrix &m, int min_real) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (static_cast<long long>(m.real_count(j)) >= min_real)
      keep.push_back(j);
  return m.select_columns(keep);
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  if (v == 0.0)
    return "0"; // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string &s, const std::string &where) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    if (s == "inf")
      return std::numeric_limits<double>::infinity();
    throw Error(where + ": not a number: '" + s + "'");
  }
  return v;
}

void write_table(const FeatureMatrix &m, const fs::path &file,
                 const std::vector<std::string> &provenance, bool mask) {
  if (!file.parent_path().empty())
    fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot write " + file.string());
  for (const auto &p : provenance)
    out << "# " << p << "\n";
  out << "paper_id,label";
  for (const auto &n : m.feature_names)
    out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.paper_ids[i].find(',') != std::string::npos)
      throw Error("paper id contains a comma: " + m.paper_ids[i]);
    out << m.paper_ids[i] << ','
        << (m.labels[i] ? (*m.labels[i] ? "1" : "0") : "unknown");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      out << ',';
      if (mask)
        out << (m.is_default(r, c) ? '1' : '0');
      else
        out << format_number(m.values(r, c));
    }
    out << '\n';
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path &file) {
  std::ifstream in(file);
  if (!in)
    throw Error("cannot open " + file.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r")
      continue;
    auto cells = split_csv(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      if (t.header.size() < 2 || t.header[0] != "paper_id" ||
          t.header[1] != "label")
        throw Error(file.string() + ": header must start with paper_id,label");
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(file.string() + ": row has " + std::to_string(cells.size()) +
                  " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

} // namespace

void write_matrix(const FeatureMatrix &m, const fs::path &values_csv,
                  const fs::path &mask_csv,
                  const std::vector<std::string> &provenance) {
  write_table(m, values_csv, provenance, false);
  write_table(m, mask_csv, provenance, true);
}

FeatureMatrix read_matrix(const fs::path &values_csv, const fs::path &mask_csv) {
  const Table vt = read_table(values_csv);
  FeatureMatrix m;
  m.feature_names.assign(vt.header.begin() + 2, vt.header.end());
  const auto n = static_cast<Eigen::Index>(vt.rows.size());
  const auto d = static_cast<Eigen::Index>(m.feature_names.size());
  m.values.resize(n, d);
  m.is_default = MaskMatrix::Constant(n, d, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = vt.rows[static_cast<std::size_t>(i)];
    m.paper_ids.push_back(row[0]);
    if (row[1] == "1")
      m.labels.emplace_back(true);
    else if (row[1] == "0")
      m.labels.emplace_back(false);
    else
      m.labels.emplace_back(std::nullopt);
    for (Eigen::Index j = 0; j < d; ++j)
      m.values(i, j) = parse_double(row[static_cast<std::size_t>(j) + 2],
                                    values_csv.string());
  }
  if (!mask_csv.empty() && fs::exists(mask_csv)) {
    const Table mt = read_table(mask_csv);
    if (mt.header != vt.header || mt.rows.size() != vt.rows.size())
      throw Error(mask_csv.string() + ": shape differs from " +
                  values_csv.string());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        m.is_default(i, j) =
            mt.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 2] == "1";
  }
  return m;
}

} // namespace reprofeat
