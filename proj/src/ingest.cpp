#include "reprofeat/ingest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace reprofeat {

using nlohmann::json;
namespace fs = std::filesystem;

SchemaError::SchemaError(std::string file, std::string field,
                         const std::string &what)
    : Error(file + ": field '" + field + "': " + what), file_(std::move(file)),
      field_(std::move(field)) {}

int current_calendar_year() {
  const auto now = std::chrono::system_clock::now();
  const std::chrono::year_month_day ymd{
      std::chrono::floor<std::chrono::days>(now)};
  return static_cast<int>(ymd.year());
}

AuthorName split_author_name(std::string_view full) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n'; };
  while (!full.empty() && is_space(full.front()))
    full.remove_prefix(1);
  while (!full.empty() && is_space(full.back()))
    full.remove_suffix(1);
  auto pos = full.find_last_of(" \t\n");
  if (pos == std::string_view::npos)
    return {std::string(full), ""};
  std::string_view first = full.substr(0, pos);
  while (!first.empty() && is_space(first.back()))
    first.remove_suffix(1);
  return {std::string(full.substr(pos + 1)), std::string(first)};
}

ValidationReport validate_record(const PaperRecord &r,
                                 std::optional<int> current_year) {
  ValidationReport out;
  const int now = current_year.value_or(current_calendar_year());
  if (r.title.empty())
    out.push_back({"title", "must be non-empty"});
  if (r.pub_year < 1900 || r.pub_year > now)
    out.push_back({"pub_year", "must lie in [1900, current year]"});
  if (r.title.empty() && (!r.doi || r.doi->empty()))
    out.push_back({"doi/title", "identifier missing"});
  for (std::size_t i = 0; i < r.authors.size(); ++i)
    if (r.authors[i].last.empty())
      out.push_back({"authors[" + std::to_string(i) + "].last",
                     "must be non-empty"});
  for (std::size_t i = 0; i < r.references.size(); ++i) {
    const auto &ref = r.references[i];
    const bool any = (ref.title && !ref.title->empty()) ||
                     (ref.doi && !ref.doi->empty()) || !ref.authors.empty() ||
                     ref.year.has_value();
    if (!any)
      out.push_back({"references[" + std::to_string(i) + "]",
                     "at least one field must be non-empty"});
  }
  return out;
}

namespace {

std::optional<std::string> opt_string(const json &j, const char *key,
                                      const std::string &src) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    return std::nullopt;
  if (!it->is_string())
    throw SchemaError(src, key, "expected a string");
  return it->get<std::string>();
}

AuthorName parse_author(const json &j, const std::string &src,
                        const std::string &field) {
  if (j.is_string())
    return split_author_name(j.get<std::string>());
  if (!j.is_object())
    throw SchemaError(src, field, "expected an object or a string");
  AuthorName a;
  a.last = opt_string(j, "last", src).value_or("");
  a.first = opt_string(j, "first", src).value_or("");
  return a;
}

std::vector<AuthorName> parse_authors(const json &j, const char *key,
                                      const std::string &src) {
  std::vector<AuthorName> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    return out;
  if (!it->is_array())
    throw SchemaError(src, key, "expected an array");
  for (std::size_t i = 0; i < it->size(); ++i)
    out.push_back(parse_author((*it)[i], src,
                               std::string(key) + "[" + std::to_string(i) +
                                   "]"));
  return out;
}

json author_json(const AuthorName &a) {
  return json{{"last", a.last}, {"first", a.first}};
}

template <class T> void put_opt(json &j, const char *key, const std::optional<T> &v) {
  if (v)
    j[key] = *v;
}

} // namespace

PaperRecord parse_record(const std::string &json_text,
                         const std::string &source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw SchemaError(source, "<document>", e.what());
  }
  if (!j.is_object())
    throw SchemaError(source, "<document>", "expected a JSON object");

  PaperRecord r;
  r.doi = opt_string(j, "doi", source);
  auto title = opt_string(j, "title", source);
  if (!title)
    throw SchemaError(source, "title", "missing");
  r.title = *title;

  auto py = j.find("pub_year");
  if (py == j.end() || !py->is_number_integer())
    throw SchemaError(source, "pub_year", "missing or not an integer");
  r.pub_year = py->get<int>();

  r.authors = parse_authors(j, "authors", source);
  if (auto it = j.find("affiliations"); it != j.end() && !it->is_null()) {
    if (!it->is_array())
      throw SchemaError(source, "affiliations", "expected an array");
    for (const auto &a : *it) {
      if (!a.is_string() && !a.is_null())
        throw SchemaError(source, "affiliations", "expected strings");
      r.affiliations.push_back(a.is_string() ? a.get<std::string>() : "");
    }
  }
  if (auto it = j.find("references"); it != j.end() && !it->is_null()) {
    if (!it->is_array())
      throw SchemaError(source, "references", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto &rj = (*it)[i];
      const std::string field = "references[" + std::to_string(i) + "]";
      if (!rj.is_object())
        throw SchemaError(source, field, "expected an object");
      ReferenceEntry ref;
      ref.title = opt_string(rj, "title", source);
      ref.doi = opt_string(rj, "doi", source);
      ref.authors = parse_authors(rj, "authors", source);
      if (auto y = rj.find("year"); y != rj.end() && !y->is_null()) {
        if (!y->is_number_integer())
          throw SchemaError(source, field + ".year", "expected an integer");
        ref.year = y->get<int>();
      }
      r.references.push_back(std::move(ref));
    }
  }
  r.venue_issn = opt_string(j, "venue_issn", source);
  r.body_text = opt_string(j, "body_text", source).value_or("");
  r.ack_text = opt_string(j, "ack_text", source);
  for (const char *key : {"funded", "label"}) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
      continue;
    if (!it->is_boolean())
      throw SchemaError(source, key, "expected a boolean");
    (key[0] == 'f' ? r.funded_override : r.label) = it->get<bool>();
  }
  r.id = opt_string(j, "id", source).value_or("");

  auto violations = validate_record(r);
  if (!violations.empty())
    throw SchemaError(source, violations.front().field,
                      violations.front().rule);
  return r;
}

std::string serialize_record(const PaperRecord &r) {
  json j;
  j["id"] = r.id;
  put_opt(j, "doi", r.doi);
  j["title"] = r.title;
  j["pub_year"] = r.pub_year;
  j["authors"] = json::array();
  for (const auto &a : r.authors)
    j["authors"].push_back(author_json(a));
  j["affiliations"] = r.affiliations;
  j["references"] = json::array();
  for (const auto &ref : r.references) {
    json rj = json::object();
    put_opt(rj, "title", ref.title);
    put_opt(rj, "doi", ref.doi);
    rj["authors"] = json::array();
    for (const auto &a : ref.authors)
      rj["authors"].push_back(author_json(a));
    put_opt(rj, "year", ref.year);
    j["references"].push_back(std::move(rj));
  }
  put_opt(j, "venue_issn", r.venue_issn);
  j["body_text"] = r.body_text;
  put_opt(j, "ack_text", r.ack_text);
  put_opt(j, "funded", r.funded_override);
  put_opt(j, "label", r.label);
  return j.dump(2) + "\n";
}

PaperRecord load_record(const fs::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw Error("cannot open record file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  PaperRecord r = parse_record(ss.str(), file.string());
  if (r.id.empty())
    r.id = file.stem().string();
  return r;
}

namespace {

std::string trim(std::string s) {
  const char *ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

} // namespace

std::vector<PaperRecord> load_corpus(const fs::path &path) {
  if (!fs::exists(path))
    throw Error("corpus path does not exist: " + path.string());
  const fs::path manifest =
      fs::is_directory(path) ? path / "manifest.csv" : path;
  std::ifstream in(manifest);
  if (!in)
    throw Error("cannot open manifest: " + manifest.string());
  const fs::path base = manifest.parent_path();

  std::vector<PaperRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw SchemaError(manifest.string(), "line " + std::to_string(lineno),
                        "expected 'relative_path,label'");
    const std::string rel = trim(line.substr(0, comma));
    const std::string lab = trim(line.substr(comma + 1));
    PaperRecord r = load_record(base / rel);
    if (lab == "1")
      r.label = true;
    else if (lab == "0")
      r.label = false;
    else if (lab == "unknown")
      r.label = std::nullopt;
    else
      throw SchemaError(manifest.string(), "line " + std::to_string(lineno),
                        "label must be 0, 1 or unknown");
    out.push_back(std::move(r));
  }
  return out;
}

void save_corpus(const std::vector<PaperRecord> &records, const fs::path &dir) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto &r = records[i];
    const std::string stem = r.id.empty() ? "paper" + std::to_string(i) : r.id;
    std::ofstream f(dir / (stem + ".json"), std::ios::binary);
    f << serialize_record(r);
    manifest << stem << ".json,"
             << (r.label ? (*r.label ? "1" : "0") : "unknown") << "\n";
  }
}

} // namespace reprofeat
