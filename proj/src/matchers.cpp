#include "reprofeat/matchers.hpp"

#include <algorithm>
#include <array>
#include <fstream>

namespace reprofeat {

namespace {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if (b0 >= 0x80) {
      cp = 0xFFFD; // stray continuation byte
    }
    for (int k = 1; k < len; ++k) {
      if (i + k >= s.size()) {
        cp = 0xFFFD;
        len = k;
        break;
      }
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

// ASCII folding for U+00C0..U+017F.
const char *fold_latin(char32_t cp) {
  static const std::array<const char *, 64> latin1 = {
      "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i",
      "i", "i", "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u",
      "u", "y", "th", "ss", "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e",
      "e", "e", "i", "i", "i", "i", "d", "n", "o", "o", "o", "o", "o", "",
      "o", "u", "u", "u", "u", "y", "th", "y"};
  struct Run {
    const char *ascii;
    int count;
  };
  static const Run extended_a[] = {
      {"a", 6},  {"c", 8}, {"d", 4}, {"e", 10}, {"g", 8},  {"h", 4},
      {"i", 10}, {"ij", 2}, {"j", 2}, {"k", 3},  {"l", 10}, {"n", 9},
      {"o", 6},  {"oe", 2}, {"r", 6}, {"s", 8},  {"t", 6},  {"u", 12},
      {"w", 2},  {"y", 3}, {"z", 6}, {"s", 1}};
  if (cp >= 0xC0 && cp < 0x100)
    return latin1[cp - 0xC0];
  if (cp >= 0x100 && cp < 0x180) {
    int offset = static_cast<int>(cp - 0x100);
    for (const auto &run : extended_a) {
      if (offset < run.count)
        return run.ascii;
      offset -= run.count;
    }
  }
  return nullptr;
}

std::string trim(std::string s) {
  const char *ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

} // namespace

std::string normalize_text(std::string_view s) {
  std::string raw;
  raw.reserve(s.size());
  for (char32_t cp : decode_utf8(s)) {
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z')
        raw += static_cast<char>(c - 'A' + 'a');
      else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))
        raw += c;
      else if (c == '\'' || c == '`')
        continue;
      else
        raw += ' ';
    } else if (const char *folded = fold_latin(cp)) {
      raw += folded;
    } else if ((cp >= 0x2010 && cp <= 0x2015) || cp == 0xA0 ||
               (cp >= 0x2000 && cp <= 0x200A)) {
      raw += ' '; // dashes and typographic spaces separate words
    }
    // every other non-ASCII code point is dropped
  }
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == ' ' && (out.empty() || out.back() == ' '))
      continue;
    out += c;
  }
  if (!out.empty() && out.back() == ' ')
    out.pop_back();
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::u32string x = decode_utf8(a), y = decode_utf8(b);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j)
    prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

double similarity(std::string_view a, std::string_view b) {
  const std::size_t la = decode_utf8(a).size(), lb = decode_utf8(b).size();
  const std::size_t longest = std::max(la, lb);
  if (longest == 0)
    return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) /
                   static_cast<double>(longest);
}

char first_initial(std::string_view first_name) {
  for (char c : normalize_text(first_name))
    if (c >= 'a' && c <= 'z')
      return c;
  return 0;
}

bool author_match(const AuthorName &a, const AuthorName &b, double threshold) {
  const char ia = first_initial(a.first), ib = first_initial(b.first);
  if (ia == 0 || ia != ib)
    return false;
  const std::string la = normalize_text(a.last), lb = normalize_text(b.last);
  if (la.empty() || lb.empty())
    return false;
  return similarity(la, lb) > threshold;
}

SelfCitation self_citation_ratio(const std::vector<AuthorName> &authors,
                                 const std::vector<ReferenceEntry> &refs,
                                 double threshold) {
  SelfCitation out;
  if (refs.empty())
    return out;
  for (const auto &ref : refs) {
    const bool self = std::any_of(
        ref.authors.begin(), ref.authors.end(), [&](const AuthorName &ra) {
          return std::any_of(authors.begin(), authors.end(),
                             [&](const AuthorName &pa) {
                               return author_match(pa, ra, threshold);
                             });
        });
    out.count += self ? 1 : 0;
  }
  out.ratio = static_cast<double>(out.count) / static_cast<double>(refs.size());
  out.is_default = false;
  return out;
}

bool title_match(std::string_view query, std::string_view candidate,
                 double threshold) {
  return similarity(normalize_text(query), normalize_text(candidate)) >
         threshold;
}

void RankTable::add(int rank, std::string_view name) {
  if (rank < 1)
    throw Error("rank must be >= 1 for '" + std::string(name) + "'");
  entries_.emplace_back(normalize_text(name), rank);
}

void RankTable::add_acronym(std::string_view acronym,
                            std::string_view full_name) {
  acronyms_[normalize_text(acronym)] = normalize_text(full_name);
}

std::string RankTable::expand(std::string_view normalized_acronym) const {
  auto it = acronyms_.find(normalized_acronym);
  return it == acronyms_.end() ? std::string{} : it->second;
}

RankTable RankTable::load(const std::filesystem::path &ranks,
                          const std::filesystem::path &acronyms) {
  RankTable t;
  auto read_tsv = [](const std::filesystem::path &p, auto &&row) {
    std::ifstream in(p);
    if (!in)
      throw Error("cannot open table: " + p.string());
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#')
        continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw Error(p.string() + ": expected two tab-separated columns: " +
                    line);
      row(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
    }
  };
  read_tsv(ranks, [&](const std::string &rank, const std::string &name) {
    t.add(std::stoi(rank), name);
  });
  if (!acronyms.empty())
    read_tsv(acronyms, [&](const std::string &acr, const std::string &name) {
      t.add_acronym(acr, name);
    });
  return t;
}

URank u_rank(const std::vector<std::string> &affiliations,
             const RankTable &table, double threshold) {
  URank out;
  std::string affiliation;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, affiliations.size());
       ++i) {
    if (!trim(affiliations[i]).empty()) {
      affiliation = affiliations[i];
      break;
    }
  }
  if (affiliation.empty())
    return out;

  std::vector<std::string> segments;
  {
    std::string cur;
    for (char c : affiliation) {
      if (c == ',' || c == ';' || c == '\n') {
        segments.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    segments.push_back(cur);
  }

  std::vector<std::string> candidates;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::string joined;
    for (std::size_t j = i; j < segments.size(); ++j) {
      joined += (j == i ? "" : ",") + segments[j];
      std::string norm = normalize_text(joined);
      if (norm.empty())
        continue;
      if (std::string full = table.expand(norm); !full.empty())
        candidates.push_back(std::move(full));
      candidates.push_back(std::move(norm));
    }
  }

  double best_sim = -1.0;
  for (const auto &cand : candidates) {
    for (const auto &[name, rank] : table.entries()) {
      const double sim = similarity(cand, name);
      if (sim > best_sim || (sim == best_sim && rank < out.rank)) {
        best_sim = sim;
        out.matched_name = name;
        out.rank = rank;
      }
    }
  }
  if (best_sim <= threshold) {
    out.matched_name.clear();
    out.rank = 0;
    return out;
  }
  out.is_default = false;
  out.value = out.rank <= 100 ? 1.0 - out.rank / 100.0 : kUnrankedSentinel;
  return out;
}

} // namespace reprofeat
