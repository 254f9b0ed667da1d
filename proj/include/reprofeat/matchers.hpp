#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reprofeat/ingest.hpp"

namespace reprofeat {

inline constexpr double kAuthorMatchThreshold = 0.85;
inline constexpr double kTitleMatchThreshold = 0.90;
inline constexpr double kUniversityMatchThreshold = 0.95;

/// Folds accented Latin letters to ASCII, drops the remaining non-ASCII
/// code points, lowercases, turns punctuation into spaces (apostrophes are
/// removed) and collapses whitespace.
std::string normalize_text(std::string_view s);

/// Levenshtein distance over Unicode code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - edit_distance / max(length); 1.0 for two empty strings.
double similarity(std::string_view a, std::string_view b);

/// Lowercase first alphabetic character of the normalized first name, or 0.
char first_initial(std::string_view first_name);

/// Same first initial and normalized last-name similarity above threshold.
bool author_match(const AuthorName &a, const AuthorName &b,
                  double threshold = kAuthorMatchThreshold);

struct SelfCitation {
  int count = 0;
  double ratio = 0.0;
  bool is_default = true; // no references to divide by
};

SelfCitation self_citation_ratio(const std::vector<AuthorName> &authors,
                                 const std::vector<ReferenceEntry> &refs,
                                 double threshold = kAuthorMatchThreshold);

bool title_match(std::string_view query, std::string_view candidate,
                 double threshold = kTitleMatchThreshold);

/// University ranking lookup. Names and acronyms are stored normalized.
class RankTable {
public:
  RankTable() = default;

  /// `ranks` lines: "rank<TAB>name"; `acronyms` lines: "acronym<TAB>name".
  /// Blank lines and '#' comments are skipped.
  static RankTable load(const std::filesystem::path &ranks,
                        const std::filesystem::path &acronyms = {});

  void add(int rank, std::string_view name);
  void add_acronym(std::string_view acronym, std::string_view full_name);

  const std::vector<std::pair<std::string, int>> &entries() const {
    return entries_;
  }
  /// Full normalized name for a normalized acronym, or empty.
  std::string expand(std::string_view normalized_acronym) const;
  bool empty() const { return entries_.empty(); }

private:
  std::vector<std::pair<std::string, int>> entries_;
  std::map<std::string, std::string, std::less<>> acronyms_;
};

inline constexpr double kUnrankedSentinel = 2.0;

struct URank {
  double value = kUnrankedSentinel;
  bool is_default = true; // no affiliation or no table match
  std::string matched_name;
  int rank = 0;
};

/// Normalized rank of the first author's institution (second author as a
/// fallback): 1 - R/100 for R <= 100, 2 for ranked beyond 100 and, as a
/// default, 2 when nothing matches. Comma-separated affiliation segments and
/// runs of adjacent segments are tried, with acronym expansion.
URank u_rank(const std::vector<std::string> &affiliations,
             const RankTable &table,
             double threshold = kUniversityMatchThreshold);

} // namespace reprofeat
