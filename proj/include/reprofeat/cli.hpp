#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "reprofeat/analysis.hpp"
#include "reprofeat/features.hpp"
#include "reprofeat/ingest.hpp"
#include "reprofeat/metaclients.hpp"
#include "reprofeat/statparse.hpp"

namespace reprofeat {

struct RunConfig {
  std::string command;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> fixtures; // default <corpus>/providers
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  std::uint64_t seed = 42;
  std::filesystem::path out = "out";
  std::optional<std::string> classifier;
  std::optional<int> top_k;
  std::optional<int> repeats;
  std::optional<int> now_year;
  std::optional<std::filesystem::path> matrix; // default <out>/features.csv
  std::optional<std::filesystem::path> mask;   // default <out>/mask.csv
  std::optional<std::filesystem::path> rank_table, acronyms, subjects;
  int min_real = 15;
  double tau_threshold = kTauThreshold;
  double title_threshold = kTitleMatchThreshold;
  double author_threshold = kAuthorMatchThreshold;
  double university_threshold = kUniversityMatchThreshold;
  int threads = 4;
  int folds = 5;
  int mi_k = 3;
  std::vector<std::string> mi_extras = {"citations_methodology"};
  std::string sample_size_aggregation = "max";
  std::string crossref_url = "https://api.crossref.org";
  std::string s2_url = "https://api.semanticscholar.org/v1";
  std::string scopus_url = "https://api.elsevier.com";
  double requests_per_second = 1.0;

  /// Problems that make the configuration unusable; empty when valid.
  std::vector<std::string> validate() const;
  /// Deterministic key=value snapshot (the output directory is left out).
  std::vector<std::string> provenance() const;
};

struct ExtractionResult {
  FeatureMatrix matrix;
  std::vector<std::string> diagnostics; // one JSON line per paper
  std::vector<std::string> warnings;    // sorted
};

struct ExtractionInputs {
  RankTable rank;
  SubjectTable subjects;
  int now_year = 0;
  int threads = 4;
  MatchThresholds thresholds;
  SampleSizeAggregation aggregation = SampleSizeAggregation::max;
};

/// Per-paper feature derivation on a bounded worker pool. Rows keep the
/// corpus order.
ExtractionResult extract_features(const std::vector<PaperRecord> &corpus,
                                  MetadataClient &client,
                                  const ExtractionInputs &in);

/// Parses `args` (without the program name) and runs one pipeline stage.
/// Returns 0 on success, 2 on invalid usage or configuration, 1 when a
/// stage fails.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace reprofeat
