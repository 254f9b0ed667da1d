#include "reprofeat/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#ifndef REPROFEAT_DATA_DIR
#define REPROFEAT_DATA_DIR "data"
#endif

namespace reprofeat {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path &file, const std::string &content) {
  if (!file.parent_path().empty())
    fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot write " + file.string());
  out << content;
}

std::string comment_block(const std::vector<std::string> &lines) {
  std::string s;
  for (const auto &l : lines)
    s += "# " + l + "\n";
  return s;
}

std::string read_file(const fs::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw Error("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_list(const fs::path &file) {
  std::vector<std::string> out;
  std::istringstream in(read_file(file));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty() && line[0] != '#')
      out.push_back(line);
  }
  return out;
}

std::string list_text(const std::vector<std::string> &prov,
                      const std::vector<std::string> &items) {
  std::string s = comment_block(prov);
  for (const auto &i : items)
    s += i + "\n";
  return s;
}

fs::path data_dir() {
  if (const char *env = std::getenv("REPROFEAT_DATA_DIR"))
    return env;
  return REPROFEAT_DATA_DIR;
}

SampleSizeAggregation parse_aggregation(const std::string &s) {
  if (s == "max")
    return SampleSizeAggregation::max;
  if (s == "min")
    return SampleSizeAggregation::min;
  return SampleSizeAggregation::sum;
}

struct Pipeline {
  const RunConfig &cfg;
  std::ostream &out;
  std::ostream &err;
  std::vector<std::string> prov;

  Pipeline(const RunConfig &c, std::ostream &o, std::ostream &e)
      : cfg(c), out(o), err(e), prov(c.provenance()) {}

  fs::path matrix_path() const {
    return cfg.matrix ? *cfg.matrix : cfg.out / "features.csv";
  }
  fs::path mask_path() const {
    if (cfg.mask)
      return *cfg.mask;
    return cfg.matrix ? fs::path() : cfg.out / "mask.csv";
  }

  FeatureMatrix load_matrix() const {
    return read_matrix(matrix_path(), mask_path());
  }

  AnalysisOptions analysis_options() const {
    AnalysisOptions o;
    o.tau_threshold = cfg.tau_threshold;
    o.mi_k = cfg.mi_k;
    o.seed = cfg.seed;
    o.n_anova = cfg.top_k.value_or(8);
    o.mi_extras = cfg.mi_extras;
    return o;
  }

  AnalysisReport load_or_run_analysis(const FeatureMatrix &m) const {
    const fs::path file = cfg.out / "analysis.json";
    if (fs::exists(file))
      return AnalysisReport::from_json(nlohmann::json::parse(read_file(file)));
    err << "warning: " << file.string()
        << " not found; running the analysis stage in memory\n";
    return analyze(filter_core_features(m, cfg.min_real), analysis_options());
  }

  int extract() {
    const auto corpus = load_corpus(cfg.corpus);
    const fs::path corpus_dir =
        fs::is_directory(cfg.corpus) ? cfg.corpus : cfg.corpus.parent_path();

    ClientOptions co;
    co.offline = cfg.offline;
    co.fixture_dir = cfg.fixtures ? *cfg.fixtures : corpus_dir / "providers";
    co.cache_dir = cfg.cache_dir;
    co.crossref_url = cfg.crossref_url;
    co.s2_url = cfg.s2_url;
    co.scopus_url = cfg.scopus_url;
    co.http.requests_per_second = cfg.requests_per_second;
    co.title_threshold = cfg.title_threshold;
    co.from_environment();
    MetadataClient client(co);

    ExtractionInputs in;
    const fs::path ranks = cfg.rank_table ? *cfg.rank_table : data_dir() / "rank_table.tsv";
    const fs::path acr = cfg.acronyms ? *cfg.acronyms : data_dir() / "acronyms.tsv";
    const fs::path subj = cfg.subjects ? *cfg.subjects : data_dir() / "asjc.tsv";
    if (fs::exists(ranks))
      in.rank = RankTable::load(ranks, fs::exists(acr) ? acr : fs::path());
    else
      err << "warning: rank table " << ranks.string()
          << " not found; u_rank falls back to its default\n";
    if (fs::exists(subj))
      in.subjects = SubjectTable::load(subj);
    in.now_year = cfg.now_year.value_or(current_calendar_year());
    in.threads = cfg.threads;
    in.thresholds = {cfg.author_threshold, cfg.university_threshold};
    in.aggregation = parse_aggregation(cfg.sample_size_aggregation);

    const ExtractionResult res = extract_features(corpus, client, in);
    write_matrix(res.matrix, cfg.out / "features.csv", cfg.out / "mask.csv", prov);
    std::string diag;
    for (const auto &d : res.diagnostics)
      diag += d + "\n";
    write_file(cfg.out / "diagnostics.jsonl", diag);
    write_file(cfg.out / "warnings.txt", list_text(prov, res.warnings));
    for (const auto &w : res.warnings)
      err << "warning: " << w << "\n";

    std::size_t labeled_true = 0;
    for (const auto &l : res.matrix.labels)
      labeled_true += l && *l;
    out << "extracted " << res.matrix.rows() << " papers x "
        << res.matrix.cols() << " features (" << labeled_true
        << " labeled reproducible) into " << cfg.out.string() << "\n";
    return 0;
  }

  int analyze_stage() {
    const FeatureMatrix m = load_matrix();
    const FeatureMatrix core = filter_core_features(m, cfg.min_real);
    const AnalysisReport rep = analyze(core, analysis_options());

    nlohmann::json j = rep.to_json();
    j["provenance"] = prov;
    write_file(cfg.out / "analysis.json", j.dump(2) + "\n");
    write_file(cfg.out / "core_features.txt", list_text(prov, rep.core_features));
    write_file(cfg.out / "reduced_features.txt",
               list_text(prov, rep.reduced_features));

    std::string drops = comment_block(prov) + "feature,partner,tau\n";
    for (const auto &d : rep.dropped)
      drops += d.dropped + "," + d.partner + "," + format_number(d.tau) + "\n";
    write_file(cfg.out / "dropped_features.csv", drops);

    std::string scores = comment_block(prov) +
                         "feature,anova_f,anova_f_normalized,anova_f_degenerate,"
                         "mutual_info,mutual_info_normalized\n";
    for (std::size_t i = 0; i < rep.score_features.size(); ++i)
      scores += rep.score_features[i] + "," +
                (std::isinf(rep.anova_f[i]) ? std::string("inf")
                                            : format_number(rep.anova_f[i])) +
                "," + format_number(rep.anova_f_normalized[i]) + "," +
                (rep.anova_degenerate[i] ? "1" : "0") + "," +
                format_number(rep.mutual_info[i]) + "," +
                format_number(rep.mutual_info_normalized[i]) + "\n";
    write_file(cfg.out / "scores.csv", scores);

    std::string tau = comment_block(prov) + "feature";
    for (const auto &f : rep.tau_features)
      tau += "," + f;
    tau += "\n";
    for (std::size_t a = 0; a < rep.tau_features.size(); ++a) {
      tau += rep.tau_features[a];
      for (std::size_t b = 0; b < rep.tau_features.size(); ++b)
        tau += "," + format_number(rep.tau(static_cast<Eigen::Index>(a),
                                           static_cast<Eigen::Index>(b)));
      tau += "\n";
    }
    write_file(cfg.out / "tau.csv", tau);

    for (const auto &w : rep.warnings)
      err << "warning: " << w << "\n";
    out << "core " << rep.core_features.size() << " features, reduced "
        << rep.reduced_features.size() << " (" << rep.dropped.size()
        << " dropped), selected " << rep.selected_features.size() << "\n";
    return 0;
  }

  int select() {
    const FeatureMatrix m = load_matrix();
    const AnalysisReport rep = load_or_run_analysis(m);
    const FeatureMatrix labeled = m.select_columns(rep.reduced_features).labeled_rows();
    const auto selected = select_top_features(labeled, cfg.top_k.value_or(8),
                                              cfg.mi_extras, 0, cfg.mi_k, cfg.seed);
    write_file(cfg.out / "selected_features.txt", list_text(prov, selected));
    for (const auto &s : selected)
      out << s << "\n";
    return 0;
  }

  std::vector<ClassifierKind> classifiers() const {
    if (cfg.classifier)
      return {classifier_from_string(*cfg.classifier)};
    return all_classifiers();
  }

  int evaluate() {
    const FeatureMatrix m = load_matrix();
    const AnalysisReport rep = load_or_run_analysis(m);
    std::vector<std::string> top = rep.selected_features;
    if (fs::exists(cfg.out / "selected_features.txt"))
      top = read_list(cfg.out / "selected_features.txt");

    const FeatureMatrix labeled = m.labeled_rows();
    const FeatureMatrix normalized = min_max_normalize(labeled);
    const auto y = labeled.binary_labels();
    const std::vector<std::pair<std::string, std::vector<std::string>>> sets = {
        {"core", rep.core_features},
        {"reduced", rep.reduced_features},
        {"top", top}};

    nlohmann::json results = nlohmann::json::array();
    std::string table = comment_block(prov) +
                        "feature_set,normalized,classifier,n_features,"
                        "precision,recall,f1\n";
    for (const auto &[set_name, names] : sets) {
      for (bool norm : {false, true}) {
        const FeatureMatrix sub = (norm ? normalized : labeled).select_columns(names);
        for (auto kind : classifiers()) {
          const CVResult cv = cross_validate(kind, sub.values, y, cfg.folds,
                                             cfg.repeats.value_or(1), cfg.seed);
          results.push_back({{"feature_set", set_name},
                             {"normalized", norm},
                             {"features", names},
                             {"cv", cv.to_json()}});
          table += set_name + "," + (norm ? "1" : "0") + "," + to_string(kind) +
                   "," + std::to_string(names.size()) + "," +
                   format_number(cv.mean_precision) + "," +
                   format_number(cv.mean_recall) + "," +
                   format_number(cv.mean_f1) + "\n";
          out << set_name << (norm ? " (normalized) " : " ") << to_string(kind)
              << " F1=" << format_number(cv.mean_f1) << "\n";
        }
      }
    }
    nlohmann::json j;
    j["provenance"] = prov;
    j["results"] = results;
    write_file(cfg.out / "cv_results.json", j.dump(2) + "\n");
    write_file(cfg.out / "metrics.csv", table);
    return 0;
  }

  int sweep() {
    const FeatureMatrix m = load_matrix();
    const AnalysisReport rep = load_or_run_analysis(m);
    const FeatureMatrix labeled = m.select_columns(rep.reduced_features).labeled_rows();
    const ClassifierKind kind =
        classifier_from_string(cfg.classifier.value_or("svm_rbf"));
    const int max_k = cfg.top_k.value_or(static_cast<int>(labeled.cols()));
    const auto points =
        sweep_top_features(labeled, kind, max_k, cfg.repeats.value_or(5), cfg.seed);
    std::string table = comment_block(prov) +
                        "k,feature_added,mean_f1,median_f1,q1_f1,q3_f1,f1_values\n";
    for (const auto &p : points) {
      std::string values;
      for (std::size_t i = 0; i < p.f1.size(); ++i)
        values += (i ? ";" : "") + format_number(p.f1[i]);
      table += std::to_string(p.k) + "," + p.features.back() + "," +
               format_number(p.mean) + "," + format_number(p.median) + "," +
               format_number(p.q1) + "," + format_number(p.q3) + "," + values + "\n";
      out << "k=" << p.k << " mean F1=" << format_number(p.mean) << "\n";
    }
    write_file(cfg.out / "sweep.csv", table);
    return 0;
  }
};

} // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errs;
  static const std::vector<std::string> commands = {"extract", "analyze", "select",
                                                    "evaluate", "sweep"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    errs.push_back("unknown command '" + command + "'");
  if (command == "extract" && corpus.empty())
    errs.push_back("extract requires --corpus");
  auto unit = [&](const char *name, double v) {
    if (!(v > 0.0 && v <= 1.0))
      errs.push_back(std::string(name) + " must lie in (0, 1]");
  };
  unit("--tau", tau_threshold);
  unit("--title-threshold", title_threshold);
  unit("--author-threshold", author_threshold);
  unit("--university-threshold", university_threshold);
  if (min_real < 0)
    errs.push_back("--min-real must be >= 0");
  if (threads < 1)
    errs.push_back("--threads must be >= 1");
  if (folds < 2)
    errs.push_back("--folds must be >= 2");
  if (mi_k < 1)
    errs.push_back("--mi-k must be >= 1");
  if (top_k && *top_k < (command == "sweep" ? 1 : 0))
    errs.push_back("--top-k is out of range");
  if (repeats && *repeats < 1)
    errs.push_back("--repeats must be >= 1");
  if (requests_per_second <= 0)
    errs.push_back("--rps must be positive");
  if (sample_size_aggregation != "max" && sample_size_aggregation != "min" &&
      sample_size_aggregation != "sum")
    errs.push_back("--sample-size must be one of max, min, sum");
  if (classifier) {
    try {
      classifier_from_string(*classifier);
    } catch (const Error &e) {
      errs.push_back(e.what());
    }
  }
  for (const auto &[flag, path] :
       {std::pair{"--rank-table", rank_table}, std::pair{"--acronyms", acronyms},
        std::pair{"--subjects", subjects}, std::pair{"--matrix", matrix},
        std::pair{"--mask", mask}, std::pair{"--fixtures", fixtures}})
    if (path && !fs::exists(*path))
      errs.push_back(std::string(flag) + " path does not exist: " + path->string());
  if (!corpus.empty() && !fs::exists(corpus))
    errs.push_back("--corpus path does not exist: " + corpus.string());
  return errs;
}

std::vector<std::string> RunConfig::provenance() const {
  std::vector<std::string> p;
  p.push_back("reprofeat " + command);
  auto opt_path = [](const std::optional<fs::path> &v) {
    return v ? v->generic_string() : std::string("default");
  };
  auto opt_int = [](const std::optional<int> &v) {
    return v ? std::to_string(*v) : std::string("default");
  };
  std::string extras;
  for (const auto &e : mi_extras)
    extras += (extras.empty() ? "" : ";") + e;
  p.push_back("seed=" + std::to_string(seed) + " offline=" + (offline ? "1" : "0") +
              " corpus=" + corpus.generic_string() + " fixtures=" + opt_path(fixtures) +
              " matrix=" + opt_path(matrix));
  p.push_back("classifier=" + classifier.value_or("default") +
              " top_k=" + opt_int(top_k) + " repeats=" + opt_int(repeats) +
              " folds=" + std::to_string(folds) + " now_year=" +
              std::to_string(now_year.value_or(current_calendar_year())));
  p.push_back("min_real=" + std::to_string(min_real) + " tau=" +
              format_number(tau_threshold) + " title=" +
              format_number(title_threshold) + " author=" +
              format_number(author_threshold) + " university=" +
              format_number(university_threshold) + " mi_k=" +
              std::to_string(mi_k) + " mi_extras=" + extras +
              " sample_size=" + sample_size_aggregation);
  return p;
}

ExtractionResult extract_features(const std::vector<PaperRecord> &corpus,
                                  MetadataClient &client,
                                  const ExtractionInputs &in) {
  std::vector<FeatureVector> vectors(corpus.size());
  std::vector<std::string> diagnostics(corpus.size());
  CitationGraph *graph = client.graph();

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= corpus.size())
        return;
      try {
        const PaperRecord &rec = corpus[i];
        const StatExtraction ext = extract_stat_mentions_with_diagnostics(rec.body_text);
        const auto sizes = derive_sample_sizes(rec.body_text, ext.mentions);
        const StatFeatures stats =
            derive_statistical_features(ext.mentions, sizes, in.aggregation);
        diagnostics[i] = diagnostics_to_json(rec.id, ext.diagnostics);

        const ProviderRecord meta = client.fetch({rec.doi, rec.title});
        const VenueMetrics venue =
            rec.venue_issn ? client.fetch_venue_metrics(*rec.venue_issn) : VenueMetrics{};
        const auto authors = client.fetch_author_metrics(rec.authors);
        std::optional<CoCitation> cocite;
        if (graph && meta.graph_id)
          cocite = co_citation_features(*meta.graph_id, rec.pub_year, graph);
        vectors[i] = derive_features(rec, meta, venue, authors, stats, in.rank,
                                     in.now_year, cocite, in.subjects, in.thresholds);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(
      1, std::min<int>(in.threads, static_cast<int>(std::max<std::size_t>(1, corpus.size()))));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);

  std::vector<std::optional<bool>> labels;
  for (const auto &r : corpus)
    labels.push_back(r.label);
  ExtractionResult res;
  res.matrix = assemble_matrix(vectors, labels);
  res.diagnostics = std::move(diagnostics);
  res.warnings = client.warnings();
  std::sort(res.warnings.begin(), res.warnings.end());
  return res;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  RunConfig cfg;
  CLI::App app{"Reproducibility feature extraction, analysis and evaluation",
               "reprofeat"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  std::string corpus, out_dir = "out";
  std::optional<std::string> fixtures, cache_dir, matrix, mask, rank_table,
      acronyms, subjects;
  app.add_option("--corpus", corpus, "Corpus directory or manifest file");
  app.add_option("--fixtures", fixtures,
                 "Offline provider fixtures (default <corpus>/providers)");
  app.add_flag("--offline", cfg.offline, "Use provider fixtures, no network");
  app.add_option("--cache-dir", cache_dir, "Provider response cache directory");
  app.add_option("--seed", cfg.seed, "Seed for folds, forests and MI jitter");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--classifier", cfg.classifier,
                 "logreg, knn, dtree, rforest, adaboost, gauss_nb, qda, svm_rbf");
  app.add_option("--top-k", cfg.top_k,
                 "select: ANOVA-F features to keep (8); sweep: largest k");
  app.add_option("--repeats", cfg.repeats,
                 "CV repeats (evaluate 1, sweep 5)");
  app.add_option("--now-year", cfg.now_year, "Reference year for ages");
  app.add_option("--matrix", matrix, "Feature table (default <out>/features.csv)");
  app.add_option("--mask", mask, "Default-mask table (default <out>/mask.csv)");
  app.add_option("--rank-table", rank_table, "University rank table");
  app.add_option("--acronyms", acronyms, "University acronym table");
  app.add_option("--subjects", subjects, "ASJC subject-field table");
  app.add_option("--min-real", cfg.min_real, "Core filter: minimum real values");
  app.add_option("--tau", cfg.tau_threshold, "Correlation pruning threshold");
  app.add_option("--title-threshold", cfg.title_threshold);
  app.add_option("--author-threshold", cfg.author_threshold);
  app.add_option("--university-threshold", cfg.university_threshold);
  app.add_option("--threads", cfg.threads, "Extraction workers");
  app.add_option("--folds", cfg.folds, "CV folds");
  app.add_option("--mi-k", cfg.mi_k, "Neighbours for the MI estimator");
  app.add_option("--mi-extra", cfg.mi_extras,
                 "Features appended to the ANOVA-F top list");
  app.add_option("--sample-size", cfg.sample_size_aggregation,
                 "Sample-size aggregation: max, min or sum");
  app.add_option("--crossref-url", cfg.crossref_url);
  app.add_option("--s2-url", cfg.s2_url);
  app.add_option("--scopus-url", cfg.scopus_url);
  app.add_option("--rps", cfg.requests_per_second, "Requests per second per provider");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"extract", "Derive the 41-feature matrix and default mask from a corpus"},
      {"analyze", "Core filter, correlation pruning and feature scoring"},
      {"select", "Top ANOVA-F features plus MI extras"},
      {"evaluate", "Cross-validated metrics for every classifier and feature set"},
      {"sweep", "F1 over the top-k ANOVA-F features for k = 1..max"}};
  for (const auto &[name, help] : commands)
    app.add_subcommand(name, help)->fallthrough();

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      std::none_of(commands.begin(), commands.end(),
                   [&](const auto &c) { return c.first == args[0]; })) {
    err << "error: unknown command '" << args[0] << "'\n" << app.help();
    return 2;
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.corpus = corpus;
  cfg.out = out_dir;
  auto to_path = [](const std::optional<std::string> &s) -> std::optional<fs::path> {
    return s ? std::optional<fs::path>(*s) : std::nullopt;
  };
  cfg.fixtures = to_path(fixtures);
  cfg.cache_dir = to_path(cache_dir);
  cfg.matrix = to_path(matrix);
  cfg.mask = to_path(mask);
  cfg.rank_table = to_path(rank_table);
  cfg.acronyms = to_path(acronyms);
  cfg.subjects = to_path(subjects);

  if (const auto problems = cfg.validate(); !problems.empty()) {
    for (const auto &p : problems)
      err << "error: " << p << "\n";
    err << app.help();
    return 2;
  }

  try {
    Pipeline p(cfg, out, err);
    if (cfg.command == "extract")
      return p.extract();
    if (cfg.command == "analyze")
      return p.analyze_stage();
    if (cfg.command == "select")
      return p.select();
    if (cfg.command == "evaluate")
      return p.evaluate();
    return p.sweep();
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace reprofeat
