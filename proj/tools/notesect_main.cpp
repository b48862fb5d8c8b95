#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "notesect/augment.hpp"
#include "notesect/corpus.hpp"
#include "notesect/jsonl.hpp"
#include "notesect/labeltree.hpp"
#include "notesect/metrics.hpp"
#include "notesect/pairs.hpp"
#include "notesect/segmenter.hpp"
#include "notesect/synthetic.hpp"
#include "notesect/titler.hpp"
#include "notesect/version.hpp"

namespace {

using namespace notesect;

// Distinguishes bad invocations (exit 2) from failures while running (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
  static const std::set<std::string> known = {"corpus", "titles",     "hierarchy",
                                              "max_ngram", "top_k",   "gamma",
                                              "seed",   "similarity", "out_dir"};
  std::map<std::string, std::string> kv;
  LineReader reader(path);
  while (auto line = reader.next()) {
    std::size_t eq = line->find('=');
    if (eq == std::string::npos)
      throw UsageError("config " + path.string() + ":" + std::to_string(reader.line_number()) +
                       ": expected key=value");
    std::string key = line->substr(0, eq);
    if (!known.count(key))
      throw UsageError("config " + path.string() + ": unknown key \"" + key + '"');
    kv[key] = line->substr(eq + 1);
  }
  return kv;
}

uint64_t to_u64(const std::string& v, const char* what) {
  try {
    std::size_t pos = 0;
    uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " is not a valid integer: " + v);
  }
}

double to_double(const std::string& v, const char* what) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " is not a valid number: " + v);
  }
}

// A value is taken from the command line first, the config file second, the
// built-in default last.
struct Merger {
  CLI::App* sub;
  const std::map<std::string, std::string>& cfg;

  void fill(const std::string& flag, const char* key, std::string& var) const {
    if (sub->count(flag)) return;
    auto it = cfg.find(key);
    if (it != cfg.end()) var = it->second;
  }
  void fill(const std::string& flag, const char* key, int& var) const {
    if (sub->count(flag)) return;
    auto it = cfg.find(key);
    if (it != cfg.end()) var = int(to_u64(it->second, key));
  }
  void fill(const std::string& flag, const char* key, std::size_t& var) const {
    if (sub->count(flag)) return;
    auto it = cfg.find(key);
    if (it != cfg.end()) var = std::size_t(to_u64(it->second, key));
  }
  void fill(const std::string& flag, const char* key, double& var) const {
    if (sub->count(flag)) return;
    auto it = cfg.find(key);
    if (it != cfg.end()) var = to_double(it->second, key);
  }
  std::optional<uint64_t> seed(const std::string& flag, uint64_t flag_value) const {
    if (sub->count(flag)) return flag_value;
    auto it = cfg.find("seed");
    if (it != cfg.end()) return to_u64(it->second, "seed");
    return std::nullopt;
  }
  // An empty path falls back to <out_dir>/<name> from the config.
  void fill_out(std::string& out, const char* name) const {
    if (!out.empty()) return;
    auto it = cfg.find("out_dir");
    if (it != cfg.end()) out = (std::filesystem::path(it->second) / name).string();
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError("missing required value: " + what);
}

std::set<CodeId> parse_label_list(const std::string& csv) {
  std::set<CodeId> out;
  std::size_t i = 0;
  while (i <= csv.size()) {
    std::size_t j = csv.find(',', i);
    if (j == std::string::npos) j = csv.size();
    if (j > i) out.insert(csv.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

std::vector<std::size_t> parse_k_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i <= csv.size()) {
    std::size_t j = csv.find(',', i);
    if (j == std::string::npos) j = csv.size();
    if (j > i) out.push_back(std::size_t(to_u64(csv.substr(i, j - i), "k")));
    i = j + 1;
  }
  if (out.empty()) throw UsageError("--k needs at least one value");
  return out;
}

SimilarityMode parse_mode(const std::string& name) {
  if (name == "tree") return SimilarityMode::kTree;
  if (name == "jaccard") return SimilarityMode::kJaccard;
  throw UsageError("similarity mode must be tree or jaccard, got " + name);
}

std::string tokens_json(const std::vector<Token>& tokens) { return json_string_array(tokens); }

int run_extract_titles(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                       std::string corpus_path, int max_ngram, std::size_t top_k, int threads,
                       std::string out_path) {
  Merger m{sub, cfg};
  m.fill("--corpus", "corpus", corpus_path);
  m.fill("--max-ngram", "max_ngram", max_ngram);
  m.fill("--top-k", "top_k", top_k);
  m.fill_out(out_path, "titles.tsv");
  require(!corpus_path.empty(), "--corpus");
  require(!out_path.empty(), "--out");

  Corpus corpus = load_corpus(corpus_path);
  auto titles = extract_titles(corpus, max_ngram, top_k, threads);
  auto out = open_out(out_path);
  out << header_line("extract-titles",
                     {{"corpus", corpus_path},
                      {"max_ngram", std::to_string(max_ngram)},
                      {"top_k", std::to_string(top_k)},
                      {"threads", std::to_string(threads)}})
      << '\n';
  for (const auto& c : titles)
    out << phrase_text(c.phrase) << '\t' << fixed6(c.score) << '\t' << fixed6(c.df) << '\t'
        << fixed6(c.iapf) << '\n';
  return 0;
}

int run_segment(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                std::string corpus_path, std::string titles_path, std::string out_path) {
  Merger m{sub, cfg};
  m.fill("--corpus", "corpus", corpus_path);
  m.fill("--titles", "titles", titles_path);
  m.fill_out(out_path, "segmented.jsonl");
  require(!corpus_path.empty(), "--corpus");
  require(!out_path.empty(), "--out");

  Corpus corpus = load_corpus(corpus_path);
  TitleSet titles = titles_path.empty() ? TitleSet::default_clinical() : TitleSet::load(titles_path);
  auto out = open_out(out_path);
  out << header_line("segment", {{"corpus", corpus_path},
                                 {"titles", titles_path.empty() ? "<default>" : titles_path}})
      << '\n';
  for (const auto& doc : corpus.documents) {
    SectionedDocument sd = segment(doc, titles);
    reassemble(sd, doc);  // integrity check before anything is written
    std::string line = "{\"id\":" + json_string(sd.doc_id) +
                       ",\"preamble\":" + tokens_json(sd.preamble()) + ",\"sections\":[";
    for (std::size_t k = 0; k < sd.sections.size(); ++k) {
      const Section& s = sd.sections[k];
      if (k) line += ',';
      line += "{\"title\":" + json_string(phrase_text(s.title)) +
              ",\"body\":" + tokens_json(sd.body(s)) + '}';
    }
    line += "],\"labels\":" +
            json_string_array({sd.labels.begin(), sd.labels.end()}) + '}';
    out << line << '\n';
  }
  return 0;
}

int run_similarity(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                   std::string hierarchy_path, const std::string& labels_a,
                   const std::string& labels_b, std::string mode_name) {
  Merger m{sub, cfg};
  m.fill("--hierarchy", "hierarchy", hierarchy_path);
  m.fill("--similarity", "similarity", mode_name);
  require(!hierarchy_path.empty(), "--hierarchy");
  SimilarityMode mode = parse_mode(mode_name);

  std::set<CodeId> a = parse_label_list(labels_a);
  std::set<CodeId> b = parse_label_list(labels_b);
  double alpha;
  if (mode == SimilarityMode::kTree) {
    Hierarchy h = Hierarchy::load(hierarchy_path);
    alpha = soft_similarity(a, b, h);
  } else {
    alpha = jaccard_similarity(a, b);
  }
  std::cout << fixed6(alpha) << '\n';
  return 0;
}

int run_make_pairs(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                   std::string segmented_path, std::string hierarchy_path,
                   std::string titles_path, std::size_t count, uint64_t seed_flag,
                   std::string mode_name, int retry_budget, bool strict, std::string out_path) {
  Merger m{sub, cfg};
  m.fill("--hierarchy", "hierarchy", hierarchy_path);
  m.fill("--titles", "titles", titles_path);
  m.fill("--similarity", "similarity", mode_name);
  std::optional<uint64_t> seed = m.seed("--seed", seed_flag);
  m.fill_out(segmented_path, "segmented.jsonl");
  m.fill_out(out_path, "pairs.jsonl");
  require(!segmented_path.empty(), "--segmented");
  require(!hierarchy_path.empty(), "--hierarchy");
  require(!out_path.empty(), "--out");
  if (!seed) throw UsageError("make-pairs is randomized and requires --seed");

  std::vector<SectionedDocument> notes = load_segmented(segmented_path);
  TitleSet titles = titles_path.empty() ? TitleSet::default_clinical() : TitleSet::load(titles_path);
  Hierarchy h = Hierarchy::load(hierarchy_path);
  SamplerOptions opt;
  opt.count = count;
  opt.seed = *seed;
  opt.retry_budget = retry_budget;
  opt.strict = strict;
  opt.mode = parse_mode(mode_name);
  std::vector<Quadruple> quads = sample_quadruples(notes, titles, h, opt);

  auto out = open_out(out_path);
  out << header_line("make-pairs",
                     {{"segmented", segmented_path},
                      {"hierarchy", hierarchy_path},
                      {"titles", titles_path.empty() ? "<default>" : titles_path},
                      {"count", std::to_string(count)},
                      {"seed", std::to_string(*seed)},
                      {"similarity", mode_name},
                      {"retry_budget", std::to_string(retry_budget)},
                      {"strict", strict ? "true" : "false"}})
      << '\n';
  for (const auto& q : quads) {
    out << "{\"note_i\":" << json_string(q.doc_i) << ",\"note_j\":" << json_string(q.doc_j)
        << ",\"title_k\":" << json_string(phrase_text(q.title_a))
        << ",\"title_k2\":" << json_string(phrase_text(q.title_b)) << ",\"alpha\":"
        << fixed6(q.alpha) << ",\"s_ki\":" << tokens_json(q.sec_ai)
        << ",\"s_k2i\":" << tokens_json(q.sec_bi) << ",\"s_kj\":" << tokens_json(q.sec_aj)
        << ",\"s_k2j\":" << tokens_json(q.sec_bj) << "}\n";
  }
  return 0;
}

int run_augment(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                std::string segmented_path, double gamma, uint64_t seed_flag, std::size_t epochs,
                std::string out_path) {
  Merger m{sub, cfg};
  m.fill("--gamma", "gamma", gamma);
  std::optional<uint64_t> seed = m.seed("--seed", seed_flag);
  m.fill_out(segmented_path, "segmented.jsonl");
  m.fill_out(out_path, "augmented.jsonl");
  require(!segmented_path.empty(), "--segmented");
  require(!out_path.empty(), "--out");
  if (!seed) throw UsageError("augment is randomized and requires --seed");
  if (gamma < 0.0 || gamma >= 1.0) throw UsageError("--gamma must lie in [0, 1)");
  if (epochs == 0) throw UsageError("--epochs must be >= 1");

  std::vector<SectionedDocument> notes = load_segmented(segmented_path);
  auto out = open_out(out_path);
  out << header_line("augment", {{"segmented", segmented_path},
                                 {"gamma", fixed6(gamma)},
                                 {"seed", std::to_string(*seed)},
                                 {"epochs", std::to_string(epochs)}})
      << '\n';
  std::size_t fully_masked = 0;
  for (const auto& sd : notes) {
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
      AugmentedNote view = mask_and_permute(sd, gamma, derive_doc_seed(*seed, sd.doc_id, epoch));
      if (view.kept_titles.empty() && !sd.sections.empty()) ++fully_masked;
      std::vector<std::string> kept;
      kept.reserve(view.kept_titles.size());
      for (const auto& t : view.kept_titles) kept.push_back(phrase_text(t));
      out << "{\"id\":" << json_string(view.doc_id) << ",\"epoch\":" << epoch
          << ",\"tokens\":" << tokens_json(view.tokens)
          << ",\"kept_titles\":" << json_string_array(kept) << "}\n";
    }
  }
  if (fully_masked > 0)
    std::cerr << "warning: " << fully_masked << " views kept no sections\n";
  return 0;
}

int run_evaluate(const std::string& pred_path, const std::string& k_csv, double threshold) {
  std::vector<PredictionRecord> records = load_predictions(pred_path);
  std::vector<std::size_t> ks = parse_k_list(k_csv);
  std::vector<CodeId> universe = code_universe(records);
  F1Result r = micro_macro_f1(records, universe, threshold);
  std::cout << header_line("evaluate", {{"pred", pred_path},
                                        {"threshold", fixed6(threshold)},
                                        {"k", k_csv}})
            << '\n';
  std::cout << "micro_f1=" << fixed4(r.micro_f1) << '\n';
  std::cout << "macro_f1=" << fixed4(r.macro_f1) << '\n';
  for (std::size_t k : ks)
    std::cout << "p_at_" << k << '=' << fixed4(precision_at_k(records, k)) << '\n';
  return 0;
}

int run_gen_synthetic(CLI::App* sub, const std::map<std::string, std::string>& cfg,
                      std::size_t docs, std::string titles_path, uint64_t seed_flag,
                      std::string out_path) {
  Merger m{sub, cfg};
  m.fill("--titles", "titles", titles_path);
  std::optional<uint64_t> seed = m.seed("--seed", seed_flag);
  m.fill_out(out_path, "synthetic.jsonl");
  require(!out_path.empty(), "--out");
  if (!seed) throw UsageError("gen-synthetic is randomized and requires --seed");

  TitleSet titles = titles_path.empty() ? TitleSet::default_clinical() : TitleSet::load(titles_path);
  SyntheticOptions opt;
  opt.docs = docs;
  opt.seed = *seed;
  Corpus corpus = generate_synthetic_corpus(titles, opt);
  auto out = open_out(out_path);
  out << header_line("gen-synthetic",
                     {{"docs", std::to_string(docs)},
                      {"titles", titles_path.empty() ? "<default>" : titles_path},
                      {"seed", std::to_string(*seed)}})
      << '\n';
  for (const auto& doc : corpus.documents) {
    out << "{\"id\":" << json_string(doc.id) << ",\"text\":" << json_string(doc.raw_text)
        << ",\"labels\":" << json_string_array({doc.labels.begin(), doc.labels.end()}) << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"notesect: section discovery, segmentation, label similarity and "
               "augmentation for text corpora"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file; flags override")
      ->expected(1);

  // extract-titles
  auto* cmd_titles = app.add_subcommand("extract-titles", "score n-grams and emit title candidates");
  std::string et_corpus, et_out;
  int et_max_ngram = 5, et_threads = 1;
  std::size_t et_top_k = 50;
  cmd_titles->add_option("--corpus", et_corpus, "corpus jsonl");
  cmd_titles->add_option("--max-ngram", et_max_ngram, "longest n-gram (default 5)");
  cmd_titles->add_option("--top-k", et_top_k, "candidates kept before filtering (default 50)");
  cmd_titles->add_option("--threads", et_threads, "counting worker threads");
  cmd_titles->add_option("--out", et_out, "output tsv");

  // segment
  auto* cmd_segment = app.add_subcommand("segment", "split documents at title anchors");
  std::string sg_corpus, sg_titles, sg_out;
  cmd_segment->add_option("--corpus", sg_corpus, "corpus jsonl");
  cmd_segment->add_option("--titles", sg_titles, "titles file (default: built-in clinical set)");
  cmd_segment->add_option("--out", sg_out, "output jsonl");

  // similarity
  auto* cmd_sim = app.add_subcommand("similarity", "soft similarity between two label sets");
  std::string si_hierarchy, si_a, si_b, si_mode = "tree";
  cmd_sim->add_option("--hierarchy", si_hierarchy, "hierarchy edge file");
  cmd_sim->add_option("--labels-a", si_a, "comma-separated codes")->required();
  cmd_sim->add_option("--labels-b", si_b, "comma-separated codes")->required();
  cmd_sim->add_option("--similarity", si_mode, "tree | jaccard (default tree)");

  // make-pairs
  auto* cmd_pairs = app.add_subcommand("make-pairs", "sample contrastive section quadruples");
  std::string mp_segmented, mp_hierarchy, mp_titles, mp_mode = "tree", mp_out;
  std::size_t mp_count = 1000;
  uint64_t mp_seed = 0;
  int mp_retry = 100;
  bool mp_strict = false;
  cmd_pairs->add_option("--segmented", mp_segmented, "segmented jsonl");
  cmd_pairs->add_option("--hierarchy", mp_hierarchy, "hierarchy edge file");
  cmd_pairs->add_option("--titles", mp_titles, "titles file (default: built-in clinical set)");
  cmd_pairs->add_option("--count", mp_count, "quadruples to emit (default 1000)");
  cmd_pairs->add_option("--seed", mp_seed, "rng seed (required)");
  cmd_pairs->add_option("--similarity", mp_mode, "tree | jaccard (default tree)");
  cmd_pairs->add_option("--retry-budget", mp_retry, "redraws allowed per quadruple (default 100)");
  cmd_pairs->add_flag("--strict", mp_strict, "precompute feasible neighbors");
  cmd_pairs->add_option("--out", mp_out, "output jsonl");

  // augment
  auto* cmd_aug = app.add_subcommand("augment", "emit masked and shuffled training views");
  std::string au_segmented, au_out;
  double au_gamma = 0.2;
  uint64_t au_seed = 0;
  std::size_t au_epochs = 1;
  cmd_aug->add_option("--segmented", au_segmented, "segmented jsonl");
  cmd_aug->add_option("--gamma", au_gamma, "mask probability in [0,1) (default 0.2)");
  cmd_aug->add_option("--seed", au_seed, "rng seed (required)");
  cmd_aug->add_option("--epochs", au_epochs, "views per document (default 1)");
  cmd_aug->add_option("--out", au_out, "output jsonl");

  // evaluate
  auto* cmd_eval = app.add_subcommand("evaluate", "score multi-label predictions");
  std::string ev_pred, ev_k = "5,8,15";
  double ev_threshold = 0.5;
  cmd_eval->add_option("--pred", ev_pred, "predictions jsonl")->required();
  cmd_eval->add_option("--k", ev_k, "comma-separated cutoffs (default 5,8,15)");
  cmd_eval->add_option("--threshold", ev_threshold, "binarization threshold (default 0.5)");

  // gen-synthetic
  auto* cmd_gen = app.add_subcommand("gen-synthetic", "generate a synthetic labeled corpus");
  std::string gs_titles, gs_out;
  std::size_t gs_docs = 200;
  uint64_t gs_seed = 0;
  cmd_gen->add_option("--docs", gs_docs, "documents to generate (default 200)");
  cmd_gen->add_option("--titles", gs_titles, "titles to plant (default: built-in clinical set)");
  cmd_gen->add_option("--seed", gs_seed, "rng seed (required)");
  cmd_gen->add_option("--out", gs_out, "output jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::map<std::string, std::string> cfg;
    if (!config_path.empty()) cfg = read_config(config_path);

    if (cmd_titles->parsed())
      return run_extract_titles(cmd_titles, cfg, et_corpus, et_max_ngram, et_top_k, et_threads,
                                et_out);
    if (cmd_segment->parsed()) return run_segment(cmd_segment, cfg, sg_corpus, sg_titles, sg_out);
    if (cmd_sim->parsed()) return run_similarity(cmd_sim, cfg, si_hierarchy, si_a, si_b, si_mode);
    if (cmd_pairs->parsed())
      return run_make_pairs(cmd_pairs, cfg, mp_segmented, mp_hierarchy, mp_titles, mp_count,
                            mp_seed, mp_mode, mp_retry, mp_strict, mp_out);
    if (cmd_aug->parsed())
      return run_augment(cmd_aug, cfg, au_segmented, au_gamma, au_seed, au_epochs, au_out);
    if (cmd_eval->parsed()) return run_evaluate(ev_pred, ev_k, ev_threshold);
    if (cmd_gen->parsed())
      return run_gen_synthetic(cmd_gen, cfg, gs_docs, gs_titles, gs_seed, gs_out);
    std::cerr << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
