#include "noveldetect/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "noveldetect/corpus.hpp"
#include "noveldetect/detectors.hpp"
#include "noveldetect/eval.hpp"
#include "noveldetect/factmodel.hpp"
#include "noveldetect/io.hpp"
#include "noveldetect/manifest.hpp"
#include "noveldetect/metrics.hpp"
#include "noveldetect/textvec.hpp"

namespace noveldetect {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool quiet = false;
};

struct SynthOptions {
  std::size_t topics = 10;
  std::size_t sentences = 50;
  std::size_t fact_vocab = 200;
  std::string facts_per_sentence = "1:3";
  double redundancy_bias = 0.3;
  std::size_t terms_per_fact = 2;
  std::size_t noise_terms = 0;
  std::size_t noise_vocab = 100;
  std::string redundancy_source = "any_seen";
  bool fresh_novel_facts = false;
};

struct DetectorOptions {
  std::string method = "overlap";
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string pool_scope = "all_previous";
  std::string pool_aggregation = "max";
};

struct RunOptions {
  std::string corpus;
  bool lenient = false;
  DetectorOptions detector;
};

struct EvalOptions {
  std::string run;
  std::string corpus;
  std::string metrics = "snm,mistake,spsm";
  bool lenient = false;
};

struct TuneOptions {
  std::string corpus;
  bool lenient = false;
  DetectorOptions detector;
  std::string alphas;
  std::string betas;
  std::string objective = "mean_f";
  bool loo = false;
};

struct CompareOptions {
  std::string corpus;
  std::string metric = "f";
  bool lenient = false;
  std::string run_a;
  std::string run_b;
};

struct Context {
  GlobalOptions global;
  std::vector<std::string> arguments;
  std::ostream& out;
  std::ostream& err;

  void note(const std::string& msg) const {
    if (!global.quiet) err << msg << '\n';
  }
};

TokenizerConfig tokenizer_config(const Context& ctx, nlohmann::ordered_json& snapshot) {
  std::string path = ctx.global.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("NOVELDETECT_CONFIG")) path = env;
  }
  TokenizerConfig config;
  if (!path.empty()) config = load_tokenizer_config(path);
  snapshot = nlohmann::ordered_json::object();
  snapshot["config_file"] = path.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(path);
  snapshot["lowercase"] = config.lowercase;
  snapshot["min_token_len"] = config.min_token_len;
  if (config.stopwords) {
    std::string joined;
    for (const auto& w : *config.stopwords) joined += w + "\n";
    snapshot["stopwords"] = {{"count", config.stopwords->size()}, {"sha256", sha256_hex(joined)}};
  } else {
    snapshot["stopwords"] = nullptr;
  }
  return config;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad value in ") + what + ": '" + item + "'");
    }
  }
  return values;
}

std::vector<Topic> load_corpus(const std::string& path, bool lenient) {
  ParseOptions options;
  options.strict = !lenient;
  return parse_corpus(std::filesystem::path(path), options);
}

DetectorParams detector_params(const DetectorOptions& o, bool require_alpha) {
  DetectorParams p;
  p.method = parse_method(o.method);
  p.pool_scope = parse_pool_scope(o.pool_scope);
  p.pool_aggregation = parse_pool_aggregation(o.pool_aggregation);
  if (o.beta && p.method != Method::selected_pool) throw UsageError("--beta is only valid with selected_pool");
  if (require_alpha) {
    if (!o.alpha) throw UsageError("--alpha is required");
    p.alpha = *o.alpha;
    p.beta = o.beta;
    p.validate();
  }
  return p;
}

nlohmann::ordered_json params_json(const DetectorParams& p) {
  nlohmann::ordered_json j;
  j["method"] = to_string(p.method);
  j["alpha"] = p.alpha;
  j["beta"] = p.beta ? nlohmann::ordered_json(*p.beta) : nlohmann::ordered_json(nullptr);
  j["beta_x8"] = p.beta ? nlohmann::ordered_json(8.0 * *p.beta) : nlohmann::ordered_json(nullptr);
  j["pool_scope"] = to_string(p.pool_scope);
  j["pool_aggregation"] = to_string(p.pool_aggregation);
  j["label"] = run_label(p);
  return j;
}

// Writes `content` to --out (with a manifest) or to standard output.
void emit(const Context& ctx, RunManifest manifest, const std::string& content) {
  if (ctx.global.out_path.empty()) {
    ctx.out << content;
    return;
  }
  std::filesystem::path path = ctx.global.out_path;
  write_file_atomic(path, content);
  manifest.outputs.push_back({path.string(), sha256_hex(content)});
  write_file_atomic(manifest_path_for(path), manifest.to_json());
  ctx.note("wrote " + path.string());
}

RunManifest base_manifest(const Context& ctx, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.arguments = ctx.arguments;
  m.seed = ctx.global.seed;
  return m;
}

// Keeps topics whose novelty labels are complete; in strict mode an
// incomplete topic is an error.
std::vector<Topic> assessed_topics(const Context& ctx, std::vector<Topic> topics, bool lenient) {
  std::vector<Topic> kept;
  for (auto& t : topics) {
    auto report = validate_gold(t);
    if (report.snm_computable()) {
      kept.push_back(std::move(t));
      continue;
    }
    if (!lenient) throw std::runtime_error(report.summary() + " (use --lenient to skip such topics)");
    ctx.note("skipping " + report.summary());
  }
  if (kept.empty()) throw std::runtime_error("no topic has complete novelty labels");
  return kept;
}

int cmd_synth(const Context& ctx, const SynthOptions& o) {
  facts::GenParams p;
  p.n_topics = o.topics;
  p.sentences_per_topic = o.sentences;
  p.fact_vocab = o.fact_vocab;
  auto colon = o.facts_per_sentence.find(':');
  try {
    if (colon == std::string::npos) {
      p.facts_lo = p.facts_hi = std::stoul(o.facts_per_sentence);
    } else {
      p.facts_lo = std::stoul(o.facts_per_sentence.substr(0, colon));
      p.facts_hi = std::stoul(o.facts_per_sentence.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw UsageError("--facts-per-sentence expects LO:HI, got '" + o.facts_per_sentence + "'");
  }
  p.redundancy_bias = o.redundancy_bias;
  p.terms_per_fact = o.terms_per_fact;
  p.noise_terms_per_sentence = o.noise_terms;
  p.noise_vocab = o.noise_vocab;
  p.redundancy_source = facts::parse_redundancy_source(o.redundancy_source);
  p.fresh_novel_facts = o.fresh_novel_facts;
  p.seed = ctx.global.seed.value_or(0);
  if (ctx.global.out_path.empty()) throw UsageError("synth requires --out");

  auto corpus = facts::gen_corpus(p);
  std::ostringstream corpus_text, sidecar_text;
  write_corpus(corpus_text, corpus.topics);
  facts::write_fact_sidecar(sidecar_text, corpus);

  std::filesystem::path out = ctx.global.out_path;
  auto sidecar = out;
  sidecar += ".facts.tsv";
  write_file_atomic(sidecar, sidecar_text.str());

  auto manifest = base_manifest(ctx, "synth");
  manifest.seed = p.seed;
  manifest.params = {{"topics", p.n_topics},
                     {"sentences_per_topic", p.sentences_per_topic},
                     {"fact_vocab", p.fact_vocab},
                     {"facts_per_sentence", {p.facts_lo, p.facts_hi}},
                     {"redundancy_bias", p.redundancy_bias},
                     {"terms_per_fact", p.terms_per_fact},
                     {"noise_terms_per_sentence", p.noise_terms_per_sentence},
                     {"noise_vocab", p.noise_vocab},
                     {"redundancy_source", to_string(p.redundancy_source)},
                     {"fresh_novel_facts", p.fresh_novel_facts},
                     {"redundant_sentences", corpus.metadata.n_redundant},
                     {"union_only_redundant", corpus.metadata.n_union_only}};
  manifest.params["snm_ceiling"] =
      corpus.metadata.snm_ceiling ? nlohmann::ordered_json(*corpus.metadata.snm_ceiling) : nlohmann::ordered_json(nullptr);
  manifest.outputs.push_back({sidecar.string(), sha256_hex(sidecar_text.str())});
  emit(ctx, std::move(manifest), corpus_text.str());
  return 0;
}

int cmd_run(const Context& ctx, const RunOptions& o) {
  auto params = detector_params(o.detector, true);
  nlohmann::ordered_json config_snapshot;
  auto config = tokenizer_config(ctx, config_snapshot);
  auto topics = load_corpus(o.corpus, o.lenient);

  RunFile run;
  run.label = run_label(params);
  for (const auto& topic : topics) {
    auto prepared = prepare_topic(topic, config);
    run.topics.push_back({topic.topic_id, judge_topic(prepared.vectors, params)});
  }
  std::ostringstream text;
  write_run(text, run);

  auto manifest = base_manifest(ctx, "run");
  manifest.config = config_snapshot;
  manifest.inputs.push_back({o.corpus, sha256_file(o.corpus)});
  manifest.params = params_json(params);
  ctx.note("label " + run.label);
  emit(ctx, std::move(manifest), text.str());
  return 0;
}

RunFile load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run file '" + path + "'");
  return read_run(in);
}

int cmd_eval(const Context& ctx, const EvalOptions& o) {
  ReportColumns columns{false, false, false};
  std::stringstream ss(o.metrics);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "snm") continue;
    if (item == "mistake") {
      columns.mistake = true;
    } else if (item == "spsm") {
      columns.spsm = true;
    } else if (item == "psm") {
      columns.psm = true;
    } else {
      throw UsageError("unknown metric '" + item + "' (expected snm, mistake, spsm, psm)");
    }
  }

  auto topics = assessed_topics(ctx, load_corpus(o.corpus, o.lenient), o.lenient);
  if (columns.psm) {
    for (const auto& t : topics) {
      auto report = validate_gold(t);
      if (!report.psm_computable()) {
        throw std::runtime_error("PSM requested but " + report.summary());
      }
    }
  }
  auto run = load_run(o.run);
  auto judgments = align_run(run, topics, o.lenient);
  auto report = evaluate_run(topics, judgments, columns.psm);
  std::ostringstream text;
  write_metric_report(text, report, run.label, columns);

  auto manifest = base_manifest(ctx, "eval");
  manifest.inputs.push_back({o.corpus, sha256_file(o.corpus)});
  manifest.inputs.push_back({o.run, sha256_file(o.run)});
  manifest.params = {{"metrics", o.metrics}, {"label", run.label}, {"topics", topics.size()}};
  emit(ctx, std::move(manifest), text.str());
  return 0;
}

int cmd_tune(const Context& ctx, const TuneOptions& o) {
  auto base = detector_params(o.detector, false);
  if (o.detector.alpha) throw UsageError("tune searches alpha; do not pass --alpha");
  Grid grid = default_grid(base.method);
  if (!o.alphas.empty()) grid.alphas = parse_list(o.alphas, "--alphas");
  if (!o.betas.empty()) {
    if (base.method != Method::selected_pool) throw UsageError("--betas is only valid with selected_pool");
    grid.betas = parse_list(o.betas, "--betas");
  }
  auto objective = parse_objective(o.objective);
  nlohmann::ordered_json config_snapshot;
  auto config = tokenizer_config(ctx, config_snapshot);
  auto topics = assessed_topics(ctx, load_corpus(o.corpus, o.lenient), o.lenient);
  auto prepared = prepare_topics(topics, config);

  std::ostringstream text;
  auto manifest = base_manifest(ctx, "tune");
  manifest.config = config_snapshot;
  manifest.inputs.push_back({o.corpus, sha256_file(o.corpus)});
  manifest.params = params_json(base);
  manifest.params.erase("alpha");
  manifest.params.erase("beta");
  manifest.params.erase("beta_x8");
  manifest.params.erase("label");
  manifest.params["alphas"] = grid.alphas;
  manifest.params["betas"] = grid.betas;
  manifest.params["objective"] = to_string(objective);
  manifest.params["loo"] = o.loo;
  if (o.loo) {
    auto result = loo(prepared, base, grid, objective);
    write_loo_report(text, result, objective);
    ctx.note("leave-one-out mean F " + std::to_string(result.mean_f));
  } else {
    auto result = grid_search(prepared, base, grid, objective);
    write_tune_report(text, result, objective);
    manifest.params["best"] = params_json(result.best);
    ctx.note("best " + run_label(result.best));
  }
  emit(ctx, std::move(manifest), text.str());
  return 0;
}

std::optional<double> metric_value(const TopicMetrics& m, const std::string& metric) {
  if (metric == "f") return m.snm.f;
  if (metric == "precision") return m.snm.precision;
  if (metric == "recall") return m.snm.recall;
  if (metric == "mistake") return m.mistake_rate;
  if (metric == "errors") return static_cast<double>(m.counts.mistakes());
  if (metric == "spsm") return m.spsm;
  if (metric == "psm") return m.psm;
  throw UsageError("unknown metric '" + metric + "' (expected f, precision, recall, mistake, errors, spsm, psm)");
}

int cmd_compare(const Context& ctx, const CompareOptions& o) {
  auto topics = assessed_topics(ctx, load_corpus(o.corpus, o.lenient), o.lenient);
  const bool with_psm = o.metric == "psm";
  auto run_a = load_run(o.run_a);
  auto run_b = load_run(o.run_b);
  auto report_a = evaluate_run(topics, align_run(run_a, topics, o.lenient), with_psm);
  auto report_b = evaluate_run(topics, align_run(run_b, topics, o.lenient), with_psm);

  std::vector<CompareRow> rows;
  std::vector<double> xs, ys;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    auto a = metric_value(report_a.topics[t], o.metric);
    auto b = metric_value(report_b.topics[t], o.metric);
    if (!a || !b) {
      ctx.note("topic " + topics[t].topic_id + " has no " + o.metric + " value; left out of the test");
      continue;
    }
    rows.push_back({topics[t].topic_id, *a, *b});
    xs.push_back(*a);
    ys.push_back(*b);
  }
  auto t = paired_t(xs, ys);
  std::ostringstream text;
  write_compare_report(text, o.metric, run_a.label.empty() ? o.run_a : run_a.label,
                       run_b.label.empty() ? o.run_b : run_b.label, rows, t);

  auto manifest = base_manifest(ctx, "compare");
  manifest.inputs.push_back({o.corpus, sha256_file(o.corpus)});
  manifest.inputs.push_back({o.run_a, sha256_file(o.run_a)});
  manifest.inputs.push_back({o.run_b, sha256_file(o.run_b)});
  manifest.params = {{"metric", o.metric}, {"pairs", rows.size()}};
  emit(ctx, std::move(manifest), text.str());
  return 0;
}

void add_detector_options(CLI::App* cmd, DetectorOptions& o, bool with_thresholds) {
  cmd->add_option("--method", o.method, "similarity | overlap | pool | selected_pool")->capture_default_str();
  if (with_thresholds) {
    cmd->add_option("--alpha", o.alpha, "Redundancy threshold in [0,1]");
    cmd->add_option("--beta", o.beta, "Selection threshold in [0,1] (selected_pool)");
  }
  cmd->add_option("--pool-scope", o.pool_scope, "all_previous | novel_only")->capture_default_str();
  cmd->add_option("--pool-aggregation", o.pool_aggregation, "max | sum")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentence-level novelty detection toolkit", "noveldetect"};
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx{{}, args, out, err};
  app.add_option("--config", ctx.global.config_path, "Tokenizer config file (key=value); default $NOVELDETECT_CONFIG");
  app.add_option("--seed", ctx.global.seed, "Random seed");
  app.add_option("--out", ctx.global.out_path, "Output file; a manifest is written next to it");
  app.add_flag("--quiet", ctx.global.quiet, "Suppress progress notes");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with fact-level gold labels");
  synth_cmd->add_option("--topics", synth.topics)->capture_default_str();
  synth_cmd->add_option("--sentences", synth.sentences, "Sentences per topic")->capture_default_str();
  synth_cmd->add_option("--fact-vocab", synth.fact_vocab)->capture_default_str();
  synth_cmd->add_option("--facts-per-sentence", synth.facts_per_sentence, "LO:HI")->capture_default_str();
  synth_cmd->add_option("--redundancy-bias", synth.redundancy_bias)->capture_default_str();
  synth_cmd->add_option("--terms-per-fact", synth.terms_per_fact)->capture_default_str();
  synth_cmd->add_option("--noise-terms", synth.noise_terms, "Noise terms per sentence")->capture_default_str();
  synth_cmd->add_option("--noise-vocab", synth.noise_vocab)->capture_default_str();
  synth_cmd->add_option("--redundancy-source", synth.redundancy_source, "any_seen | single_sentence")
      ->capture_default_str();
  synth_cmd->add_flag("--fresh-novel-facts", synth.fresh_novel_facts);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Judge every sentence of a corpus");
  run_cmd->add_option("--corpus", run.corpus)->required();
  run_cmd->add_flag("--lenient", run.lenient, "Relax corpus invariant checks");
  add_detector_options(run_cmd, run.detector, true);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a run against gold labels");
  eval_cmd->add_option("--run", eval.run)->required();
  eval_cmd->add_option("--corpus", eval.corpus)->required();
  eval_cmd->add_option("--metrics", eval.metrics, "Comma list of snm, mistake, spsm, psm")->capture_default_str();
  eval_cmd->add_flag("--lenient", eval.lenient, "Skip topics with incomplete labels");

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search or leave-one-out threshold tuning");
  tune_cmd->add_option("--corpus", tune.corpus)->required();
  tune_cmd->add_flag("--lenient", tune.lenient, "Skip topics with incomplete labels");
  add_detector_options(tune_cmd, tune.detector, true);
  tune_cmd->add_option("--alphas", tune.alphas, "Comma list; default 0.05..0.95");
  tune_cmd->add_option("--betas", tune.betas, "Comma list; default 0.05..0.95");
  tune_cmd->add_option("--objective", tune.objective, "mean_f | total_errors")->capture_default_str();
  tune_cmd->add_flag("--loo", tune.loo, "Leave-one-out over topics");

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Paired t-test between two runs");
  compare_cmd->add_option("--corpus", compare.corpus)->required();
  compare_cmd->add_option("--metric", compare.metric, "f | precision | recall | mistake | errors | spsm | psm")
      ->capture_default_str();
  compare_cmd->add_flag("--lenient", compare.lenient, "Skip topics with incomplete labels");
  compare_cmd->add_option("run_a", compare.run_a)->required();
  compare_cmd->add_option("run_b", compare.run_b)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(ctx, synth);
    if (run_cmd->parsed()) return cmd_run(ctx, run);
    if (eval_cmd->parsed()) return cmd_eval(ctx, eval);
    if (tune_cmd->parsed()) return cmd_tune(ctx, tune);
    if (compare_cmd->parsed()) return cmd_compare(ctx, compare);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace noveldetect
