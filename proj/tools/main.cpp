// docclass: train, apply, and evaluate patent-section text classifiers.
//
// Five subcommands sharing one configuration surface:
//   train       fit an ensemble on labeled JSONL, write a model file
//   predict     apply a model file to JSONL, write prediction JSONL
//   evaluate    score a model file against labeled JSONL
//   cv          k-fold cross validation of a configuration
//   self-train  confidence-gated pseudo-labeling, then a final fit
//
// Exit codes: 0 success, 1 runtime failure, 2 unusable invocation.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "docclass/corpus.hpp"
#include "docclass/ensemble.hpp"
#include "docclass/errors.hpp"
#include "docclass/eval.hpp"
#include "docclass/model_io.hpp"
#include "docclass/random.hpp"
#include "docclass/run_config.hpp"
#include "docclass/semisup.hpp"

namespace {

using namespace docclass;
using nlohmann::json;

struct Flags {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string preset;
  std::string word_ngrams;
  std::string char_ngrams;
  std::vector<std::string> max_features;
  double c = 1.0;
  double tol = 1e-3;
  int max_iters = 1000;
  std::string fusion = "mean";
  int folds = 10;
  bool no_stratify = false;
  double confidence_threshold = 0.9;
  double max_adopted_fraction = 1.0;
  int rounds = 1;
  bool transductive = false;
  std::vector<std::string> extra_train;
};

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed,
                  "Master seed; every random stream derives from it")
      ->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all hardware)")
      ->capture_default_str();
  cmd->add_option("--preset", f.preset,
                  "Configuration preset: baseline-20k, baseline-40k, "
                  "baseline-aug, selftrain, ensemble");
  cmd->add_option("--word-ngrams", f.word_ngrams,
                  "Word n-gram range MIN..MAX; with --char-ngrams, replaces "
                  "the configured views");
  cmd->add_option("--char-ngrams", f.char_ngrams,
                  "Character n-gram range MIN..MAX");
  cmd->add_option("--max-features", f.max_features,
                  "Per-view vocabulary cap, N or 'unlimited' (repeatable, "
                  "applied to views in order)");
  cmd->add_option("--c", f.c, "SVM regularization trade-off C > 0")
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "Solver convergence tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Solver epoch cap")
      ->capture_default_str();
  cmd->add_option("--fusion", f.fusion, "Ensemble fusion: mean or vote")
      ->capture_default_str();
}

// True when the flag exists on this subcommand and the user passed it.
bool given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

std::pair<int, int> parse_ngram_range(const std::string& text,
                                      const std::string& flag) {
  const auto fail = [&]() -> std::pair<int, int> {
    throw UsageError(flag + " expects MIN..MAX, got \"" + text + "\"");
  };
  std::string lo = text, hi = text;
  if (const auto pos = text.find(".."); pos != std::string::npos) {
    lo = text.substr(0, pos);
    hi = text.substr(pos + 2);
  }
  try {
    std::size_t used = 0;
    const int a = std::stoi(lo, &used);
    if (used != lo.size()) return fail();
    const int b = std::stoi(hi, &used);
    if (used != hi.size()) return fail();
    if (a < 1 || b < a) {
      throw UsageError(flag + " range must satisfy 1 <= MIN <= MAX, got \"" +
                       text + "\"");
    }
    return {a, b};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    return fail();
  }
}

std::optional<std::uint32_t> parse_feature_cap(const std::string& text) {
  if (text == "unlimited") return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used == text.size() && v >= 1 && v <= 0xffffffffUL) {
      return static_cast<std::uint32_t>(v);
    }
  } catch (const std::exception&) {
  }
  throw UsageError(
      "--max-features expects a positive integer or 'unlimited', got \"" +
      text + "\"");
}

RunConfig build_config(const CLI::App* cmd, const Flags& f) {
  RunConfig config;
  if (!f.preset.empty()) config = preset_config(f.preset);

  if (given(cmd, "--word-ngrams") || given(cmd, "--char-ngrams")) {
    config.views.clear();
    if (given(cmd, "--word-ngrams")) {
      const auto [lo, hi] = parse_ngram_range(f.word_ngrams, "--word-ngrams");
      config.views.push_back(word_view(lo, hi));
    }
    if (given(cmd, "--char-ngrams")) {
      const auto [lo, hi] = parse_ngram_range(f.char_ngrams, "--char-ngrams");
      config.views.push_back(char_view(lo, hi));
    }
  }
  if (given(cmd, "--max-features")) {
    if (f.max_features.size() > config.views.size()) {
      throw UsageError("--max-features given " +
                       std::to_string(f.max_features.size()) +
                       " times but the configuration has " +
                       std::to_string(config.views.size()) + " view(s)");
    }
    for (std::size_t i = 0; i < f.max_features.size(); ++i) {
      config.views[i].max_features = parse_feature_cap(f.max_features[i]);
    }
  }
  try {
    for (const ViewConfig& view : config.views) validate_view(view);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  if (given(cmd, "--c")) config.svm.c = f.c;
  if (given(cmd, "--tol")) config.svm.tol = f.tol;
  if (given(cmd, "--max-iters")) config.svm.max_outer_iters = f.max_iters;
  if (config.svm.c <= 0.0) throw UsageError("--c must be > 0");
  if (config.svm.tol <= 0.0) throw UsageError("--tol must be > 0");
  if (config.svm.max_outer_iters < 1) throw UsageError("--max-iters must be >= 1");

  if (f.fusion == "mean" || f.fusion == "mean_confidence") {
    config.fusion = FusionRule::mean_confidence;
  } else if (f.fusion == "vote" || f.fusion == "majority_vote") {
    config.fusion = FusionRule::majority_vote;
  } else {
    throw UsageError("--fusion must be 'mean' or 'vote', got \"" + f.fusion +
                     "\"");
  }

  if (given(cmd, "--folds")) config.folds = f.folds;
  if (config.folds < 2) throw UsageError("--folds must be >= 2");
  config.stratified = !f.no_stratify;

  if (given(cmd, "--confidence-threshold")) {
    config.selftrain.confidence_threshold = f.confidence_threshold;
  }
  if (given(cmd, "--max-adopted-fraction")) {
    config.selftrain.max_adopted_fraction = f.max_adopted_fraction;
  }
  if (given(cmd, "--rounds")) config.selftrain.rounds = f.rounds;
  const SelfTrainConfig& st = config.selftrain;
  if (st.confidence_threshold < 0.0 || st.confidence_threshold > 1.0) {
    throw UsageError("--confidence-threshold must be in [0, 1]");
  }
  if (st.max_adopted_fraction <= 0.0 || st.max_adopted_fraction > 1.0) {
    throw UsageError("--max-adopted-fraction must be in (0, 1]");
  }
  if (st.rounds < 1) throw UsageError("--rounds must be >= 1");

  config.transductive = f.transductive;
  config.seed = f.seed;
  config.threads = f.threads;
  config.finalize_seeds();
  return config;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

Corpus load_training_corpus(const std::string& path,
                            const std::vector<std::string>& extras) {
  Corpus corpus = load_jsonl(path, true);
  for (const std::string& extra : extras) {
    append_corpus(corpus, load_jsonl(extra, true));
  }
  return corpus;
}

void print_member_summaries(const EnsembleModel& model) {
  for (const LinearModel& member : model.members) {
    int converged = 0;
    double epoch_sum = 0.0;
    for (const BinaryModel& bin : member.per_class) {
      converged += bin.converged ? 1 : 0;
      epoch_sum += bin.outer_iters_used;
    }
    std::cout << "  " << view_name(member.view()) << ": "
              << member.vocab.size() << " features, " << converged << "/"
              << kNumClasses << " classes converged, mean "
              << std::fixed << std::setprecision(1)
              << epoch_sum / kNumClasses << " epochs\n"
              << std::defaultfloat;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

int run_train(const CLI::App* cmd, const Flags& f,
              const std::string& train_path, const std::string& model_out) {
  const RunConfig config = build_config(cmd, f);
  const Corpus corpus = load_training_corpus(train_path, f.extra_train);
  const auto start = std::chrono::steady_clock::now();
  const EnsembleModel model =
      train_ensemble(corpus, config.views, config.svm, config.fusion,
                     resolve_threads(config.threads));
  const double secs = seconds_since(start);
  const json metadata = {{"command", "train"},
                         {"config", run_config_to_json(config)},
                         {"corpus_fingerprint", corpus_fingerprint(corpus)},
                         {"n_training_docs", corpus.size()}};
  save_model(model, metadata, model_out);
  std::cout << "trained " << model.members.size() << " member(s) on "
            << corpus.size() << " documents in " << std::fixed
            << std::setprecision(1) << secs << "s\n"
            << std::defaultfloat;
  print_member_summaries(model);
  std::cout << "model written to " << model_out << "\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& input_path,
                const std::string& output_path) {
  const LoadedModel loaded = load_model(model_path);
  const Corpus corpus = load_jsonl(input_path, false);
  std::string out;
  for (const Document& doc : corpus.documents) {
    const Prediction p = predict_ensemble(loaded.model, doc);
    json confidences = json::array();
    for (int c = 0; c < kNumClasses; ++c) confidences.push_back(p.confidence[c]);
    const json record = {{"id", doc.id},
                         {"predicted_label", label_string(p.label)},
                         {"confidences", std::move(confidences)}};
    out += record.dump();
    out += '\n';
  }
  if (output_path == "-") {
    std::cout << out;
  } else {
    atomic_write_file(output_path, out);
  }
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& labeled_path,
                 const std::string& confusion_csv) {
  const LoadedModel loaded = load_model(model_path);
  const Corpus corpus = load_jsonl(labeled_path, true);
  const EvalReport report = evaluate_model(loaded.model, corpus);
  if (!confusion_csv.empty()) {
    std::ostringstream csv;
    write_confusion_csv(report.confusion, csv);
    atomic_write_file(confusion_csv, csv.str());
  }
  std::cout << report_to_json(report).dump(2) << "\n";
  return 0;
}

int run_cv(const CLI::App* cmd, const Flags& f, const std::string& path) {
  const RunConfig config = build_config(cmd, f);
  const Corpus corpus = load_jsonl(path, true);
  CvOptions options;
  options.k = config.folds;
  options.fold_seed = derive_seed(config.seed, "cv");
  options.stratified = config.stratified;
  options.threads = resolve_threads(config.threads);
  const CvResult result = cross_validate(corpus, config.views, config.svm,
                                         options, config.fusion);
  std::cout << cv_to_json(result).dump(2) << "\n";
  return 0;
}

int run_self_train(const CLI::App* cmd, const Flags& f,
                   const std::string& labeled_path,
                   const std::string& unlabeled_path,
                   const std::string& model_out,
                   const std::string& report_out) {
  const RunConfig config = build_config(cmd, f);
  const Corpus labeled = load_training_corpus(labeled_path, f.extra_train);
  const Corpus unlabeled = load_jsonl(unlabeled_path, false);
  const auto start = std::chrono::steady_clock::now();
  const SelfTrainResult result =
      self_train(labeled, unlabeled, config.views, config.svm,
                 config.selftrain, config.fusion,
                 resolve_threads(config.threads));
  const double secs = seconds_since(start);
  const json metadata = {
      {"command", "self-train"},
      {"config", run_config_to_json(config)},
      {"corpus_fingerprint", corpus_fingerprint(labeled)},
      {"unlabeled_fingerprint", corpus_fingerprint(unlabeled)},
      {"n_training_docs", labeled.size()},
      {"n_unlabeled_docs", unlabeled.size()},
      {"n_adopted", result.adoptions.size()},
      {"transductive", config.transductive}};
  save_model(result.model, metadata, model_out);
  std::ostringstream report;
  write_adoption_report(result.adoptions, report);
  atomic_write_file(report_out, report.str());

  std::vector<std::size_t> per_round(
      static_cast<std::size_t>(config.selftrain.rounds), 0);
  for (const AdoptionRecord& a : result.adoptions) {
    per_round[static_cast<std::size_t>(a.round - 1)] += 1;
  }
  std::cout << "self-training adopted " << result.adoptions.size() << " of "
            << unlabeled.size() << " unlabeled documents over "
            << config.selftrain.rounds << " round(s)";
  if (config.transductive) std::cout << " [transductive]";
  std::cout << "\n";
  for (std::size_t r = 0; r < per_round.size(); ++r) {
    std::cout << "  round " << (r + 1) << ": " << per_round[r]
              << " adopted\n";
  }
  std::cout << "final pool " << (labeled.size() + result.adoptions.size())
            << " documents; retrained in " << std::fixed
            << std::setprecision(1) << secs << "s total\n"
            << std::defaultfloat;
  print_member_summaries(result.model);
  std::cout << "model written to " << model_out << "\nadoption report written to "
            << report_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "docclass: linear TF-IDF text classification over the eight patent "
      "sections (A-H), with n-gram ensembles and self-training"};
  app.require_subcommand(1);

  Flags flags;
  std::string train_path, model_path, input_path, output_path;
  std::string labeled_path, unlabeled_path, model_out, report_out;
  std::string confusion_csv;

  CLI::App* train = app.add_subcommand("train", "Train a model file");
  train->add_option("train_jsonl", train_path, "Labeled training JSONL")
      ->required();
  train->add_option("model_out", model_out, "Output model path")->required();
  train->add_option("--extra-train", flags.extra_train,
                    "Additional labeled training JSONL (repeatable)");
  add_config_flags(train, flags);

  CLI::App* predict =
      app.add_subcommand("predict", "Apply a model file to documents");
  predict->add_option("model", model_path, "Model file")->required();
  predict->add_option("input_jsonl", input_path, "Input JSONL (labels optional)")
      ->required();
  predict->add_option("output_jsonl", output_path,
                      "Predictions JSONL path, or - for stdout")
      ->required();

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a model file on labeled data");
  evaluate->add_option("model", model_path, "Model file")->required();
  evaluate->add_option("labeled_jsonl", labeled_path, "Gold-labeled JSONL")
      ->required();
  evaluate->add_option("--confusion-csv", confusion_csv,
                       "Also write the confusion matrix to this CSV path");

  CLI::App* cv = app.add_subcommand("cv", "K-fold cross validation");
  cv->add_option("labeled_jsonl", labeled_path, "Gold-labeled JSONL")
      ->required();
  cv->add_option("--folds", flags.folds, "Fold count k")->capture_default_str();
  cv->add_flag("--no-stratify", flags.no_stratify,
               "Plain instead of stratified folds");
  add_config_flags(cv, flags);

  CLI::App* selftrain = app.add_subcommand(
      "self-train", "Pseudo-label unlabeled data, retrain, write the model");
  selftrain->add_option("labeled_jsonl", labeled_path, "Gold-labeled JSONL")
      ->required();
  selftrain->add_option("unlabeled_jsonl", unlabeled_path, "Unlabeled pool")
      ->required();
  selftrain->add_option("model_out", model_out, "Output model path")
      ->required();
  selftrain->add_option("report_out", report_out, "Adoption report JSONL path")
      ->required();
  selftrain
      ->add_option("--confidence-threshold", flags.confidence_threshold,
                   "Minimum fused confidence to adopt a pseudo-label")
      ->capture_default_str();
  selftrain
      ->add_option("--max-adopted-fraction", flags.max_adopted_fraction,
                   "Per-round adoption cap as a fraction of the pool")
      ->capture_default_str();
  selftrain->add_option("--rounds", flags.rounds, "Self-training rounds")
      ->capture_default_str();
  selftrain->add_flag(
      "--transductive", flags.transductive,
      "Declare that the unlabeled pool is the evaluation set itself; "
      "recorded in the model metadata");
  selftrain->add_option("--extra-train", flags.extra_train,
                        "Additional labeled training JSONL (repeatable)");
  add_config_flags(selftrain, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*train) return run_train(train, flags, train_path, model_out);
    if (*predict) return run_predict(model_path, input_path, output_path);
    if (*evaluate) return run_evaluate(model_path, labeled_path, confusion_csv);
    if (*cv) return run_cv(cv, flags, labeled_path);
    if (*selftrain) {
      return run_self_train(selftrain, flags, labeled_path, unlabeled_path,
                            model_out, report_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
