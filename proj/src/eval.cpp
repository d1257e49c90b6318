#include "docclass/eval.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>

#include "docclass/errors.hpp"
#include "docclass/parallel.hpp"
#include "docclass/random.hpp"

namespace docclass {

namespace {

void check_lengths(std::span<const Label> gold, std::span<const Label> pred) {
  if (gold.size() != pred.size()) {
    throw Error("gold and predicted label lists differ in length");
  }
  if (gold.empty()) {
    throw Error("cannot evaluate zero documents");
  }
}

}  // namespace

double micro_f1(std::span<const Label> gold, std::span<const Label> pred) {
  check_lengths(gold, pred);
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) {
      ++tp;  // pooled over classes: one TP for the predicted class
    } else {
      ++fp;  // FP for the predicted class
      ++fn;  // FN for the gold class
    }
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : static_cast<double>(2 * tp) / denom;
}

double macro_f1(std::span<const Label> gold, std::span<const Label> pred) {
  check_lengths(gold, pred);
  const ConfusionMatrix m = confusion_matrix(gold, pred);
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    const std::int64_t tp = m(c, c);
    const std::int64_t fp = m.col(c).sum() - tp;
    const std::int64_t fn = m.row(c).sum() - tp;
    const double denom = static_cast<double>(2 * tp + fp + fn);
    sum += denom == 0.0 ? 0.0 : static_cast<double>(2 * tp) / denom;
  }
  return sum / kNumClasses;
}

ConfusionMatrix confusion_matrix(std::span<const Label> gold,
                                 std::span<const Label> pred) {
  check_lengths(gold, pred);
  ConfusionMatrix m = ConfusionMatrix::Zero();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    m(static_cast<int>(gold[i]), static_cast<int>(pred[i])) += 1;
  }
  return m;
}

EvalReport make_report(std::span<const Label> gold,
                       std::span<const Label> pred) {
  EvalReport report;
  report.n = static_cast<std::int64_t>(gold.size());
  report.confusion = confusion_matrix(gold, pred);
  report.micro_f1 = micro_f1(gold, pred);
  report.macro_f1 = macro_f1(gold, pred);
  report.accuracy = static_cast<double>(report.confusion.trace()) /
                    static_cast<double>(report.n);
  assert(report.micro_f1 == report.accuracy);
  return report;
}

EvalReport evaluate_model(const EnsembleModel& model, const Corpus& corpus) {
  std::vector<Label> gold;
  gold.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    if (!doc.label) {
      throw Error("unlabeled document \"" + doc.id + "\" in evaluation set");
    }
    if (doc.pseudo_labeled) {
      throw Error("pseudo-labeled document \"" + doc.id +
                  "\" cannot be scored as gold");
    }
    gold.push_back(*doc.label);
  }
  std::vector<Label> pred(corpus.size(), Label::A);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    pred[i] = predict_ensemble(model, corpus.documents[i]).label;
  }
  return make_report(gold, pred);
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json confusion = nlohmann::json::array();
  for (int g = 0; g < kNumClasses; ++g) {
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < kNumClasses; ++p) row.push_back(report.confusion(g, p));
    confusion.push_back(std::move(row));
  }
  return nlohmann::json{{"micro_f1", report.micro_f1},
                        {"macro_f1", report.macro_f1},
                        {"accuracy", report.accuracy},
                        {"n", report.n},
                        {"confusion", std::move(confusion)}};
}

void write_confusion_csv(const ConfusionMatrix& confusion, std::ostream& out) {
  out << "gold\\pred";
  for (Label l : all_labels()) out << ',' << label_char(l);
  out << '\n';
  for (int g = 0; g < kNumClasses; ++g) {
    out << label_char(all_labels()[g]);
    for (int p = 0; p < kNumClasses; ++p) out << ',' << confusion(g, p);
    out << '\n';
  }
}

namespace {

FoldPlan make_fold_plan(const Corpus& corpus, int k, std::uint64_t seed,
                        bool stratified) {
  if (k < 2) {
    throw Error("fold count must be >= 2");
  }
  if (static_cast<std::size_t>(k) > corpus.size()) {
    throw Error("fold count exceeds corpus size");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignments.assign(corpus.size(), -1);
  Rng rng(seed);
  std::size_t cursor = 0;
  auto deal = [&](std::vector<std::size_t>& indices) {
    rng.shuffle(indices);
    for (std::size_t idx : indices) {
      plan.assignments[idx] = static_cast<int>(cursor % k);
      ++cursor;
    }
  };
  if (stratified) {
    for (Label cls : all_labels()) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& doc = corpus.documents[i];
        if (!doc.label) {
          throw Error("unlabeled document \"" + doc.id +
                      "\" cannot be stratified");
        }
        if (*doc.label == cls) members.push_back(i);
      }
      deal(members);
    }
  } else {
    std::vector<std::size_t> indices(corpus.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    deal(indices);
  }
  return plan;
}

}  // namespace

FoldPlan stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  return make_fold_plan(corpus, k, seed, true);
}

FoldPlan plain_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  return make_fold_plan(corpus, k, seed, false);
}

CvResult cross_validate(const Corpus& corpus,
                        const std::vector<ViewConfig>& views,
                        const SvmParams& params, const CvOptions& options,
                        FusionRule fusion) {
  for (const auto& doc : corpus.documents) {
    if (!doc.label) {
      throw Error("unlabeled document \"" + doc.id +
                  "\" in cross-validation corpus");
    }
    if (doc.pseudo_labeled) {
      throw Error("pseudo-labeled document \"" + doc.id +
                  "\" cannot be scored as gold");
    }
  }
  CvResult result;
  result.plan = options.stratified
                    ? stratified_kfold(corpus, options.k, options.fold_seed)
                    : plain_kfold(corpus, options.k, options.fold_seed);
  result.folds.resize(options.k);
  std::mutex observer_mutex;
  parallel_for(options.k, options.threads, [&](std::size_t fold) {
    Corpus train_part, test_part;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (result.plan.assignments[i] == static_cast<int>(fold)) {
        test_part.documents.push_back(corpus.documents[i]);
      } else {
        train_part.documents.push_back(corpus.documents[i]);
      }
    }
    const EnsembleModel model =
        train_ensemble(train_part, views, params, fusion, 1);
    result.folds[fold] = evaluate_model(model, test_part);
    if (options.fold_observer) {
      std::lock_guard<std::mutex> lock(observer_mutex);
      options.fold_observer(static_cast<int>(fold), model, result.folds[fold]);
    }
  });
  double sum = 0.0;
  for (const auto& report : result.folds) sum += report.micro_f1;
  result.mean_micro_f1 = sum / options.k;
  double sq = 0.0;
  for (const auto& report : result.folds) {
    const double d = report.micro_f1 - result.mean_micro_f1;
    sq += d * d;
  }
  result.stddev_micro_f1 =
      options.k > 1 ? std::sqrt(sq / (options.k - 1)) : 0.0;
  return result;
}

nlohmann::json cv_to_json(const CvResult& result) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& report : result.folds) folds.push_back(report_to_json(report));
  return nlohmann::json{{"k", result.plan.k},
                        {"seed", result.plan.seed},
                        {"stratified", result.plan.stratified},
                        {"folds", std::move(folds)},
                        {"mean_micro_f1", result.mean_micro_f1},
                        {"stddev_micro_f1", result.stddev_micro_f1}};
}

}  // namespace docclass
