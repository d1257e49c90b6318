#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "docclass/corpus.hpp"
#include "docclass/ensemble.hpp"
#include "json.hpp"

namespace docclass {

using ConfusionMatrix = Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses>;

struct EvalReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion = ConfusionMatrix::Zero();  // rows gold, cols pred
  std::int64_t n = 0;
};

// TP/FP/FN pooled over the eight classes; equals accuracy for this
// single-label task.
double micro_f1(std::span<const Label> gold, std::span<const Label> pred);

// Unweighted mean of per-class F1 over all eight classes; a class with no
// gold and no predicted occurrences contributes F1 = 0 and is still averaged.
double macro_f1(std::span<const Label> gold, std::span<const Label> pred);

ConfusionMatrix confusion_matrix(std::span<const Label> gold,
                                 std::span<const Label> pred);

EvalReport make_report(std::span<const Label> gold,
                       std::span<const Label> pred);

// Predicts every document and scores against its gold label. Unlabeled or
// pseudo-labeled documents are rejected by id: pseudo-labels never count
// as gold.
EvalReport evaluate_model(const EnsembleModel& model, const Corpus& corpus);

nlohmann::json report_to_json(const EvalReport& report);
void write_confusion_csv(const ConfusionMatrix& confusion, std::ostream& out);

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = true;
  std::vector<int> assignments;  // fold index per document
};

// Shuffles each class's members with the seeded generator (classes in A..H
// order) and deals all documents round-robin in one continuous pass, so
// per-class and overall fold sizes both differ by at most one.
FoldPlan stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed);

// Plain split: one shuffle of all documents, dealt round-robin.
FoldPlan plain_kfold(const Corpus& corpus, int k, std::uint64_t seed);

struct CvOptions {
  int k = 10;
  std::uint64_t fold_seed = 0;
  bool stratified = true;
  unsigned threads = 1;
  // Invoked once per fold with the fold's trained ensemble and report.
  std::function<void(int fold, const EnsembleModel&, const EvalReport&)>
      fold_observer;
};

struct CvResult {
  FoldPlan plan;
  std::vector<EvalReport> folds;
  double mean_micro_f1 = 0.0;
  double stddev_micro_f1 = 0.0;  // sample standard deviation
};

// For each fold: trains an ensemble on the other k-1 folds (vocabularies
// rebuilt per fold, so no term statistics leak from the held-out fold) and
// evaluates on the held-out fold.
CvResult cross_validate(const Corpus& corpus,
                        const std::vector<ViewConfig>& views,
                        const SvmParams& params, const CvOptions& options,
                        FusionRule fusion = FusionRule::mean_confidence);

nlohmann::json cv_to_json(const CvResult& result);

}  // namespace docclass
