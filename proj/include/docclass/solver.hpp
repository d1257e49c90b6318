#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <span>

#include "docclass/corpus.hpp"
#include "docclass/features.hpp"

namespace docclass {

using Vector8d = Eigen::Matrix<double, kNumClasses, 1>;

struct SvmParams {
  double c = 1.0;               // regularization trade-off, > 0
  double tol = 1e-3;            // stop when max projected-gradient violation < tol
  int max_outer_iters = 1000;   // epoch cap
  std::uint64_t seed = 0;       // permutation shuffling
};

struct BinaryModel {
  Eigen::VectorXd weights;
  bool converged = false;
  int outer_iters_used = 0;
};

// Snapshot handed to the training observer after each completed epoch.
struct EpochInfo {
  int epoch;                      // 1-based count of completed epochs
  double max_violation;           // max |projected gradient| over the sweep
  double primal_objective;        // f(w) after the epoch
  std::span<const double> alpha;  // dual variables
  const Eigen::VectorXd& weights;
};
using EpochObserver = std::function<void(const EpochInfo&)>;

double sparse_dot(const Eigen::VectorXd& w, const SparseVector& x);
void sparse_axpy(double coef, const SparseVector& x, Eigen::VectorXd& w);

// f(w) = 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)^2
double primal_objective(std::span<const SparseVector> X,
                        std::span<const int> y, double c,
                        const Eigen::VectorXd& w);

// Trains an L2-regularized L2-loss (squared hinge) linear SVM by dual
// coordinate descent. y entries are +1/-1; dim is the feature space size.
// The observer, when set, is invoked after every epoch.
BinaryModel train_binary_svm(std::span<const SparseVector> X,
                             std::span<const int> y, std::int32_t dim,
                             const SvmParams& params,
                             const EpochObserver& observer = {});

// w . x; throws if x references a feature id outside the model.
double decision_score(const BinaryModel& model, const SparseVector& x);

// One-vs-rest stack over the eight classes, in fixed A..H order, together
// with the feature view that produced it.
struct LinearModel {
  std::array<BinaryModel, kNumClasses> per_class;
  Vocabulary vocab;

  const ViewConfig& view() const { return vocab.view; }
};

// Trains eight class-vs-rest binary models over shared vectors. Classes
// absent from `labels` are trained against all-negative targets. Each class
// gets its own seed derived from params.seed, so results do not depend on
// the thread count.
LinearModel train_one_vs_rest(std::span<const SparseVector> X,
                              std::span<const Label> labels, Vocabulary vocab,
                              const SvmParams& params, unsigned threads = 1);

struct Prediction {
  Label label;
  Vector8d confidence;
};

Vector8d decision_scores(const LinearModel& model, const SparseVector& x);

// Max-shifted exp normalization; entries sum to 1.
Vector8d softmax(const Vector8d& scores);

// argmax over A..H in this order, for deterministic tie-breaks.
Label argmax_label(const Vector8d& values);

// Predicted label is the argmax of the raw decision scores; the confidence
// vector is their softmax.
Prediction predict_with_confidence(const LinearModel& model,
                                   const SparseVector& x);

}  // namespace docclass
