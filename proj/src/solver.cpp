#include "docclass/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "docclass/errors.hpp"
#include "docclass/parallel.hpp"
#include "docclass/random.hpp"

namespace docclass {

double sparse_dot(const Eigen::VectorXd& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += w[e.id] * e.value;
  return s;
}

void sparse_axpy(double coef, const SparseVector& x, Eigen::VectorXd& w) {
  for (const auto& e : x.entries) w[e.id] += coef * e.value;
}

double primal_objective(std::span<const SparseVector> X,
                        std::span<const int> y, double c,
                        const Eigen::VectorXd& w) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double margin = 1.0 - y[i] * sparse_dot(w, X[i]);
    if (margin > 0.0) loss += margin * margin;
  }
  return 0.5 * w.squaredNorm() + c * loss;
}

namespace {

void validate_problem(std::span<const SparseVector> X, std::span<const int> y,
                      std::int32_t dim, const SvmParams& params) {
  if (params.c <= 0.0 || params.tol <= 0.0 || params.max_outer_iters < 1) {
    throw Error("invalid SVM parameters");
  }
  if (X.empty() || X.size() != y.size()) {
    throw Error("training set and targets must be nonempty and equal-sized");
  }
  for (const SparseVector& x : X) {
    std::int32_t prev = -1;
    for (const auto& e : x.entries) {
      if (e.id <= prev || e.id >= dim) {
        throw Error("feature id out of range or unsorted");
      }
      if (!std::isfinite(e.value)) {
        throw Error("non-finite feature value");
      }
      prev = e.id;
    }
  }
  for (int t : y) {
    if (t != 1 && t != -1) throw Error("targets must be +1 or -1");
  }
}

}  // namespace

// Dual coordinate descent for
//
//   min_w  0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)^2
//
// via its dual
//
//   min_a  0.5 a^T (Q + D) a - e^T a,   a_i >= 0,
//
// where Q_ij = y_i y_j x_i.x_j, D = diag(1/(2C)), and w = sum_i a_i y_i x_i
// is maintained incrementally. Each epoch sweeps the examples in a fresh
// seeded permutation; the projected gradient at coordinate i is
//
//   G_i = y_i w.x_i - 1 + a_i/(2C),  PG_i = min(G_i, 0) if a_i == 0 else G_i,
//
// and the closed-form step is a_i <- max(a_i - G_i / (x_i.x_i + 1/(2C)), 0).
// Training stops when an epoch's max |PG| drops below params.tol.
BinaryModel train_binary_svm(std::span<const SparseVector> X,
                             std::span<const int> y, std::int32_t dim,
                             const SvmParams& params,
                             const EpochObserver& observer) {
  validate_problem(X, y, dim, params);
  const std::size_t l = X.size();
  const double diag = 1.0 / (2.0 * params.c);

  std::vector<double> qd(l);
  for (std::size_t i = 0; i < l; ++i) qd[i] = X[i].squared_norm() + diag;

  BinaryModel model;
  model.weights = Eigen::VectorXd::Zero(dim);
  std::vector<double> alpha(l, 0.0);
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Rng rng(params.seed);
  int epoch = 0;
  for (; epoch < params.max_outer_iters; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (std::size_t s = 0; s < l; ++s) {
      const std::size_t i = order[s];
      const SparseVector& xi = X[i];
      const double g = y[i] * sparse_dot(model.weights, xi) - 1.0 +
                       alpha[i] * diag;
      const double pg = (alpha[i] == 0.0) ? std::min(g, 0.0) : g;
      max_violation = std::max(max_violation, std::fabs(pg));
      if (std::fabs(pg) > 1e-12) {
        const double alpha_new = std::max(alpha[i] - g / qd[i], 0.0);
        sparse_axpy((alpha_new - alpha[i]) * y[i], xi, model.weights);
        alpha[i] = alpha_new;
      }
    }
    if (observer) {
      observer(EpochInfo{epoch + 1, max_violation,
                         primal_objective(X, y, params.c, model.weights),
                         alpha, model.weights});
    }
    if (max_violation < params.tol) {
      model.converged = true;
      ++epoch;
      break;
    }
  }
  model.outer_iters_used = epoch;
  return model;
}

double decision_score(const BinaryModel& model, const SparseVector& x) {
  if (!x.entries.empty() &&
      x.entries.back().id >= static_cast<std::int32_t>(model.weights.size())) {
    throw Error("feature id out of range for model");
  }
  return sparse_dot(model.weights, x);
}

LinearModel train_one_vs_rest(std::span<const SparseVector> X,
                              std::span<const Label> labels, Vocabulary vocab,
                              const SvmParams& params, unsigned threads) {
  if (X.empty() || X.size() != labels.size()) {
    throw Error("training set and labels must be nonempty and equal-sized");
  }
  LinearModel model;
  model.vocab = std::move(vocab);
  const std::int32_t dim = model.vocab.size();
  parallel_for(kNumClasses, threads, [&](std::size_t c) {
    std::vector<int> targets(X.size());
    const Label cls = all_labels()[c];
    for (std::size_t i = 0; i < labels.size(); ++i) {
      targets[i] = labels[i] == cls ? +1 : -1;
    }
    SvmParams class_params = params;
    class_params.seed =
        derive_seed(params.seed, std::string("ovr/") + label_char(cls));
    model.per_class[c] = train_binary_svm(X, targets, dim, class_params);
  });
  return model;
}

Vector8d decision_scores(const LinearModel& model, const SparseVector& x) {
  Vector8d scores;
  for (int c = 0; c < kNumClasses; ++c) {
    scores[c] = decision_score(model.per_class[c], x);
  }
  return scores;
}

Vector8d softmax(const Vector8d& scores) {
  const double shift = scores.maxCoeff();
  Vector8d e = (scores.array() - shift).exp();
  return e / e.sum();
}

Label argmax_label(const Vector8d& values) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (values[c] > values[best]) best = c;
  }
  return all_labels()[best];
}

Prediction predict_with_confidence(const LinearModel& model,
                                   const SparseVector& x) {
  const Vector8d scores = decision_scores(model, x);
  return Prediction{argmax_label(scores), softmax(scores)};
}

}  // namespace docclass
