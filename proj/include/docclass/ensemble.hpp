#pragma once

#include <cstdint>
#include <vector>

#include "docclass/corpus.hpp"
#include "docclass/features.hpp"
#include "docclass/solver.hpp"

namespace docclass {

enum class FusionRule : std::uint8_t { mean_confidence, majority_vote };

// Ordered collection of per-view models sharing the eight-class label space.
struct EnsembleModel {
  std::vector<LinearModel> members;
  FusionRule fusion = FusionRule::mean_confidence;
};

// For each view: builds a vocabulary on the labeled documents of `corpus`,
// vectorizes them, and trains a one-vs-rest stack. Members are stored in
// view order. Unlabeled documents are ignored; pseudo-labeled ones train
// like any labeled example.
EnsembleModel train_ensemble(const Corpus& corpus,
                             const std::vector<ViewConfig>& views,
                             const SvmParams& params,
                             FusionRule fusion = FusionRule::mean_confidence,
                             unsigned threads = 1);

// Each member vectorizes the document under its own vocabulary; the fused
// confidence vector is the mean of the members' softmax vectors in both
// fusion modes. mean_confidence predicts its argmax; majority_vote takes
// the modal member argmax, breaking ties by fused confidence then A..H.
Prediction predict_ensemble(const EnsembleModel& model, const Document& doc);

}  // namespace docclass
