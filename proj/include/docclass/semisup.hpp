#pragma once

#include <string>
#include <vector>

#include "docclass/corpus.hpp"
#include "docclass/ensemble.hpp"

namespace docclass {

struct SelfTrainConfig {
  double confidence_threshold = 0.9;  // minimum fused confidence for adoption
  double max_adopted_fraction = 1.0;  // cap per round, fraction of the pool
  int rounds = 1;
};

struct AdoptionRecord {
  int round;  // 1-based
  std::string id;
  Label pseudo_label;
  double confidence;
};

struct SelfTrainResult {
  EnsembleModel model;
  std::vector<AdoptionRecord> adoptions;
};

// Confidence-gated self-training. Per round: train an ensemble on the
// current labeled pool, predict the remaining unlabeled documents, and move
// those meeting the threshold -- truncated to max_adopted_fraction of the
// current pool by (confidence desc, id asc) -- into the labeled pool under
// their predicted label, flagged pseudo-labeled. After the final round the
// model is retrained on the final pool. Gold labels carried by documents in
// `unlabeled` are ignored.
SelfTrainResult self_train(const Corpus& labeled, const Corpus& unlabeled,
                           const std::vector<ViewConfig>& views,
                           const SvmParams& params,
                           const SelfTrainConfig& config,
                           FusionRule fusion = FusionRule::mean_confidence,
                           unsigned threads = 1);

// One JSON object per adopted document:
// {"round": int, "id": str, "pseudo_label": str, "confidence": real}
void write_adoption_report(const std::vector<AdoptionRecord>& adoptions,
                           std::ostream& out);

}  // namespace docclass
