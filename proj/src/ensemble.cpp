#include "docclass/ensemble.hpp"

#include <array>
#include <string>

#include "docclass/errors.hpp"
#include "docclass/random.hpp"

namespace docclass {

EnsembleModel train_ensemble(const Corpus& corpus,
                             const std::vector<ViewConfig>& views,
                             const SvmParams& params, FusionRule fusion,
                             unsigned threads) {
  if (views.empty()) {
    throw Error("no views");
  }
  Corpus labeled;
  for (const auto& doc : corpus.documents) {
    if (doc.label) labeled.documents.push_back(doc);
  }
  if (labeled.empty()) {
    throw Error("no labeled documents");
  }
  std::vector<Label> labels;
  labels.reserve(labeled.size());
  for (const auto& doc : labeled.documents) labels.push_back(*doc.label);

  EnsembleModel model;
  model.fusion = fusion;
  model.members.reserve(views.size());
  for (std::size_t m = 0; m < views.size(); ++m) {
    Vocabulary vocab = build_vocabulary(labeled, views[m]);
    const std::vector<SparseVector> X = vectorize_corpus(labeled, vocab);
    SvmParams member_params = params;
    member_params.seed =
        derive_seed(params.seed, "member/" + std::to_string(m));
    model.members.push_back(train_one_vs_rest(X, labels, std::move(vocab),
                                              member_params, threads));
  }
  return model;
}

Prediction predict_ensemble(const EnsembleModel& model, const Document& doc) {
  if (model.members.empty()) {
    throw Error("ensemble has no members");
  }
  Vector8d fused = Vector8d::Zero();
  std::array<int, kNumClasses> votes{};
  for (const auto& member : model.members) {
    const SparseVector x = vectorize(doc, member.vocab);
    const Prediction p = predict_with_confidence(member, x);
    fused += p.confidence;
    ++votes[static_cast<int>(p.label)];
  }
  fused /= static_cast<double>(model.members.size());

  if (model.fusion == FusionRule::mean_confidence) {
    return Prediction{argmax_label(fused), fused};
  }
  // modal vote; ties by fused confidence, then earliest class in A..H
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && fused[c] > fused[best])) {
      best = c;
    }
  }
  return Prediction{all_labels()[best], fused};
}

}  // namespace docclass
