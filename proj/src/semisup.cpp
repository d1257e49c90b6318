#include "docclass/semisup.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "docclass/errors.hpp"
#include "json.hpp"

namespace docclass {

namespace {

void validate_config(const SelfTrainConfig& config) {
  if (config.confidence_threshold < 0.0 || config.confidence_threshold > 1.0) {
    throw Error("confidence_threshold must be in [0, 1]");
  }
  if (config.max_adopted_fraction <= 0.0 ||
      config.max_adopted_fraction > 1.0) {
    throw Error("max_adopted_fraction must be in (0, 1]");
  }
  if (config.rounds < 1) {
    throw Error("rounds must be >= 1");
  }
}

}  // namespace

SelfTrainResult self_train(const Corpus& labeled, const Corpus& unlabeled,
                           const std::vector<ViewConfig>& views,
                           const SvmParams& params,
                           const SelfTrainConfig& config, FusionRule fusion,
                           unsigned threads) {
  validate_config(config);
  if (labeled.labeled_count() == 0) {
    throw Error("labeled pool has no labeled documents");
  }
  {
    std::unordered_set<std::string> ids;
    for (const auto& doc : labeled.documents) ids.insert(doc.id);
    for (const auto& doc : unlabeled.documents) {
      if (!ids.insert(doc.id).second) {
        throw Error("duplicate id \"" + doc.id +
                    "\" between labeled and unlabeled pools");
      }
    }
  }

  Corpus pool = labeled;
  std::vector<Document> remaining;
  remaining.reserve(unlabeled.size());
  for (const auto& doc : unlabeled.documents) {
    Document stripped = doc;
    stripped.label.reset();  // gold labels in the pool are never used
    stripped.pseudo_labeled = false;
    remaining.push_back(std::move(stripped));
  }

  SelfTrainResult result;
  for (int round = 1; round <= config.rounds; ++round) {
    if (remaining.empty()) break;
    const EnsembleModel model =
        train_ensemble(pool, views, params, fusion, threads);

    struct Candidate {
      std::size_t index;
      Label label;
      double confidence;
    };
    std::vector<Candidate> eligible;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const Prediction p = predict_ensemble(model, remaining[i]);
      const double conf = p.confidence[static_cast<int>(p.label)];
      if (conf >= config.confidence_threshold) {
        eligible.push_back({i, p.label, conf});
      }
    }
    std::sort(eligible.begin(), eligible.end(),
              [&](const Candidate& a, const Candidate& b) {
                if (a.confidence != b.confidence) {
                  return a.confidence > b.confidence;
                }
                return remaining[a.index].id < remaining[b.index].id;
              });
    const std::size_t cap = static_cast<std::size_t>(
        std::floor(config.max_adopted_fraction *
                   static_cast<double>(remaining.size())));
    if (eligible.size() > cap) eligible.resize(cap);
    if (eligible.empty()) continue;

    std::unordered_set<std::size_t> adopted_indices;
    for (const Candidate& c : eligible) {
      Document doc = remaining[c.index];
      doc.label = c.label;
      doc.pseudo_labeled = true;
      pool.documents.push_back(std::move(doc));
      result.adoptions.push_back(
          {round, remaining[c.index].id, c.label, c.confidence});
      adopted_indices.insert(c.index);
    }
    std::vector<Document> kept;
    kept.reserve(remaining.size() - adopted_indices.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (!adopted_indices.count(i)) kept.push_back(std::move(remaining[i]));
    }
    remaining = std::move(kept);
  }

  result.model = train_ensemble(pool, views, params, fusion, threads);
  return result;
}

void write_adoption_report(const std::vector<AdoptionRecord>& adoptions,
                           std::ostream& out) {
  for (const auto& rec : adoptions) {
    nlohmann::json obj;
    obj["round"] = rec.round;
    obj["id"] = rec.id;
    obj["pseudo_label"] = label_string(rec.pseudo_label);
    obj["confidence"] = rec.confidence;
    out << obj.dump() << '\n';
  }
}

}  // namespace docclass
