#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "docclass/model_io.hpp"
#include "docclass/semisup.hpp"

namespace docclass {

// Everything a run needs beyond its input paths. One master seed; the
// solver and fold seeds are derived from it per use, so runs with equal
// configs and inputs produce identical outputs regardless of thread count.
struct RunConfig {
  std::vector<ViewConfig> views = {word_view(1, 2), char_view(3, 6)};
  SvmParams svm;
  SelfTrainConfig selftrain;
  FusionRule fusion = FusionRule::mean_confidence;
  int folds = 10;
  bool stratified = true;
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0 = one per hardware thread
  bool transductive = false;

  // Fills the derived solver seed from the master seed.
  void finalize_seeds();
};

// Named presets:
//   baseline-20k  unigram TF-IDF capped at 20k features, single model
//   baseline-40k  unigram TF-IDF capped at 40k features, single model
//   baseline-aug  baseline-40k intended for use with extra training data
//   selftrain     baseline-40k plus confidence-gated self-training defaults
//   ensemble      word 1-2 (40k cap) + char 3-6 (uncapped), mean fusion
RunConfig preset_config(const std::string& name);

const std::vector<std::string>& preset_names();

nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace docclass
