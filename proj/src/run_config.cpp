#include "docclass/run_config.hpp"

#include "docclass/errors.hpp"
#include "docclass/random.hpp"

namespace docclass {

void RunConfig::finalize_seeds() { svm.seed = derive_seed(seed, "svm"); }

RunConfig preset_config(const std::string& name) {
  RunConfig config;
  if (name == "baseline-20k") {
    config.views = {word_view(1, 1, 20000)};
  } else if (name == "baseline-40k" || name == "baseline-aug") {
    config.views = {word_view(1, 1, 40000)};
  } else if (name == "selftrain") {
    config.views = {word_view(1, 1, 40000)};
    config.selftrain = SelfTrainConfig{};
  } else if (name == "ensemble") {
    config.views = {word_view(1, 2, 40000), char_view(3, 6)};
  } else {
    std::string known;
    for (const std::string& p : preset_names()) {
      if (!known.empty()) known += ", ";
      known += p;
    }
    throw UsageError("unknown preset \"" + name + "\" (known: " + known + ")");
  }
  return config;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "baseline-20k", "baseline-40k", "baseline-aug", "selftrain", "ensemble"};
  return names;
}

nlohmann::json run_config_to_json(const RunConfig& config) {
  nlohmann::json views = nlohmann::json::array();
  for (const ViewConfig& view : config.views) views.push_back(view);
  return nlohmann::json{
      {"views", std::move(views)},
      {"svm",
       {{"c", config.svm.c},
        {"tol", config.svm.tol},
        {"max_outer_iters", config.svm.max_outer_iters}}},
      {"selftrain",
       {{"confidence_threshold", config.selftrain.confidence_threshold},
        {"max_adopted_fraction", config.selftrain.max_adopted_fraction},
        {"rounds", config.selftrain.rounds}}},
      {"fusion", fusion_name(config.fusion)},
      {"folds", config.folds},
      {"stratified", config.stratified},
      {"seed", config.seed},
      {"transductive", config.transductive}};
}

}  // namespace docclass
