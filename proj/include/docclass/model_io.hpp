#pragma once

#include <string>

#include "docclass/ensemble.hpp"
#include "json.hpp"

namespace docclass {

inline constexpr int kModelFormatVersion = 1;

std::string fusion_name(FusionRule fusion);
FusionRule parse_fusion(const std::string& name);

void to_json(nlohmann::json& j, const ViewConfig& view);
void from_json(const nlohmann::json& j, ViewConfig& view);
void to_json(nlohmann::json& j, const SvmParams& params);
void from_json(const nlohmann::json& j, SvmParams& params);

// 64-bit FNV-1a over ids, texts, and labels, as a hex string. Recorded in
// model metadata so a model can be tied back to its training inputs.
std::string corpus_fingerprint(const Corpus& corpus);

// Single self-describing container: format_version, fusion rule, caller
// metadata, and per-member view + vocabulary + sparse per-class weights
// with explicit dimensionality.
nlohmann::json model_to_json(const EnsembleModel& model,
                             nlohmann::json metadata);

// Validates structure and dimensions; refuses unknown format versions.
EnsembleModel model_from_json(const nlohmann::json& j,
                              nlohmann::json* metadata_out = nullptr);

// Writes content to a temporary sibling and atomically renames it onto
// path, so a partial file is never left behind.
void atomic_write_file(const std::string& path, const std::string& content);

void save_model(const EnsembleModel& model, const nlohmann::json& metadata,
                const std::string& path);

struct LoadedModel {
  EnsembleModel model;
  nlohmann::json metadata;
};

LoadedModel load_model(const std::string& path);

}  // namespace docclass
