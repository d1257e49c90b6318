#include "docclass/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>
#include <utility>
#include <vector>

#include "docclass/errors.hpp"
#include "docclass/random.hpp"

namespace docclass {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64_update(std::uint64_t h, std::string_view data) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(std::string("model file missing \"") + key + "\" in " + where);
  return *it;
}

}  // namespace

std::string fusion_name(FusionRule fusion) {
  return fusion == FusionRule::majority_vote ? "majority_vote"
                                             : "mean_confidence";
}

FusionRule parse_fusion(const std::string& name) {
  if (name == "mean_confidence") return FusionRule::mean_confidence;
  if (name == "majority_vote") return FusionRule::majority_vote;
  throw Error("unknown fusion rule \"" + name + "\"");
}

void to_json(json& j, const ViewConfig& view) {
  j = json{{"unit", view.unit == TermUnit::character ? "char" : "word"},
           {"n_min", view.n_min},
           {"n_max", view.n_max},
           {"weighting", view.weighting == Weighting::tf ? "tf" : "tfidf"}};
  if (view.max_features)
    j["max_features"] = *view.max_features;
  else
    j["max_features"] = nullptr;
}

void from_json(const json& j, ViewConfig& view) {
  const std::string unit = require(j, "unit", "view").get<std::string>();
  if (unit == "char")
    view.unit = TermUnit::character;
  else if (unit == "word")
    view.unit = TermUnit::word;
  else
    throw Error("unknown term unit \"" + unit + "\"");
  view.n_min = require(j, "n_min", "view").get<int>();
  view.n_max = require(j, "n_max", "view").get<int>();
  const json& cap = require(j, "max_features", "view");
  if (cap.is_null())
    view.max_features.reset();
  else
    view.max_features = cap.get<std::uint32_t>();
  const std::string weighting =
      require(j, "weighting", "view").get<std::string>();
  if (weighting == "tf")
    view.weighting = Weighting::tf;
  else if (weighting == "tfidf")
    view.weighting = Weighting::tfidf;
  else
    throw Error("unknown weighting \"" + weighting + "\"");
  validate_view(view);
}

void to_json(json& j, const SvmParams& params) {
  j = json{{"c", params.c},
           {"tol", params.tol},
           {"max_outer_iters", params.max_outer_iters},
           {"seed", params.seed}};
}

void from_json(const json& j, SvmParams& params) {
  params.c = require(j, "c", "svm").get<double>();
  params.tol = require(j, "tol", "svm").get<double>();
  params.max_outer_iters = require(j, "max_outer_iters", "svm").get<int>();
  params.seed = require(j, "seed", "svm").get<std::uint64_t>();
}

std::string corpus_fingerprint(const Corpus& corpus) {
  std::uint64_t h = 14695981039346656037ull;
  for (const Document& doc : corpus.documents) {
    h = fnv1a64_update(h, doc.id);
    h = fnv1a64_update(h, "\x1f");
    h = fnv1a64_update(h, doc.text);
    h = fnv1a64_update(h, "\x1f");
    char tag[3] = {doc.label ? label_char(*doc.label) : '?',
                   doc.pseudo_labeled ? 'P' : 'G', '\x1e'};
    h = fnv1a64_update(h, std::string_view(tag, 3));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

nlohmann::json model_to_json(const EnsembleModel& model,
                             nlohmann::json metadata) {
  json members = json::array();
  for (const LinearModel& member : model.members) {
    const Vocabulary& vocab = member.vocab;
    json classes = json::array();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const BinaryModel& bin = member.per_class[c];
      json weights = json::array();
      for (Eigen::Index i = 0; i < bin.weights.size(); ++i) {
        const double w = bin.weights[i];
        if (w != 0.0) weights.push_back(json::array({i, w}));
      }
      classes.push_back(json{{"label", label_string(all_labels()[c])},
                             {"converged", bin.converged},
                             {"outer_iters", bin.outer_iters_used},
                             {"weights", std::move(weights)}});
    }
    members.push_back(json{{"view", vocab.view},
                           {"vocabulary",
                            json{{"n_docs", vocab.n_docs},
                                 {"terms", vocab.terms},
                                 {"doc_freq", vocab.doc_freq}}},
                           {"dim", vocab.size()},
                           {"classes", std::move(classes)}});
  }
  return json{{"format_version", kModelFormatVersion},
              {"fusion", fusion_name(model.fusion)},
              {"metadata", std::move(metadata)},
              {"members", std::move(members)}};
}

EnsembleModel model_from_json(const nlohmann::json& j,
                              nlohmann::json* metadata_out) {
  if (!j.is_object()) throw Error("model file is not a JSON object");
  const json& version = require(j, "format_version", "model");
  if (!version.is_number_integer() ||
      version.get<int>() != kModelFormatVersion)
    throw Error("unsupported model format_version " + version.dump() +
                " (this build reads version " +
                std::to_string(kModelFormatVersion) + ")");

  EnsembleModel model;
  model.fusion = parse_fusion(
      require(j, "fusion", "model").get<std::string>());
  if (metadata_out) *metadata_out = require(j, "metadata", "model");

  const json& members = require(j, "members", "model");
  if (!members.is_array() || members.empty())
    throw Error("model file has no ensemble members");

  for (const json& jm : members) {
    LinearModel member;
    Vocabulary& vocab = member.vocab;
    vocab.view = require(jm, "view", "member").get<ViewConfig>();

    const json& jv = require(jm, "vocabulary", "member");
    require(jv, "terms", "vocabulary").get_to(vocab.terms);
    require(jv, "doc_freq", "vocabulary").get_to(vocab.doc_freq);
    vocab.n_docs = require(jv, "n_docs", "vocabulary").get<std::int64_t>();
    if (vocab.doc_freq.size() != vocab.terms.size())
      throw Error("vocabulary doc_freq length does not match terms");

    const auto dim = require(jm, "dim", "member").get<std::int64_t>();
    if (dim != static_cast<std::int64_t>(vocab.terms.size()))
      throw Error("model dimensionality mismatch: dim=" +
                  std::to_string(dim) + " but vocabulary has " +
                  std::to_string(vocab.terms.size()) + " terms");

    vocab.index.reserve(vocab.terms.size());
    for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
      auto [it, inserted] =
          vocab.index.emplace(vocab.terms[i], static_cast<std::int32_t>(i));
      (void)it;
      if (!inserted)
        throw Error("duplicate vocabulary term \"" + vocab.terms[i] + "\"");
    }
    vocab.idf.resize(static_cast<Eigen::Index>(vocab.terms.size()));
    for (std::size_t i = 0; i < vocab.doc_freq.size(); ++i)
      vocab.idf[static_cast<Eigen::Index>(i)] =
          idf_weight(vocab.n_docs, vocab.doc_freq[i]);

    const json& classes = require(jm, "classes", "member");
    if (!classes.is_array() || classes.size() != kNumClasses)
      throw Error("model member must have exactly " +
                  std::to_string(kNumClasses) + " classes");
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const json& jc = classes[c];
      const std::string label =
          require(jc, "label", "class").get<std::string>();
      if (label != label_string(all_labels()[c]))
        throw Error("model classes out of order: expected " +
                    label_string(all_labels()[c]) + ", found " + label);
      BinaryModel& bin = member.per_class[c];
      bin.converged = require(jc, "converged", "class").get<bool>();
      bin.outer_iters_used = require(jc, "outer_iters", "class").get<int>();
      bin.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
      for (const json& pair : require(jc, "weights", "class")) {
        if (!pair.is_array() || pair.size() != 2)
          throw Error("model weight entries must be [id, value] pairs");
        const auto id = pair[0].get<std::int64_t>();
        if (id < 0 || id >= dim)
          throw Error("model weight id " + std::to_string(id) +
                      " out of range for dim " + std::to_string(dim));
        const double w = pair[1].get<double>();
        if (!std::isfinite(w))
          throw Error("model weight for id " + std::to_string(id) +
                      " is not finite");
        bin.weights[static_cast<Eigen::Index>(id)] = w;
      }
    }
    model.members.push_back(std::move(member));
  }
  return model;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write file: " + path);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Error("failed writing " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw UsageError("cannot write file: " + path);
  }
}

void save_model(const EnsembleModel& model, const nlohmann::json& metadata,
                const std::string& path) {
  atomic_write_file(path, model_to_json(model, metadata).dump(2) + "\n");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed model file " + path + ": " + e.what());
  }
  LoadedModel loaded;
  loaded.model = model_from_json(j, &loaded.metadata);
  return loaded;
}

}  // namespace docclass
