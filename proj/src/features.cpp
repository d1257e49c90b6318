#include "docclass/features.hpp"

#include <algorithm>
#include <cmath>

#include "docclass/errors.hpp"

namespace docclass {

ViewConfig word_view(int n_min, int n_max,
                     std::optional<std::uint32_t> max_features) {
  ViewConfig v;
  v.unit = TermUnit::word;
  v.n_min = n_min;
  v.n_max = n_max;
  v.max_features = max_features;
  return v;
}

ViewConfig char_view(int n_min, int n_max,
                     std::optional<std::uint32_t> max_features) {
  ViewConfig v;
  v.unit = TermUnit::character;
  v.n_min = n_min;
  v.n_max = n_max;
  v.max_features = max_features;
  return v;
}

std::string view_name(const ViewConfig& view) {
  std::string name = view.unit == TermUnit::character ? "char" : "word";
  name += "-" + std::to_string(view.n_min) + "-" + std::to_string(view.n_max);
  return name;
}

void validate_view(const ViewConfig& view) {
  if (view.n_min < 1 || view.n_min > view.n_max) {
    throw Error("invalid n-gram range " + std::to_string(view.n_min) + ".." +
                std::to_string(view.n_max));
  }
  if (view.max_features && *view.max_features < 1) {
    throw Error("max_features must be >= 1 or unlimited");
  }
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.value * e.value;
  return s;
}

std::vector<std::string> extract_char_ngrams(std::string_view text, int n_min,
                                             int n_max) {
  if (n_min < 1 || n_min > n_max) {
    throw Error("invalid n-gram range");
  }
  std::vector<std::string> grams;
  for_each_term(text, TermUnit::character, n_min, n_max,
                [&](std::string_view t) { grams.emplace_back(t); });
  return grams;
}

std::vector<std::string> extract_word_ngrams(
    const std::vector<std::string>& tokens, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) {
    throw Error("invalid n-gram range");
  }
  std::vector<std::string> grams;
  for (int n = n_min; n <= n_max; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string term = tokens[i];
      for (int j = 1; j < n; ++j) {
        term += ' ';
        term += tokens[i + j];
      }
      grams.push_back(std::move(term));
    }
  }
  return grams;
}

namespace {

struct TermStats {
  std::int64_t collection_freq = 0;
  std::int64_t doc_freq = 0;
};

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, const ViewConfig& view) {
  validate_view(view);
  std::unordered_map<std::string, TermStats, TransparentStringHash,
                     std::equal_to<>>
      stats;
  std::unordered_map<std::string_view, std::int64_t> in_doc;
  for (const auto& doc : corpus.documents) {
    in_doc.clear();
    for_each_term(doc.text, view.unit, view.n_min, view.n_max,
                  [&](std::string_view t) { ++in_doc[t]; });
    for (const auto& [term, count] : in_doc) {
      auto it = stats.find(term);
      if (it == stats.end()) {
        it = stats.emplace(std::string(term), TermStats{}).first;
      }
      it->second.collection_freq += count;
      it->second.doc_freq += 1;
    }
  }
  if (stats.empty()) {
    throw Error("empty vocabulary");
  }

  // rank by (collection frequency desc, term asc)
  std::vector<std::pair<const std::string*, const TermStats*>> ranked;
  ranked.reserve(stats.size());
  for (const auto& [term, st] : stats) ranked.emplace_back(&term, &st);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second->collection_freq != b.second->collection_freq) {
      return a.second->collection_freq > b.second->collection_freq;
    }
    return *a.first < *b.first;
  });
  if (view.max_features && ranked.size() > *view.max_features) {
    ranked.resize(*view.max_features);
  }

  Vocabulary vocab;
  vocab.view = view;
  vocab.n_docs = static_cast<std::int64_t>(corpus.size());
  const std::size_t v = ranked.size();
  vocab.terms.reserve(v);
  vocab.doc_freq.reserve(v);
  vocab.idf.resize(static_cast<Eigen::Index>(v));
  vocab.index.reserve(v);
  for (std::size_t i = 0; i < v; ++i) {
    vocab.terms.push_back(*ranked[i].first);
    vocab.doc_freq.push_back(ranked[i].second->doc_freq);
    vocab.idf[static_cast<Eigen::Index>(i)] =
        idf_weight(vocab.n_docs, ranked[i].second->doc_freq);
    vocab.index.emplace(vocab.terms.back(), static_cast<std::int32_t>(i));
  }
  return vocab;
}

SparseVector vectorize(const Document& doc, const Vocabulary& vocab) {
  std::unordered_map<std::int32_t, std::int64_t> counts;
  for_each_term(doc.text, vocab.view.unit, vocab.view.n_min, vocab.view.n_max,
                [&](std::string_view t) {
                  const std::int32_t id = vocab.find(t);
                  if (id >= 0) ++counts[id];
                });
  SparseVector vec;
  vec.entries.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    const double idf =
        vocab.view.weighting == Weighting::tfidf ? vocab.idf[id] : 1.0;
    vec.entries.push_back({id, static_cast<double>(count) * idf});
  }
  std::sort(vec.entries.begin(), vec.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.id < b.id;
            });
  const double norm = std::sqrt(vec.squared_norm());
  if (norm > 0.0) {
    for (auto& e : vec.entries) e.value /= norm;
  }
  return vec;
}

std::vector<SparseVector> vectorize_corpus(const Corpus& corpus,
                                           const Vocabulary& vocab) {
  std::vector<SparseVector> vectors;
  vectors.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    vectors.push_back(vectorize(doc, vocab));
  }
  return vectors;
}

}  // namespace docclass
