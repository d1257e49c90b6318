#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docclass/corpus.hpp"

namespace docclass {

enum class TermUnit : std::uint8_t { character, word };
enum class Weighting : std::uint8_t { tf, tfidf };

struct ViewConfig {
  TermUnit unit = TermUnit::word;
  int n_min = 1;
  int n_max = 2;
  std::optional<std::uint32_t> max_features;  // nullopt = unlimited
  Weighting weighting = Weighting::tfidf;
};

ViewConfig word_view(int n_min = 1, int n_max = 2,
                     std::optional<std::uint32_t> max_features = std::nullopt);
ViewConfig char_view(int n_min = 3, int n_max = 6,
                     std::optional<std::uint32_t> max_features = std::nullopt);

// e.g. "word-1-2" / "char-3-6", for logs and summaries.
std::string view_name(const ViewConfig& view);

// Throws Error if n-gram bounds or the cap violate their invariants.
void validate_view(const ViewConfig& view);

struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
  std::size_t operator()(const std::string& s) const {
    return std::hash<std::string_view>{}(s);
  }
};

struct SparseEntry {
  std::int32_t id;
  double value;
};

// Sorted by ascending feature id; no duplicates, no stored zeros.
struct SparseVector {
  std::vector<SparseEntry> entries;

  bool empty() const { return entries.empty(); }
  double squared_norm() const;
};

// Smoothed IDF; >= 1 for every term, recomputed identically at model load.
inline double idf_weight(std::int64_t n_docs, std::int64_t doc_freq) {
  return std::log((1.0 + static_cast<double>(n_docs)) /
                  (1.0 + static_cast<double>(doc_freq))) +
         1.0;
}

struct Vocabulary {
  std::vector<std::string> terms;  // feature id -> term
  std::unordered_map<std::string, std::int32_t, TransparentStringHash,
                     std::equal_to<>>
      index;                          // term -> feature id
  std::vector<std::int64_t> doc_freq;  // by feature id
  Eigen::VectorXd idf;                 // by feature id
  std::int64_t n_docs = 0;             // corpus size at fit time
  ViewConfig view;

  std::int32_t size() const { return static_cast<std::int32_t>(terms.size()); }

  std::int32_t find(std::string_view term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }
};

// Visits every term of `text` under the given unit and n-gram range, as
// views into `text`. Character n-grams slide over the whole normalized
// string, spaces included; word n-grams are contiguous token runs, which in
// normalized text are themselves contiguous slices.
template <typename F>
void for_each_term(std::string_view text, TermUnit unit, int n_min, int n_max,
                   F&& fn) {
  if (unit == TermUnit::character) {
    const std::size_t len = text.size();
    for (int n = n_min; n <= n_max; ++n) {
      if (len < static_cast<std::size_t>(n)) break;
      for (std::size_t i = 0; i + n <= len; ++i) {
        fn(text.substr(i, n));
      }
    }
    return;
  }
  // token start offsets; tokens are separated by exactly one space
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // (start, end)
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) end = text.size();
    spans.emplace_back(start, end);
    start = end + 1;
  }
  for (int n = n_min; n <= n_max; ++n) {
    if (spans.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= spans.size(); ++i) {
      fn(text.substr(spans[i].first, spans[i + n - 1].second - spans[i].first));
    }
  }
}

// All contiguous character substrings of each length in [n_min, n_max],
// with multiplicity.
std::vector<std::string> extract_char_ngrams(std::string_view text, int n_min,
                                             int n_max);

// Contiguous token n-grams joined by single spaces, with multiplicity.
std::vector<std::string> extract_word_ngrams(
    const std::vector<std::string>& tokens, int n_min, int n_max);

// Counts collection and document frequency of every term under the view,
// keeps the max_features most frequent by collection frequency (ties broken
// by ascending term), and assigns dense ids in that order.
Vocabulary build_vocabulary(const Corpus& corpus, const ViewConfig& view);

// Raw in-document term counts, weighted by IDF under tfidf, L2-normalized.
// Out-of-vocabulary terms are ignored; an all-out-of-vocabulary document
// vectorizes to the zero vector.
SparseVector vectorize(const Document& doc, const Vocabulary& vocab);

std::vector<SparseVector> vectorize_corpus(const Corpus& corpus,
                                           const Vocabulary& vocab);

}  // namespace docclass
