#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docclass {

inline constexpr int kNumClasses = 8;

// Top-level IPC sections, the eight classes of the task.
enum class Label : std::uint8_t { A, B, C, D, E, F, G, H };

// Throws Error for anything but the single characters "A".."H".
Label parse_label(std::string_view code);

char label_char(Label label);
std::string label_string(Label label);
const std::array<Label, kNumClasses>& all_labels();

struct Document {
  std::string id;
  std::string text;  // normalized: lowercase tokens joined by single spaces
  std::optional<Label> label;
  bool pseudo_labeled = false;  // label came from self-training, not gold
};

// Documents in ingestion order; ids are unique within a corpus.
struct Corpus {
  std::vector<Document> documents;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
  std::size_t labeled_count() const;
};

// Collapses every maximal run of non-alphanumeric bytes (ASCII [A-Za-z0-9]
// is alphanumeric, everything else a separator) to a single space,
// lowercases, and drops tokens made of digits only. Idempotent.
std::string normalize_text(std::string_view raw);

// Splits normalized text on its single spaces. Empty input -> empty list.
std::vector<std::string> tokenize(std::string_view normalized);

// One JSON object per line: {"id": str, "text": str, "label": str?}.
// Text is normalized on ingestion. Malformed lines, duplicate ids, unknown
// labels, and (when require_labels) missing labels raise Error with the
// 1-based line number.
Corpus load_jsonl(const std::string& path, bool require_labels);
Corpus parse_jsonl(std::istream& in, bool require_labels,
                   const std::string& origin);

// Writes the gold schema back out, one document per line.
void write_jsonl(const Corpus& corpus, std::ostream& out);

// Appends src's documents to dst, rejecting duplicate ids across the result.
void append_corpus(Corpus& dst, Corpus src);

}  // namespace docclass
