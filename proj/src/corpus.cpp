#include "docclass/corpus.hpp"

#include <fstream>
#include <ostream>
#include <unordered_set>

#include "docclass/errors.hpp"
#include "json.hpp"

namespace docclass {

namespace {

bool is_alnum_ascii(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

char lower_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

}  // namespace

Label parse_label(std::string_view code) {
  if (code.size() == 1 && code[0] >= 'A' && code[0] <= 'H') {
    return static_cast<Label>(code[0] - 'A');
  }
  throw Error("unknown label \"" + std::string(code) + "\"");
}

char label_char(Label label) {
  return static_cast<char>('A' + static_cast<int>(label));
}

std::string label_string(Label label) { return std::string(1, label_char(label)); }

const std::array<Label, kNumClasses>& all_labels() {
  static const std::array<Label, kNumClasses> labels = {
      Label::A, Label::B, Label::C, Label::D,
      Label::E, Label::F, Label::G, Label::H};
  return labels;
}

std::size_t Corpus::labeled_count() const {
  std::size_t n = 0;
  for (const auto& doc : documents) {
    if (doc.label) ++n;
  }
  return n;
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::string token;
  bool token_has_nondigit = false;
  auto flush_token = [&] {
    if (token.empty()) return;
    if (token_has_nondigit) {
      if (!out.empty()) out.push_back(' ');
      out += token;
    }
    token.clear();
    token_has_nondigit = false;
  };
  for (unsigned char c : raw) {
    if (is_alnum_ascii(c)) {
      token.push_back(lower_ascii(c));
      if (c < '0' || c > '9') token_has_nondigit = true;
    } else {
      flush_token();
    }
  }
  flush_token();
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    tokens.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

Corpus parse_jsonl(std::istream& in, bool require_labels,
                   const std::string& origin) {
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed JSON at line " + std::to_string(line_no) +
                  " of " + origin + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error("malformed JSON at line " + std::to_string(line_no) +
                  " of " + origin + ": not an object");
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw Error("missing or non-string \"id\" at line " +
                  std::to_string(line_no) + " of " + origin);
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw Error("missing or non-string \"text\" at line " +
                  std::to_string(line_no) + " of " + origin);
    }
    Document doc;
    doc.id = obj["id"].get<std::string>();
    doc.text = normalize_text(obj["text"].get<std::string>());
    if (obj.contains("label")) {
      if (!obj["label"].is_string()) {
        throw Error("non-string \"label\" at line " + std::to_string(line_no) +
                    " of " + origin);
      }
      const std::string code = obj["label"].get<std::string>();
      try {
        doc.label = parse_label(code);
      } catch (const Error&) {
        throw Error("unknown label \"" + code + "\" at line " +
                    std::to_string(line_no) + " of " + origin);
      }
    } else if (require_labels) {
      throw Error("missing label at line " + std::to_string(line_no) + " of " +
                  origin);
    }
    if (!seen_ids.insert(doc.id).second) {
      throw Error("duplicate id \"" + doc.id + "\" at line " +
                  std::to_string(line_no) + " of " + origin);
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_jsonl(const std::string& path, bool require_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot open input file: " + path);
  }
  return parse_jsonl(in, require_labels, path);
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    nlohmann::json obj;
    obj["id"] = doc.id;
    obj["text"] = doc.text;
    if (doc.label) obj["label"] = label_string(*doc.label);
    out << obj.dump() << '\n';
  }
}

void append_corpus(Corpus& dst, Corpus src) {
  std::unordered_set<std::string> ids;
  ids.reserve(dst.size() + src.size());
  for (const auto& doc : dst.documents) ids.insert(doc.id);
  for (auto& doc : src.documents) {
    if (!ids.insert(doc.id).second) {
      throw Error("duplicate id \"" + doc.id + "\" across input corpora");
    }
    dst.documents.push_back(std::move(doc));
  }
}

}  // namespace docclass
