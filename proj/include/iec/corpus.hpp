#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "iec/errors.hpp"

namespace iec {

using WordId = std::uint32_t;

// Encoded sentence: word ids into the governing Vocabulary.
using Sentence = std::vector<WordId>;

// Encoded document.  label is 1-based; 0 means unlabeled (scoring inputs).
struct Document {
  int label = 0;
  std::vector<Sentence> sentences;
};

// Tokenized but not yet encoded document: sentences of token strings.
struct TextDocument {
  int label = 0;
  std::vector<std::vector<std::string>> sentences;
};

struct TextCorpus {
  std::vector<TextDocument> documents;
  int class_count = 0;
};

namespace detail {

inline bool is_sentence_terminal(char c) {
  return c == '.' || c == '!' || c == '?' || c == ';';
}

inline bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

inline bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

}  // namespace detail

// Lowercases, splits sentences on {. ! ? ;}, splits tokens on whitespace and
// strips every other ASCII punctuation character.  Bytes >= 0x80 (multibyte
// UTF-8) pass through untouched.  Empty tokens and sentences are dropped.
inline std::vector<std::vector<std::string>> tokenize_document(const std::string& text) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> sentence;
  std::string token;

  auto flush_token = [&] {
    if (!token.empty()) {
      sentence.push_back(std::move(token));
      token.clear();
    }
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!sentence.empty()) {
      sentences.push_back(std::move(sentence));
      sentence.clear();
    }
  };

  for (unsigned char c : text) {
    if (detail::is_sentence_terminal(static_cast<char>(c))) {
      flush_sentence();
    } else if (detail::is_ascii_space(c)) {
      flush_token();
    } else if (detail::is_ascii_punct(c)) {
      // stripped
    } else {
      token.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush_sentence();
  return sentences;
}

// Dense word <-> id table.  Ids are assigned in descending count order with
// lexicographic tie-break, so id 0 is the most frequent word.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
             std::uint32_t min_count)
      : words_(std::move(words)), counts_(std::move(counts)), min_count_(min_count) {
    index_.reserve(words_.size());
    for (WordId i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
  }

  std::size_t size() const { return words_.size(); }
  std::uint32_t min_count() const { return min_count_; }

  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // -1 when the word is out of vocabulary.
  std::int64_t id(const std::string& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
  std::uint32_t min_count_;
};

// Encoded labeled corpus over one vocabulary.
struct LabeledCorpus {
  std::vector<Document> documents;
  int class_count = 0;
  std::shared_ptr<const Vocabulary> vocabulary;
};

inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& sentences,
                                   std::uint32_t min_count) {
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& s : sentences)
    for (const auto& w : s) ++freq[w];

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, n] : freq)
    if (n >= min_count) kept.emplace_back(w, n);
  if (kept.size() < 2)
    throw ConfigError("vocabulary: fewer than 2 words survive min_count=" +
                      std::to_string(min_count));

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> words(kept.size());
  std::vector<std::uint64_t> counts(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    words[i] = kept[i].first;
    counts[i] = kept[i].second;
  }
  return Vocabulary(std::move(words), std::move(counts), min_count);
}

inline Vocabulary build_vocabulary(const TextCorpus& corpus, std::uint32_t min_count) {
  std::vector<std::vector<std::string>> all;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) all.push_back(s);
  return build_vocabulary(all, min_count);
}

// Encodes one tokenized sentence; OOV tokens are dropped.  May return an
// empty sentence.
inline Sentence encode_sentence(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  Sentence out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::int64_t id = vocab.id(t);
    if (id >= 0) out.push_back(static_cast<WordId>(id));
  }
  return out;
}

// OOV tokens are dropped; sentences and documents that become empty are
// dropped (documents with a warning on stderr).
inline LabeledCorpus encode_corpus(const TextCorpus& raw,
                                   std::shared_ptr<const Vocabulary> vocab) {
  LabeledCorpus out;
  out.class_count = raw.class_count;
  out.vocabulary = vocab;
  for (std::size_t i = 0; i < raw.documents.size(); ++i) {
    const TextDocument& td = raw.documents[i];
    Document doc;
    doc.label = td.label;
    for (const auto& s : td.sentences) {
      Sentence enc = encode_sentence(s, *vocab);
      if (!enc.empty()) doc.sentences.push_back(std::move(enc));
    }
    if (doc.sentences.empty()) {
      std::cerr << "warning: document " << (i + 1)
                << " has no in-vocabulary sentences, dropped\n";
      continue;
    }
    out.documents.push_back(std::move(doc));
  }
  if (out.documents.empty()) throw DataError("all documents empty after encoding");
  return out;
}

// Splits into per-class sub-corpora (index c-1 holds class c), preserving
// document order within each class.
inline std::vector<LabeledCorpus> partition_by_class(const LabeledCorpus& corpus) {
  if (corpus.class_count < 1) throw DataError("partition: corpus has no classes");
  std::vector<LabeledCorpus> parts(corpus.class_count);
  for (auto& p : parts) {
    p.class_count = corpus.class_count;
    p.vocabulary = corpus.vocabulary;
  }
  for (const auto& doc : corpus.documents) {
    if (doc.label < 1 || doc.label > corpus.class_count)
      throw DataError("partition: unlabeled or out-of-range document label " +
                      std::to_string(doc.label));
    parts[doc.label - 1].documents.push_back(doc);
  }
  return parts;
}

// Loads `<label>\t<text>` lines and tokenizes them.  With expected_class_count
// == 0 (training) the class count is inferred as the max label and labels
// must cover 1..C; otherwise (evaluation against fitted models) labels must
// merely lie in 1..expected_class_count.
inline TextCorpus load_labeled_tsv(const std::string& path, int expected_class_count = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  TextCorpus corpus;
  std::vector<bool> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": missing tab separator");
    int label = 0;
    const char* first = line.data();
    auto [ptr, ec] = std::from_chars(first, first + tab, label);
    if (ec != std::errc() || ptr != first + tab || label < 1)
      throw DataError(path + ":" + std::to_string(line_no) + ": label is not a positive integer");
    if (expected_class_count > 0 && label > expected_class_count)
      throw DataError(path + ":" + std::to_string(line_no) + ": label " + std::to_string(label) +
                      " outside 1.." + std::to_string(expected_class_count));
    if (label > static_cast<int>(seen.size())) seen.resize(label, false);
    seen[label - 1] = true;

    TextDocument doc;
    doc.label = label;
    doc.sentences = tokenize_document(line.substr(tab + 1));
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) throw DataError(path + ": no documents");

  if (expected_class_count > 0) {
    corpus.class_count = expected_class_count;
  } else {
    corpus.class_count = static_cast<int>(seen.size());
    for (int c = 0; c < corpus.class_count; ++c)
      if (!seen[c])
        throw DataError(path + ": labels are not contiguous, class " + std::to_string(c + 1) +
                        " has no documents");
  }
  return corpus;
}

}  // namespace iec
