#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <unordered_map>

#include "iec/corpus.hpp"
#include "iec/rng.hpp"
#include "test_util.hpp"

using namespace iec;

// Reference tokenizer: same rule, different machinery (regex split / strip),
// kept independent of the library implementation.
static std::vector<std::vector<std::string>> ref_tokenize(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::vector<std::vector<std::string>> out;
  std::regex sentence_sep("[.!?;]");
  std::regex punct("[[:punct:]]");
  std::sregex_token_iterator chunk(text.begin(), text.end(), sentence_sep, -1), end;
  for (; chunk != end; ++chunk) {
    std::string cleaned = std::regex_replace(chunk->str(), punct, "");
    std::istringstream ss(cleaned);
    std::vector<std::string> sent;
    std::string tok;
    while (ss >> tok) sent.push_back(tok);
    if (!sent.empty()) out.push_back(std::move(sent));
  }
  return out;
}

static std::string random_text(std::mt19937_64& gen) {
  static const std::string alphabet =
      "abcdefgh XYZ  0123 .!?;,'\"-()/: \t aa bb cc great food bad service ";
  std::string text;
  std::size_t len = 20 + gen() % 400;
  for (std::size_t i = 0; i < len; ++i) text += alphabet[gen() % alphabet.size()];
  return text;
}

static std::vector<std::string> flatten(const std::vector<std::vector<std::string>>& sents) {
  std::vector<std::string> all;
  for (const auto& s : sents) all.insert(all.end(), s.begin(), s.end());
  return all;
}

TEST_CASE("tokenize_document basic splitting") {
  auto sents = tokenize_document("Great food. Bad service!");
  REQUIRE(sents == std::vector<std::vector<std::string>>{{"great", "food"}, {"bad", "service"}});
}

TEST_CASE("tokenize_document empty input") {
  REQUIRE(tokenize_document("").empty());
  REQUIRE(tokenize_document(" .. !inner! ?; ").size() == 1);
  REQUIRE(tokenize_document("...   ").empty());
}

TEST_CASE("tokenize_document strips punctuation and lowercases") {
  auto sents = tokenize_document("Don't STOP; it's 5-star (really)?!");
  REQUIRE(sents == std::vector<std::vector<std::string>>{
                       {"dont", "stop"}, {"its", "5star", "really"}});
}

TEST_CASE("tokenize_document passes multibyte UTF-8 through") {
  auto sents = tokenize_document("caf\xc3\xa9 time.");
  REQUIRE(sents == std::vector<std::vector<std::string>>{{"caf\xc3\xa9", "time"}});
}

TEST_CASE("tokenize_document matches reference tokenizer on random sample") {
  std::mt19937_64 gen(20250810);
  for (int doc = 0; doc < 100; ++doc) {
    std::string text = random_text(gen);
    auto got = tokenize_document(text);
    auto want = ref_tokenize(text);
    INFO("text: " << text);
    REQUIRE(got == want);
    REQUIRE(flatten(got).size() == flatten(want).size());
  }
}

TEST_CASE("tokenize is idempotent on its own output") {
  std::mt19937_64 gen(42);
  for (int doc = 0; doc < 50; ++doc) {
    auto first = tokenize_document(random_text(gen));
    std::string joined;
    for (const auto& tok : flatten(first)) {
      if (!joined.empty()) joined += ' ';
      joined += tok;
    }
    auto second = tokenize_document(joined);
    REQUIRE(flatten(second) == flatten(first));
  }
}

static std::vector<std::vector<std::string>> sentences_with_counts(
    const std::map<std::string, int>& counts) {
  std::vector<std::vector<std::string>> sents;
  for (const auto& [w, n] : counts)
    for (int i = 0; i < n; ++i) sents.push_back({w});
  return sents;
}

TEST_CASE("build_vocabulary applies min_count threshold") {
  auto vocab = build_vocabulary(sentences_with_counts({{"a", 10}, {"b", 3}, {"c", 1}}), 2);
  REQUIRE(vocab.size() == 2);
  REQUIRE(vocab.id("a") == 0);
  REQUIRE(vocab.id("b") == 1);
  REQUIRE(vocab.id("c") == -1);
  REQUIRE(vocab.count(0) == 10);
}

TEST_CASE("build_vocabulary with min_count 1 keeps all distinct tokens") {
  auto sents = tokenize_document("one two three two. three three!");
  auto vocab = build_vocabulary(sents, 1);
  REQUIRE(vocab.size() == 3);
}

TEST_CASE("build_vocabulary rejects vocabularies below two words") {
  REQUIRE_THROWS_AS(build_vocabulary(sentences_with_counts({{"a", 10}, {"b", 1}}), 5),
                    ConfigError);
}

TEST_CASE("build_vocabulary matches brute-force count-and-filter on random corpus") {
  std::mt19937_64 gen(7);
  std::vector<std::vector<std::string>> sents;
  std::unordered_map<std::string, std::uint64_t> oracle;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> s;
    std::size_t len = 1 + gen() % 8;
    for (std::size_t j = 0; j < len; ++j) {
      std::string w = "w" + std::to_string(gen() % 60);
      ++oracle[w];
      s.push_back(w);
    }
    sents.push_back(s);
  }
  const std::uint32_t min_count = 3;
  auto vocab = build_vocabulary(sents, min_count);

  std::size_t expected = 0;
  for (const auto& [w, n] : oracle)
    if (n >= min_count) ++expected;
  REQUIRE(vocab.size() == expected);
  for (const auto& [w, n] : oracle) {
    if (n >= min_count) {
      auto id = vocab.id(w);
      REQUIRE(id >= 0);
      REQUIRE(vocab.count(static_cast<WordId>(id)) == n);
    } else {
      REQUIRE(vocab.id(w) == -1);
    }
  }
  // Total order: non-increasing counts, lexicographic tie-break.
  for (WordId i = 1; i < vocab.size(); ++i) {
    REQUIRE(vocab.count(i - 1) >= vocab.count(i));
    if (vocab.count(i - 1) == vocab.count(i)) REQUIRE(vocab.word(i - 1) < vocab.word(i));
  }
}

static TextCorpus toy_text_corpus() {
  TextCorpus raw;
  raw.class_count = 2;
  raw.documents.push_back({1, tokenize_document("good food good. nice place!")});
  raw.documents.push_back({2, tokenize_document("bad food bad; awful place.")});
  raw.documents.push_back({1, tokenize_document("good nice good bad place food.")});
  return raw;
}

TEST_CASE("encode_corpus round-trips in-vocabulary tokens") {
  TextCorpus raw = toy_text_corpus();
  auto vocab = std::make_shared<Vocabulary>(build_vocabulary(raw, 1));
  auto corpus = encode_corpus(raw, vocab);
  REQUIRE(corpus.documents.size() == raw.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& enc = corpus.documents[d];
    const auto& txt = raw.documents[d];
    REQUIRE(enc.sentences.size() == txt.sentences.size());
    for (std::size_t s = 0; s < enc.sentences.size(); ++s) {
      REQUIRE(enc.sentences[s].size() == txt.sentences[s].size());
      for (std::size_t t = 0; t < enc.sentences[s].size(); ++t)
        REQUIRE(vocab->word(enc.sentences[s][t]) == txt.sentences[s][t]);
    }
  }
}

TEST_CASE("encode_corpus drops OOV-only documents with a warning") {
  TextCorpus raw = toy_text_corpus();
  raw.documents.push_back({2, tokenize_document("zzz qqq xxx.")});
  auto vocab = std::make_shared<Vocabulary>(build_vocabulary(toy_text_corpus(), 1));
  auto corpus = encode_corpus(raw, vocab);
  REQUIRE(corpus.documents.size() == 3);
}

TEST_CASE("encode_corpus fails when everything is OOV") {
  TextCorpus raw;
  raw.class_count = 1;
  raw.documents.push_back({1, tokenize_document("zzz qqq.")});
  auto vocab = std::make_shared<Vocabulary>(build_vocabulary(toy_text_corpus(), 1));
  REQUIRE_THROWS_AS(encode_corpus(raw, vocab), DataError);
}

TEST_CASE("encode_corpus surviving token count matches oracle recount") {
  std::mt19937_64 gen(99);
  TextCorpus raw;
  raw.class_count = 1;
  std::vector<std::vector<std::string>> all_sents;
  for (int d = 0; d < 50; ++d) {
    TextDocument doc;
    doc.label = 1;
    std::size_t ns = 1 + gen() % 4;
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<std::string> sent;
      std::size_t len = 1 + gen() % 7;
      for (std::size_t t = 0; t < len; ++t) sent.push_back("w" + std::to_string(gen() % 40));
      all_sents.push_back(sent);
      doc.sentences.push_back(std::move(sent));
    }
    raw.documents.push_back(std::move(doc));
  }
  auto vocab = std::make_shared<Vocabulary>(build_vocabulary(all_sents, 3));
  auto corpus = encode_corpus(raw, vocab);

  std::size_t got = 0;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) got += s.size();
  std::size_t want = 0;
  for (const auto& s : all_sents)
    for (const auto& w : s)
      if (vocab->id(w) >= 0) ++want;
  REQUIRE(got == want);
}

static LabeledCorpus labeled_with(const std::vector<int>& labels, int class_count) {
  TextCorpus raw;
  raw.class_count = class_count;
  for (std::size_t i = 0; i < labels.size(); ++i)
    raw.documents.push_back(
        {labels[i], {{"doc" + std::to_string(i), "filler"}, {"more", "filler"}}});
  auto vocab = std::make_shared<Vocabulary>(build_vocabulary(raw, 1));
  return encode_corpus(raw, vocab);
}

TEST_CASE("partition_by_class sizes") {
  auto corpus = labeled_with({1, 1, 2, 2, 2, 1, 1, 2, 1, 1}, 2);
  auto parts = partition_by_class(corpus);
  REQUIRE(parts.size() == 2);
  REQUIRE(parts[0].documents.size() == 6);
  REQUIRE(parts[1].documents.size() == 4);
}

TEST_CASE("partition_by_class on a single-class corpus returns the input") {
  auto corpus = labeled_with({1, 1, 1}, 1);
  auto parts = partition_by_class(corpus);
  REQUIRE(parts.size() == 1);
  REQUIRE(parts[0].documents.size() == corpus.documents.size());
}

TEST_CASE("partition_by_class rejects unlabeled documents") {
  auto corpus = labeled_with({1, 2}, 2);
  corpus.documents[1].label = 0;
  REQUIRE_THROWS_AS(partition_by_class(corpus), DataError);
}

TEST_CASE("partition_by_class matches label histogram and covers the corpus") {
  std::mt19937_64 gen(5);
  std::vector<int> labels;
  std::vector<std::size_t> hist(5, 0);
  for (int i = 0; i < 200; ++i) {
    int c = 1 + static_cast<int>(gen() % 5);
    labels.push_back(c);
    ++hist[c - 1];
  }
  // ensure all classes occur
  for (int c = 1; c <= 5; ++c) {
    labels.push_back(c);
    ++hist[c - 1];
  }
  auto corpus = labeled_with(labels, 5);
  auto parts = partition_by_class(corpus);
  std::size_t total = 0;
  for (int c = 0; c < 5; ++c) {
    REQUIRE(parts[c].documents.size() == hist[c]);
    total += parts[c].documents.size();
    for (const auto& d : parts[c].documents) REQUIRE(d.label == c + 1);
  }
  REQUIRE(total == corpus.documents.size());
  // order preserved within class: first token strings are distinct per doc
  for (int c = 0; c < 5; ++c) {
    std::vector<std::string> order;
    for (const auto& d : parts[c].documents)
      order.push_back(corpus.vocabulary->word(d.sentences[0][0]));
    REQUIRE(std::is_sorted(order.begin(), order.end(), [](const auto& a, const auto& b) {
      auto num = [](const std::string& s) { return std::stoi(s.substr(3)); };
      return num(a) < num(b);
    }));
  }
}

TEST_CASE("load_labeled_tsv parses a two-line file") {
  testutil::TempDir tmp("tsv");
  auto path = tmp.path("two.tsv");
  testutil::write_file(path, "1\tgood food\n2\tbad food\n");
  auto corpus = load_labeled_tsv(path.string());
  REQUIRE(corpus.class_count == 2);
  REQUIRE(corpus.documents.size() == 2);
  REQUIRE(corpus.documents[0].label == 1);
  REQUIRE(corpus.documents[0].sentences == std::vector<std::vector<std::string>>{{"good", "food"}});
}

TEST_CASE("load_labeled_tsv reports the failing line") {
  testutil::TempDir tmp("tsv_bad");
  auto path = tmp.path("bad.tsv");
  testutil::write_file(path, "1 good food\n");
  REQUIRE_THROWS_WITH(load_labeled_tsv(path.string()),
                      Catch::Matchers::ContainsSubstring(":1:"));

  testutil::write_file(path, "1\tok line\nx\tbad label\n");
  REQUIRE_THROWS_WITH(load_labeled_tsv(path.string()),
                      Catch::Matchers::ContainsSubstring(":2:"));
}

TEST_CASE("load_labeled_tsv rejects non-contiguous labels") {
  testutil::TempDir tmp("tsv_gap");
  auto path = tmp.path("gap.tsv");
  testutil::write_file(path, "1\tgood food\n3\tbad food\n");
  REQUIRE_THROWS_AS(load_labeled_tsv(path.string()), DataError);
  // ... but a validation file scored against 3 fitted classes is fine.
  auto corpus = load_labeled_tsv(path.string(), 3);
  REQUIRE(corpus.class_count == 3);
  REQUIRE(corpus.documents.size() == 2);
  REQUIRE_THROWS_AS(load_labeled_tsv(path.string(), 2), DataError);
}

TEST_CASE("load_labeled_tsv matches generator bookkeeping on a 10k-line file") {
  testutil::TempDir tmp("tsv_big");
  auto path = tmp.path("big.tsv");
  std::mt19937_64 gen(123);
  std::ostringstream file;
  std::vector<std::size_t> per_class(4, 0);
  std::size_t total = 0;
  for (int c = 1; c <= 4; ++c) {  // guarantee contiguity
    file << c << "\tseed doc for class.\n";
    ++per_class[c - 1];
    ++total;
  }
  for (int i = 0; i < 10000; ++i) {
    int c = 1 + static_cast<int>(gen() % 4);
    file << c << "\tword" << gen() % 50 << " word" << gen() % 50 << ".\n";
    ++per_class[c - 1];
    ++total;
  }
  testutil::write_file(path, file.str());
  auto corpus = load_labeled_tsv(path.string());
  REQUIRE(corpus.class_count == 4);
  REQUIRE(corpus.documents.size() == total);
  std::vector<std::size_t> got(4, 0);
  for (const auto& d : corpus.documents) ++got[d.label - 1];
  REQUIRE(got == per_class);
}
