#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "iec/corpus.hpp"
#include "iec/errors.hpp"
#include "iec/huffman.hpp"
#include "iec/rng.hpp"

namespace iec {

struct TrainConfig {
  std::uint32_t dim = 100;
  std::uint32_t window = 5;
  std::uint32_t epochs = 20;
  double alpha_start = 0.025;
  double alpha_end = 0.0001;
  std::uint32_t min_count = 5;
  std::uint64_t seed = 1;
  std::uint32_t workers = 1;

  void validate() const {
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (window < 1) throw ConfigError("window must be >= 1");
    if (!(alpha_end > 0.0 && alpha_end <= alpha_start))
      throw ConfigError("need 0 < alpha_end <= alpha_start");
    if (workers < 1) throw ConfigError("workers must be >= 1");
  }
};

// Input vectors (p x K) and inner-node output vectors ((p-1) x K) over one
// vocabulary and its Huffman coding.  Real is the storage scalar: float for
// training speed, double for the numeric test builds.
template <typename Real>
class EmbeddingModel {
 public:
  EmbeddingModel(std::shared_ptr<const Vocabulary> vocab,
                 std::shared_ptr<const HuffmanCoding> coding, std::uint32_t dim,
                 std::vector<Real> input, std::vector<Real> node)
      : vocab_(std::move(vocab)),
        coding_(std::move(coding)),
        dim_(dim),
        input_(std::move(input)),
        node_(std::move(node)) {
    if (vocab_->size() != coding_->word_count())
      throw ConfigError("model: vocabulary and huffman coding disagree on p");
    if (input_.size() != vocab_->size() * dim_)
      throw ConfigError("model: input matrix has wrong shape");
    if (node_.size() != (vocab_->size() - 1) * dim_)
      throw ConfigError("model: node matrix has wrong shape");
  }

  const Vocabulary& vocab() const { return *vocab_; }
  const HuffmanCoding& coding() const { return *coding_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  std::shared_ptr<const HuffmanCoding> coding_ptr() const { return coding_; }
  std::uint32_t dim() const { return dim_; }
  std::size_t word_count() const { return vocab_->size(); }

  std::span<Real> input_vector(WordId w) {
    check_word(w);
    return std::span(input_).subspan(std::size_t(w) * dim_, dim_);
  }
  std::span<const Real> input_vector(WordId w) const {
    check_word(w);
    return std::span(input_).subspan(std::size_t(w) * dim_, dim_);
  }
  std::span<Real> node_vector(std::uint32_t n) {
    check_node(n);
    return std::span(node_).subspan(std::size_t(n) * dim_, dim_);
  }
  std::span<const Real> node_vector(std::uint32_t n) const {
    check_node(n);
    return std::span(node_).subspan(std::size_t(n) * dim_, dim_);
  }

  const std::vector<Real>& input_data() const { return input_; }
  const std::vector<Real>& node_data() const { return node_; }

  bool all_finite() const {
    for (Real x : input_)
      if (!std::isfinite(x)) return false;
    for (Real x : node_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const EmbeddingModel& other) const {
    return dim_ == other.dim_ && input_ == other.input_ && node_ == other.node_ &&
           *vocab_ == *other.vocab_ && *coding_ == *other.coding_;
  }

 private:
  void check_word(WordId w) const {
    if (w >= vocab_->size()) throw std::out_of_range("model: unknown word id");
  }
  void check_node(std::uint32_t n) const {
    if (n >= vocab_->size() - 1) throw std::out_of_range("model: unknown inner node id");
  }

  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const HuffmanCoding> coding_;
  std::uint32_t dim_;
  std::vector<Real> input_;
  std::vector<Real> node_;
};

namespace detail {

inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <typename Real>
Real sigmoid(Real x) {
  if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
  Real e = std::exp(x);
  return e / (Real(1) + e);
}

template <typename Real>
double dot_as_double(std::span<const Real> a, std::span<const Real> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

template <typename Real>
Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Calls fn(j, k) for every ordered pair with 1 <= |k-j| <= window.  Shared by
// likelihood evaluation and training so both walk the identical pair set.
template <typename Fn>
void for_each_window_pair(std::size_t t_count, std::uint32_t window, Fn&& fn) {
  for (std::size_t j = 0; j < t_count; ++j) {
    std::size_t lo = j > window ? j - window : 0;
    std::size_t hi = t_count == 0 ? 0 : std::min(t_count - 1, j + window);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (k == j) continue;
      fn(j, k);
    }
  }
}

}  // namespace detail

// Input vectors i.i.d. uniform on [-0.5/K, +0.5/K], node vectors all zero, so
// every initial word probability is exactly 2^-(L(w)-1).
template <typename Real>
EmbeddingModel<Real> init_model(std::shared_ptr<const Vocabulary> vocab,
                                std::shared_ptr<const HuffmanCoding> coding,
                                const TrainConfig& config) {
  config.validate();
  const std::size_t p = vocab->size();
  const std::uint32_t dim = config.dim;
  Rng rng(config.seed);
  std::vector<Real> input(p * dim);
  for (auto& x : input)
    x = static_cast<Real>((rng.next_double() - 0.5) / static_cast<double>(dim));
  std::vector<Real> node((p - 1) * dim, Real(0));
  return EmbeddingModel<Real>(std::move(vocab), std::move(coding), dim, std::move(input),
                              std::move(node));
}

// log p(target | conditioning) under the hierarchical softmax: one logistic
// decision per inner node on target's Huffman path.  Always <= 0.
template <typename Real>
double word_log_prob(const EmbeddingModel<Real>& model, WordId target, WordId conditioning) {
  auto v = model.input_vector(conditioning);
  auto path = model.coding().path_of(target);
  double total = 0.0;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    double x = detail::dot_as_double(model.node_vector(path.nodes[i]), v);
    total += detail::log_sigmoid(static_cast<double>(path.signs[i]) * x);
  }
  return total;
}

// Pairwise composite log likelihood of one sentence: sum of
// log p(w_k | w_j) over every ordered pair with 1 <= |k-j| <= window.
template <typename Real>
double sentence_log_lik(const EmbeddingModel<Real>& model, const Sentence& sentence,
                        std::uint32_t window) {
  double total = 0.0;
  detail::for_each_window_pair(sentence.size(), window, [&](std::size_t j, std::size_t k) {
    total += word_log_prob(model, sentence[k], sentence[j]);
  });
  return total;
}

template <typename Real>
double corpus_log_lik(const EmbeddingModel<Real>& model,
                      std::span<const Sentence* const> sentences, std::uint32_t window) {
  double total = 0.0;
  for (const Sentence* s : sentences) total += sentence_log_lik(model, *s, window);
  return total;
}

template <typename Real>
double corpus_log_lik(const EmbeddingModel<Real>& model, const LabeledCorpus& corpus,
                      std::uint32_t window) {
  double total = 0.0;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) total += sentence_log_lik(model, s, window);
  return total;
}

// One SGD ascent step on log p(context | center).  scratch must hold dim()
// scalars; the v update uses the pre-update node vectors.
template <typename Real>
void sgd_step(EmbeddingModel<Real>& model, WordId center, WordId context, Real alpha,
              std::span<Real> scratch) {
  auto v = model.input_vector(center);
  auto path = model.coding().path_of(context);
  std::fill(scratch.begin(), scratch.end(), Real(0));
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    auto u = model.node_vector(path.nodes[i]);
    const Real s = static_cast<Real>(path.signs[i]);
    const Real x = detail::dot<Real>(u, v);
    const Real g = s * (Real(1) - detail::sigmoid(s * x)) * alpha;
    for (std::size_t k = 0; k < u.size(); ++k) {
      scratch[k] += g * u[k];
      u[k] += g * v[k];
    }
  }
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += scratch[k];
}

template <typename Real>
void sgd_step(EmbeddingModel<Real>& model, WordId center, WordId context, Real alpha) {
  std::vector<Real> scratch(model.dim());
  sgd_step(model, center, context, alpha, std::span<Real>(scratch));
}

template <typename Real>
struct TrainResult {
  EmbeddingModel<Real> model;
  // [0] is the likelihood at initialization, [e] after epoch e.
  std::vector<double> epoch_log_lik;
};

namespace detail {

inline std::uint64_t pair_count(std::size_t t_count, std::uint32_t window) {
  std::uint64_t n = 0;
  for (std::uint64_t d = 1; d <= window && d < t_count; ++d)
    n += 2 * (t_count - d);
  return n;
}

template <typename Real>
void run_training(EmbeddingModel<Real>& model, std::vector<const Sentence*>& sentences,
                  const TrainConfig& config, std::vector<double>& epoch_log_lik) {
  const std::uint32_t window = config.window;
  std::uint64_t per_pass = 0;
  for (const Sentence* s : sentences) per_pass += pair_count(s->size(), window);
  const std::uint64_t total_updates = per_pass * config.epochs;
  if (total_updates == 0) {
    // single-word sentences only: nothing to ascend, likelihood is constant
    for (std::uint32_t e = 0; e < config.epochs; ++e)
      epoch_log_lik.push_back(epoch_log_lik.front());
    return;
  }

  std::atomic<std::uint64_t> done{0};
  const double alpha_start = config.alpha_start;
  const double alpha_span = config.alpha_end - config.alpha_start;

  auto process = [&](std::size_t begin, std::size_t end) {
    std::vector<Real> scratch(model.dim());
    for (std::size_t i = begin; i < end; ++i) {
      const Sentence& sent = *sentences[i];
      for_each_window_pair(sent.size(), window, [&](std::size_t j, std::size_t k) {
        std::uint64_t t = done.fetch_add(1, std::memory_order_relaxed);
        Real alpha = static_cast<Real>(
            alpha_start + alpha_span * (static_cast<double>(t) / total_updates));
        sgd_step(model, sent[j], sent[k], alpha, std::span<Real>(scratch));
      });
    }
  };

  Rng shuffle_rng(config.seed);
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(sentences);
    if (config.workers <= 1) {
      process(0, sentences.size());
    } else {
      // hogwild: unsynchronized dense updates, final model depends on the
      // thread interleaving
      std::vector<std::thread> pool;
      const std::size_t n = sentences.size();
      const std::size_t w = std::min<std::size_t>(config.workers, n);
      for (std::size_t i = 0; i < w; ++i)
        pool.emplace_back(process, n * i / w, n * (i + 1) / w);
      for (auto& th : pool) th.join();
    }
    epoch_log_lik.push_back(
        corpus_log_lik(model, std::span<const Sentence* const>(sentences), window));
  }
}

inline std::vector<const Sentence*> collect_sentences(const LabeledCorpus& corpus) {
  std::vector<const Sentence*> out;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) out.push_back(&s);
  return out;
}

}  // namespace detail

// Fresh model trained on the sub-corpus: `epochs` shuffled passes, one SGD
// step per in-window ordered pair, learning rate decaying linearly from
// alpha_start to alpha_end over all planned updates.
template <typename Real>
TrainResult<Real> train(const LabeledCorpus& sub_corpus, const TrainConfig& config) {
  config.validate();
  auto sentences = detail::collect_sentences(sub_corpus);
  if (sentences.empty()) throw DataError("train: corpus has no sentences");
  EmbeddingModel<Real> model =
      init_model<Real>(sub_corpus.vocabulary,
                       std::make_shared<HuffmanCoding>(build_huffman(sub_corpus.vocabulary->counts())),
                       config);
  std::vector<double> epoch_log_lik = {
      corpus_log_lik(model, std::span<const Sentence* const>(sentences), config.window)};
  detail::run_training(model, sentences, config, epoch_log_lik);
  return {std::move(model), std::move(epoch_log_lik)};
}

template <typename Real>
TrainResult<Real> train(const LabeledCorpus& sub_corpus,
                        std::shared_ptr<const HuffmanCoding> coding, const TrainConfig& config) {
  config.validate();
  auto sentences = detail::collect_sentences(sub_corpus);
  if (sentences.empty()) throw DataError("train: corpus has no sentences");
  EmbeddingModel<Real> model = init_model<Real>(sub_corpus.vocabulary, std::move(coding), config);
  std::vector<double> epoch_log_lik = {
      corpus_log_lik(model, std::span<const Sentence* const>(sentences), config.window)};
  detail::run_training(model, sentences, config, epoch_log_lik);
  return {std::move(model), std::move(epoch_log_lik)};
}

// Same pass structure as train() but starting from a copy of `base` (shared
// baseline warm start).  The base's vocabulary and coding are kept as-is.
template <typename Real>
TrainResult<Real> continue_training(const EmbeddingModel<Real>& base,
                                    const LabeledCorpus& sub_corpus, const TrainConfig& config) {
  config.validate();
  if (!sub_corpus.vocabulary || !(*sub_corpus.vocabulary == base.vocab()))
    throw ConfigError("continue_training: corpus vocabulary does not match the base model");
  if (config.dim != base.dim())
    throw ConfigError("continue_training: config dim does not match the base model");
  auto sentences = detail::collect_sentences(sub_corpus);
  if (sentences.empty()) throw DataError("continue_training: corpus has no sentences");
  EmbeddingModel<Real> model = base;
  std::vector<double> epoch_log_lik = {
      corpus_log_lik(model, std::span<const Sentence* const>(sentences), config.window)};
  detail::run_training(model, sentences, config, epoch_log_lik);
  return {std::move(model), std::move(epoch_log_lik)};
}

}  // namespace iec
