#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iec/errors.hpp"

namespace iec {

// Binary Huffman coding of a vocabulary: per word, the inner-node ids on the
// root-to-leaf path and the left/right sign (-1/+1) taken at each of them.
// Inner-node ids are dense 0..p-2 with the root at 0.
class HuffmanCoding {
 public:
  struct Path {
    std::span<const std::uint32_t> nodes;
    std::span<const std::int8_t> signs;
  };

  HuffmanCoding(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> nodes,
                std::vector<std::int8_t> signs)
      : offsets_(std::move(offsets)), nodes_(std::move(nodes)), signs_(std::move(signs)) {
    if (offsets_.size() < 3 || offsets_.front() != 0)
      throw ConfigError("huffman: malformed path offsets");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
      if (offsets_[i] <= offsets_[i - 1]) throw ConfigError("huffman: empty path");
    if (offsets_.back() != nodes_.size() || nodes_.size() != signs_.size())
      throw ConfigError("huffman: path arrays disagree");
    std::uint32_t inner = static_cast<std::uint32_t>(word_count()) - 1;
    for (std::uint32_t n : nodes_)
      if (n >= inner) throw ConfigError("huffman: inner-node id out of range");
  }

  std::size_t word_count() const { return offsets_.size() - 1; }
  std::size_t inner_node_count() const { return word_count() - 1; }

  // L(w) - 1: number of inner nodes (= logistic decisions) on w's path.
  std::uint32_t path_length(std::uint32_t word) const {
    check(word);
    return offsets_[word + 1] - offsets_[word];
  }

  Path path_of(std::uint32_t word) const {
    check(word);
    std::size_t begin = offsets_[word], end = offsets_[word + 1];
    return {std::span(nodes_).subspan(begin, end - begin),
            std::span(signs_).subspan(begin, end - begin)};
  }

  // Exact Kraft equality sum_w 2^-(L(w)-1) = 1, checked by binary carry on a
  // depth histogram so arbitrary depths stay in integer arithmetic.
  bool kraft_equality_holds() const {
    std::vector<std::uint64_t> at_depth;
    for (std::uint32_t w = 0; w < word_count(); ++w) {
      std::uint32_t d = path_length(w);
      if (d >= at_depth.size()) at_depth.resize(d + 1, 0);
      ++at_depth[d];
    }
    for (std::size_t d = at_depth.size(); d-- > 1;) {
      if (at_depth[d] % 2 != 0) return false;
      at_depth[d - 1] += at_depth[d] / 2;
    }
    return at_depth[0] == 1;
  }

  bool operator==(const HuffmanCoding& other) const {
    return offsets_ == other.offsets_ && nodes_ == other.nodes_ && signs_ == other.signs_;
  }

  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& nodes() const { return nodes_; }
  const std::vector<std::int8_t>& signs() const { return signs_; }

 private:
  void check(std::uint32_t word) const {
    if (word >= word_count())
      throw std::out_of_range("huffman: unknown word id " + std::to_string(word));
  }

  std::vector<std::uint32_t> offsets_;  // p+1 prefix offsets into nodes_/signs_
  std::vector<std::uint32_t> nodes_;
  std::vector<std::int8_t> signs_;
};

// Merges the two lowest-count nodes until one root remains.  Ties are broken
// by creation order: leaves (in word-id order) precede merged parents, and
// earlier-created parents win.  At each merge the smaller node becomes the
// left child (sign -1).  Inner ids follow reverse creation order so the root
// lands at id 0.
inline HuffmanCoding build_huffman(const std::vector<std::uint64_t>& counts) {
  const std::size_t p = counts.size();
  if (p < 2) throw ConfigError("huffman: vocabulary must have at least 2 words");
  for (std::uint64_t c : counts)
    if (c == 0) throw ConfigError("huffman: zero occurrence count");

  const std::size_t total_nodes = 2 * p - 1;
  std::vector<std::uint64_t> count(total_nodes);
  std::vector<std::uint32_t> parent(total_nodes, 0);
  std::vector<std::int8_t> sign(total_nodes, 0);

  using Entry = std::pair<std::uint64_t, std::uint32_t>;  // (count, creation idx)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::uint32_t w = 0; w < p; ++w) {
    count[w] = counts[w];
    heap.emplace(counts[w], w);
  }

  for (std::uint32_t m = static_cast<std::uint32_t>(p); m < total_nodes; ++m) {
    auto [ca, a] = heap.top();
    heap.pop();
    auto [cb, b] = heap.top();
    heap.pop();
    count[m] = ca + cb;
    parent[a] = m;
    sign[a] = -1;
    parent[b] = m;
    sign[b] = +1;
    heap.emplace(count[m], m);
  }

  // creation index m (p..2p-2) -> inner id, reversed so the root is 0
  auto inner_id = [&](std::uint32_t m) {
    return static_cast<std::uint32_t>(total_nodes - 1 - m);
  };

  std::vector<std::uint32_t> offsets(p + 1, 0);
  std::vector<std::uint32_t> nodes;
  std::vector<std::int8_t> signs;
  const std::uint32_t root = static_cast<std::uint32_t>(total_nodes - 1);
  std::vector<std::uint32_t> rev_nodes;
  std::vector<std::int8_t> rev_signs;
  for (std::uint32_t w = 0; w < p; ++w) {
    rev_nodes.clear();
    rev_signs.clear();
    for (std::uint32_t x = w; x != root; x = parent[x]) {
      rev_nodes.push_back(inner_id(parent[x]));
      rev_signs.push_back(sign[x]);
    }
    nodes.insert(nodes.end(), rev_nodes.rbegin(), rev_nodes.rend());
    signs.insert(signs.end(), rev_signs.rbegin(), rev_signs.rend());
    offsets[w + 1] = static_cast<std::uint32_t>(nodes.size());
  }
  return HuffmanCoding(std::move(offsets), std::move(nodes), std::move(signs));
}

}  // namespace iec
