#include "kst/combinatorics.hpp"

#include <numeric>

namespace kst {

int MultiIndex::order() const {
  int s = 0;
  for (std::size_t i = 0; i < j.size(); ++i) s += static_cast<int>(i + 1) * j[i];
  return s;
}

int MultiIndex::blocks() const { return std::accumulate(j.begin(), j.end(), 0); }

namespace {

// Fills j[pos..] so that the remaining block count and order are met exactly.
// Parts of size > pos+1 each contribute at least pos+2 to the order, which
// bounds the count that can be placed here.
void descend(std::vector<int>& j, std::size_t pos, int blocks_left, int order_left,
             std::vector<MultiIndex>& out) {
  const int size = static_cast<int>(pos) + 1;
  if (pos + 1 == j.size()) {
    if (blocks_left * size == order_left) {
      j[pos] = blocks_left;
      out.push_back(MultiIndex{j});
      j[pos] = 0;
    }
    return;
  }
  for (int c = 0; c <= blocks_left && c * size <= order_left; ++c) {
    const int b = blocks_left - c;
    const int o = order_left - c * size;
    // b remaining blocks each of size in [size+1, j.size()].
    if (o < b * (size + 1) || o > b * static_cast<int>(j.size())) continue;
    j[pos] = c;
    descend(j, pos + 1, b, o, out);
  }
  j[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_partitions(int m, int k) {
  if (m < 0 || k < 0) throw std::invalid_argument("enumerate_partitions: m and k must be non-negative");
  if (k > m)
    throw std::invalid_argument("enumerate_partitions: k = " + std::to_string(k) + " exceeds m = " + std::to_string(m));
  if (m > kMaxBellOrder)
    throw std::invalid_argument("enumerate_partitions: m = " + std::to_string(m) + " exceeds " +
                                std::to_string(kMaxBellOrder));
  std::vector<MultiIndex> out;
  std::vector<int> j(static_cast<std::size_t>(m - k + 1), 0);
  descend(j, 0, k, m, out);
  return out;
}

std::uint64_t partition_count(const MultiIndex& index) {
  const int m = index.order();
  if (m > kMaxBellOrder) throw std::invalid_argument("partition_count: order exceeds 20");
  // Multinomial m! / prod (i!)^{j_i} built block by block, then divided by
  // prod j_i!. Every intermediate is an integer that divides m!.
  unsigned __int128 value = 1;
  int placed = 0;
  for (std::size_t i = 0; i < index.j.size(); ++i) {
    const int size = static_cast<int>(i) + 1;
    for (int c = 0; c < index.j[i]; ++c) {
      // choose(placed + size, size)
      unsigned __int128 binom = 1;
      for (int t = 1; t <= size; ++t) binom = binom * static_cast<unsigned>(placed + t) / static_cast<unsigned>(t);
      value *= binom;
      placed += size;
    }
    for (int c = 2; c <= index.j[i]; ++c) value /= static_cast<unsigned>(c);
  }
  return static_cast<std::uint64_t>(value);
}

}  // namespace kst
