#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace macc {

/// C(n, k). Throws ResourceLimit if the value does not fit in 64 bits.
std::uint64_t binomial(int n, int k);

/// Advances a sorted 1-indexed k-subset of [n] to its lexicographic
/// successor. Returns false (and leaves `c` unspecified) after the last one.
bool next_combination(std::span<int> c, int n);

/// Position of a sorted 1-indexed k-subset of [n] in lexicographic order.
std::uint64_t lex_rank(std::span<const int> c, int n);

/// Inverse of lex_rank.
std::vector<int> lex_unrank(std::uint64_t rank, int n, int k);

/// All k-subsets of [n] in lexicographic order, stored flat.
class SubsetTable {
 public:
  SubsetTable() = default;
  SubsetTable(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return count_; }
  std::span<const int> operator[](std::size_t index) const {
    return {flat_.data() + index * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
  }

 private:
  int n_ = 0;
  int k_ = 0;
  std::size_t count_ = 0;
  std::vector<int> flat_;
};

}  // namespace macc
