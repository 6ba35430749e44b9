#include "macc/combinatorics.hpp"

#include <numeric>
#include <string>

#include "macc/errors.hpp"

namespace macc {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 value = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (value > UINT64_MAX)
      throw ResourceLimit("C(" + std::to_string(n) + "," + std::to_string(k) + ") overflows 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

bool next_combination(std::span<int> c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i + 1) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

std::uint64_t lex_rank(std::span<const int> c, int n) {
  const int k = static_cast<int>(c.size());
  std::uint64_t rank = 0;
  int prev = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = prev + 1; j < c[i]; ++j) rank += binomial(n - j, k - i - 1);
    prev = c[i];
  }
  return rank;
}

std::vector<int> lex_unrank(std::uint64_t rank, int n, int k) {
  std::vector<int> c(static_cast<std::size_t>(k));
  int next = 1;
  for (int i = 0; i < k; ++i) {
    for (;; ++next) {
      std::uint64_t block = binomial(n - next, k - i - 1);
      if (rank < block) break;
      rank -= block;
    }
    c[static_cast<std::size_t>(i)] = next++;
  }
  return c;
}

SubsetTable::SubsetTable(int n, int k) : n_(n), k_(k) {
  count_ = binomial(n, k);
  flat_.reserve(count_ * static_cast<std::size_t>(k));
  if (count_ == 0) return;
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 1);
  do {
    flat_.insert(flat_.end(), c.begin(), c.end());
  } while (next_combination(c, n));
}

}  // namespace macc
