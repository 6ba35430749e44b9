#pragma once

// Multiaccess coded caching arrays for one (K', t, L) instance.
//
// Rows are labelled (T, g) with T a t-subset of [K'] and g in [K]; columns are
// users (or cache nodes) in [K]. Every public index is 1-based: users, cache
// nodes, subset elements and g. Rows are enumerated T-major in lexicographic
// order, then g ascending, so row index = rank(T) * K + (g - 1). Message
// labels (T', g) with |T'| = t + 1 are numbered the same way.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "macc/combinatorics.hpp"
#include "macc/rational.hpp"

namespace macc {

/// Sorted, 1-indexed set of integers.
using Subset = std::vector<int>;

class LevelParams {
 public:
  LevelParams(int k_prime, int t, int level);

  /// The instance with K users, access level `level` and caching ratio gamma.
  /// Throws InvalidArgument when gamma * K is not an integer or the derived
  /// K' is smaller than t.
  static LevelParams from_ratio(int k, int level, const Rational& gamma);

  int k_prime() const { return k_prime_; }
  int t() const { return t_; }
  int level() const { return level_; }
  int k() const { return k_prime_ + t_ * (level_ - 1); }
  Rational gamma() const { return Rational(t_, k()); }
  /// Subpacketization C(K', t) * K.
  std::uint64_t f() const;
  /// Number of distinct broadcast labels K * C(K', t + 1).
  std::uint64_t s() const;
  /// Broadcast load (K - tL) / (t + 1) in files.
  Rational load() const { return Rational(k() - t_ * level_, t_ + 1); }

  friend bool operator==(const LevelParams&, const LevelParams&) = default;

 private:
  int k_prime_;
  int t_;
  int level_;
};

struct RowLabel {
  Subset tee;
  int g = 1;
  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

struct MessageLabel {
  Subset tee_plus;
  int g = 1;
  friend bool operator==(const MessageLabel&, const MessageLabel&) = default;
};

/// "({1,2},3)"
std::string format_label(std::span<const int> set, int g);
std::string format(const RowLabel& row);
std::string format(const MessageLabel& label);

/// 1-indexed residue of a modulo q, in [1, q].
constexpr int cyc(long long a, int q) {
  long long r = a % q;
  if (r <= 0) r += q;
  return static_cast<int>(r);
}

/// Throws InvalidArgument unless tee is a strictly increasing t-subset of
/// [K'] and g is in [K].
void check_row(std::span<const int> tee, int g, const LevelParams& p);

/// Cache nodes storing packet (T, g): { <T[h] + h(L-1) + g - 1>_K : h in [t] }.
Subset cache_node_set(std::span<const int> tee, int g, const LevelParams& p);

/// Users that can read packet (T, g) from a connected node: t disjoint runs
/// of L consecutive users, the h-th ending at the h-th caching node.
Subset user_retrieve_set(std::span<const int> tee, int g, const LevelParams& p);

/// Element of [K'] \ T that user k (outside U_{T,g}) pairs with row (T, g).
/// Users outside U_{T,g} are ranked in cyclic order starting at user g and
/// matched to [K'] \ T by rank. Throws InvalidArgument for k in U_{T,g}.
int psi(std::span<const int> tee, int g, int k, const LevelParams& p);

/// Inverse of psi: <(n - 1)(L - 1) + r + g - 1>_K with n the rank of r in
/// T u {r}. Throws InvalidArgument for r in T or r outside [K'].
int psi_inv(std::span<const int> tee, int g, int r, const LevelParams& p);

RowLabel row_label(std::uint64_t row, const LevelParams& p);
std::uint64_t row_index(const RowLabel& row, const LevelParams& p);
MessageLabel message_label(std::int64_t id, const LevelParams& p);
std::int64_t message_id(const MessageLabel& label, const LevelParams& p);

/// Dense F x K array of star / null.
class StarArray {
 public:
  StarArray() = default;
  StarArray(std::uint64_t rows, int cols) : rows_(rows), cols_(cols), cells_(rows * static_cast<std::uint64_t>(cols), 0) {}

  std::uint64_t rows() const { return rows_; }
  int cols() const { return cols_; }
  bool star(std::uint64_t row, int k) const { return cells_[offset(row, k)] != 0; }
  void set(std::uint64_t row, int k, bool is_star) { cells_[offset(row, k)] = is_star ? 1 : 0; }

  friend bool operator==(const StarArray&, const StarArray&) = default;

 private:
  std::size_t offset(std::uint64_t row, int k) const { return row * static_cast<std::uint64_t>(cols_) + static_cast<std::uint64_t>(k - 1); }

  std::uint64_t rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Dense F x K array over {star} u message ids.
class DeliveryArray {
 public:
  static constexpr std::int64_t kStar = -1;

  DeliveryArray() = default;
  DeliveryArray(std::uint64_t rows, int cols) : rows_(rows), cols_(cols), cells_(rows * static_cast<std::uint64_t>(cols), kStar) {}

  std::uint64_t rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t at(std::uint64_t row, int k) const { return cells_[offset(row, k)]; }
  bool star(std::uint64_t row, int k) const { return at(row, k) == kStar; }
  void set(std::uint64_t row, int k, std::int64_t entry) { cells_[offset(row, k)] = entry; }

  friend bool operator==(const DeliveryArray&, const DeliveryArray&) = default;

 private:
  std::size_t offset(std::uint64_t row, int k) const { return row * static_cast<std::uint64_t>(cols_) + static_cast<std::uint64_t>(k - 1); }

  std::uint64_t rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> cells_;
};

/// Node-placement C, user-retrieve U and user-delivery Q for one instance.
struct SchemeArrays {
  LevelParams params;
  SubsetTable tees;        // t-subsets of [K'], row order
  SubsetTable tee_pluses;  // (t+1)-subsets of [K'], label order
  StarArray node_placement;
  StarArray user_retrieve;
  DeliveryArray delivery;

  std::uint64_t rows() const { return node_placement.rows(); }
  int cols() const { return params.k(); }
  std::span<const int> row_tee(std::uint64_t row) const { return tees[row / static_cast<std::uint64_t>(params.k())]; }
  int row_g(std::uint64_t row) const { return static_cast<int>(row % static_cast<std::uint64_t>(params.k())) + 1; }
  std::span<const int> label_tee(std::int64_t id) const { return tee_pluses[static_cast<std::uint64_t>(id) / static_cast<std::uint64_t>(params.k())]; }
  int label_g(std::int64_t id) const { return static_cast<int>(id % params.k()) + 1; }
};

/// Subpacketization guardrail: MACC_MAX_F if set, else 10^7.
std::uint64_t max_subpacketization();

/// Dense-storage guardrail on F * K cells (4 * max_subpacketization()).
std::uint64_t max_dense_cells();

/// Builds C, U and Q. K' == t yields arrays without labels (S = 0). Throws
/// ResourceLimit when F exceeds `max_f` or F * K exceeds max_dense_cells().
SchemeArrays build_arrays(const LevelParams& p, std::uint64_t max_f = max_subpacketization());

struct PdaReport {
  bool c1 = true;            // equal labels in distinct rows and columns
  bool c2 = true;            // cross positions are stars
  bool multiplicity = true;  // every label occurs t + 1 times
  bool label_count = true;   // S == K * C(K', t + 1)
  bool canonical = true;     // each label's subarray is diag(s) with * elsewhere
  std::uint64_t distinct_labels = 0;
  std::string witness;       // first violation, empty on success

  bool ok() const { return c1 && c2 && multiplicity && label_count && canonical; }
};

PdaReport validate_pda(const DeliveryArray& q, const LevelParams& p);

/// True iff every block (., g) of C, U and Q equals block (., 1) with columns
/// cyclically right-shifted by g - 1 (labels compared up to their g).
bool check_shift_structure(const SchemeArrays& arrays);

}  // namespace macc
