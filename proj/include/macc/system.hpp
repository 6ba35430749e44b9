#pragma once

#include <vector>

#include "macc/rational.hpp"

namespace macc {

/// A cost-aware multiaccess instance: K users and cache nodes, access level
/// L, N files, M files of memory per node, access costs mu_1..mu_L per file
/// and broadcast cost rho per file.
struct SystemConfig {
  int k = 0;
  int level = 1;
  int n_files = 0;
  Rational m;
  std::vector<Rational> mu;
  Rational rho;

  Rational memory_ratio() const { return m / n_files; }

  /// Throws InvalidArgument unless |mu| == level, 0 < M <= N/L, L <= K and
  /// every cost is nonnegative.
  void validate() const;

  /// Same system seen through a smaller access level (mu truncated).
  SystemConfig with_level(int level) const;
};

}  // namespace macc
