#pragma once

#include <vector>

#include "macc/rational.hpp"

namespace macc {

/// Superposition of single-level schemes: each file is split into subfiles
/// of relative size alpha_l, subfile l served by the level-l scheme with
/// caching ratio gamma_l. A level may appear twice with different ratios
/// (memory sharing inside one level).
struct SuperpositionDesign {
  struct Support {
    int level = 0;
    Rational alpha;
    Rational gamma;
    friend bool operator==(const Support&, const Support&) = default;
  };
  std::vector<Support> supports;
  Rational objective;
};

}  // namespace macc
