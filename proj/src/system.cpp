#include "macc/system.hpp"

#include "macc/errors.hpp"

namespace macc {

void SystemConfig::validate() const {
  if (k < 1) throw InvalidArgument("K must be positive");
  if (level < 1 || level > k) throw InvalidArgument("L must lie in [1, K], got " + std::to_string(level));
  if (n_files < 1) throw InvalidArgument("N must be positive");
  if (m <= 0) throw InvalidArgument("M must be positive");
  if (m * level > n_files)
    throw InvalidArgument("M=" + to_string(m) + " exceeds N/L=" + to_string(Rational(n_files, level)));
  if (static_cast<int>(mu.size()) != level)
    throw InvalidArgument("expected " + std::to_string(level) + " access costs, got " + std::to_string(mu.size()));
  for (std::size_t l = 0; l < mu.size(); ++l)
    if (mu[l] < 0) throw InvalidArgument("mu_" + std::to_string(l + 1) + " is negative");
  if (rho < 0) throw InvalidArgument("rho is negative");
}

SystemConfig SystemConfig::with_level(int l) const {
  if (l < 1 || l > level) throw InvalidArgument("level " + std::to_string(l) + " outside [1, " + std::to_string(level) + "]");
  SystemConfig out = *this;
  out.level = l;
  out.mu.resize(static_cast<std::size_t>(l));
  return out;
}

}  // namespace macc
