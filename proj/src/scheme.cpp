#include "macc/scheme.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "macc/errors.hpp"

namespace macc {

namespace {

std::string describe(std::span<const int> set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(set[i]);
  }
  return out + "}";
}

// psi for every user of row (T, g): entry k - 1 holds psi(k), or 0 for users
// in U_{T,g}.
std::vector<int> pairing_row(std::span<const int> tee, int g, const LevelParams& p) {
  const int k = p.k();
  std::vector<int> pairing(static_cast<std::size_t>(k), 0);
  std::vector<char> in_u(static_cast<std::size_t>(k) + 1, 0);
  for (int user : user_retrieve_set(tee, g, p)) in_u[static_cast<std::size_t>(user)] = 1;

  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(p.k_prime() - p.t()));
  for (int r = 1, h = 0; r <= p.k_prime(); ++r) {
    if (h < static_cast<int>(tee.size()) && tee[static_cast<std::size_t>(h)] == r) {
      ++h;
      continue;
    }
    rest.push_back(r);
  }

  std::size_t rank = 0;
  for (int step = 0; step < k; ++step) {
    const int user = cyc(g + step, k);
    if (in_u[static_cast<std::size_t>(user)]) continue;
    pairing[static_cast<std::size_t>(user - 1)] = rest[rank++];
  }
  return pairing;
}

}  // namespace

LevelParams::LevelParams(int k_prime, int t, int level) : k_prime_(k_prime), t_(t), level_(level) {
  if (t < 1) throw InvalidArgument("t must be positive");
  if (level < 1) throw InvalidArgument("L must be positive");
  if (k_prime < t) throw InvalidArgument("K' must be at least t (K'=" + std::to_string(k_prime) + ", t=" + std::to_string(t) + ")");
}

LevelParams LevelParams::from_ratio(int k, int level, const Rational& gamma) {
  Rational t = gamma * k;
  if (!is_integer(t) || t < 1)
    throw InvalidArgument("caching ratio " + to_string(gamma) + " is not on the grid {t/" + std::to_string(k) + "}");
  const int ti = numerator(t).convert_to<int>();
  const int k_prime = k - ti * (level - 1);
  if (k_prime < ti)
    throw InvalidArgument("caching ratio " + to_string(gamma) + " exceeds 1/L for L=" + std::to_string(level));
  return LevelParams(k_prime, ti, level);
}

std::uint64_t LevelParams::f() const { return binomial(k_prime_, t_) * static_cast<std::uint64_t>(k()); }

std::uint64_t LevelParams::s() const { return binomial(k_prime_, t_ + 1) * static_cast<std::uint64_t>(k()); }

std::string format_label(std::span<const int> set, int g) { return "(" + describe(set) + "," + std::to_string(g) + ")"; }

std::string format(const RowLabel& row) { return format_label(row.tee, row.g); }

std::string format(const MessageLabel& label) { return format_label(label.tee_plus, label.g); }

void check_row(std::span<const int> tee, int g, const LevelParams& p) {
  if (static_cast<int>(tee.size()) != p.t())
    throw InvalidArgument("row set " + describe(tee) + " must have " + std::to_string(p.t()) + " elements");
  for (std::size_t h = 0; h < tee.size(); ++h) {
    if (tee[h] < 1 || tee[h] > p.k_prime())
      throw InvalidArgument("row set " + describe(tee) + " has elements outside [1," + std::to_string(p.k_prime()) + "]");
    if (h > 0 && tee[h] <= tee[h - 1])
      throw InvalidArgument("row set " + describe(tee) + " is not strictly increasing");
  }
  if (g < 1 || g > p.k()) throw InvalidArgument("g=" + std::to_string(g) + " outside [1," + std::to_string(p.k()) + "]");
}

Subset cache_node_set(std::span<const int> tee, int g, const LevelParams& p) {
  check_row(tee, g, p);
  Subset nodes;
  nodes.reserve(tee.size());
  for (std::size_t h = 1; h <= tee.size(); ++h)
    nodes.push_back(cyc(tee[h - 1] + static_cast<long long>(h) * (p.level() - 1) + g - 1, p.k()));
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

Subset user_retrieve_set(std::span<const int> tee, int g, const LevelParams& p) {
  check_row(tee, g, p);
  Subset users;
  users.reserve(tee.size() * static_cast<std::size_t>(p.level()));
  for (std::size_t h = 1; h <= tee.size(); ++h) {
    const long long first = tee[h - 1] + static_cast<long long>(h - 1) * (p.level() - 1) + g - 1;
    for (int r = 0; r < p.level(); ++r) users.push_back(cyc(first + r, p.k()));
  }
  std::sort(users.begin(), users.end());
  return users;
}

int psi(std::span<const int> tee, int g, int k, const LevelParams& p) {
  check_row(tee, g, p);
  if (k < 1 || k > p.k()) throw InvalidArgument("user " + std::to_string(k) + " outside [1," + std::to_string(p.k()) + "]");
  const int r = pairing_row(tee, g, p)[static_cast<std::size_t>(k - 1)];
  if (r == 0)
    throw InvalidArgument("user " + std::to_string(k) + " retrieves row " + format_label(tee, g) + " locally");
  return r;
}

int psi_inv(std::span<const int> tee, int g, int r, const LevelParams& p) {
  check_row(tee, g, p);
  if (r < 1 || r > p.k_prime()) throw InvalidArgument("r=" + std::to_string(r) + " outside [1," + std::to_string(p.k_prime()) + "]");
  if (std::binary_search(tee.begin(), tee.end(), r))
    throw InvalidArgument("r=" + std::to_string(r) + " belongs to " + describe(tee));
  const long long n = std::count_if(tee.begin(), tee.end(), [r](int x) { return x < r; }) + 1;
  return cyc((n - 1) * (p.level() - 1) + r + g - 1, p.k());
}

RowLabel row_label(std::uint64_t row, const LevelParams& p) {
  if (row >= p.f()) throw InvalidArgument("row " + std::to_string(row) + " outside the array");
  const auto k = static_cast<std::uint64_t>(p.k());
  return {lex_unrank(row / k, p.k_prime(), p.t()), static_cast<int>(row % k) + 1};
}

std::uint64_t row_index(const RowLabel& row, const LevelParams& p) {
  check_row(row.tee, row.g, p);
  return lex_rank(row.tee, p.k_prime()) * static_cast<std::uint64_t>(p.k()) + static_cast<std::uint64_t>(row.g - 1);
}

MessageLabel message_label(std::int64_t id, const LevelParams& p) {
  if (id < 0 || static_cast<std::uint64_t>(id) >= p.s()) throw InvalidArgument("label id " + std::to_string(id) + " out of range");
  const auto k = static_cast<std::uint64_t>(p.k());
  const auto u = static_cast<std::uint64_t>(id);
  return {lex_unrank(u / k, p.k_prime(), p.t() + 1), static_cast<int>(u % k) + 1};
}

std::int64_t message_id(const MessageLabel& label, const LevelParams& p) {
  const auto& set = label.tee_plus;
  bool ok = static_cast<int>(set.size()) == p.t() + 1 && label.g >= 1 && label.g <= p.k();
  for (std::size_t i = 0; ok && i < set.size(); ++i)
    ok = set[i] >= 1 && set[i] <= p.k_prime() && (i == 0 || set[i] > set[i - 1]);
  if (!ok) throw InvalidArgument("malformed message label " + format(label));
  return static_cast<std::int64_t>(lex_rank(set, p.k_prime()) * static_cast<std::uint64_t>(p.k()) + static_cast<std::uint64_t>(label.g - 1));
}

std::uint64_t max_subpacketization() {
  if (const char* env = std::getenv("MACC_MAX_F"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return 10'000'000ULL;
}

std::uint64_t max_dense_cells() { return 4 * max_subpacketization(); }

SchemeArrays build_arrays(const LevelParams& p, std::uint64_t max_f) {
  const std::uint64_t f = p.f();
  const int k = p.k();
  if (f > max_f)
    throw ResourceLimit("subpacketization F=" + std::to_string(f) + " exceeds the limit " + std::to_string(max_f) + " (set MACC_MAX_F to override)");
  if (f * static_cast<std::uint64_t>(k) > max_dense_cells())
    throw ResourceLimit("dense arrays need F*K=" + std::to_string(f * static_cast<std::uint64_t>(k)) + " cells (set MACC_MAX_F to override)");

  SchemeArrays arrays{p, SubsetTable(p.k_prime(), p.t()), SubsetTable(p.k_prime(), p.t() + 1),
                      StarArray(f, k), StarArray(f, k), DeliveryArray(f, k)};

  std::vector<int> merged(static_cast<std::size_t>(p.t() + 1));
  for (std::uint64_t ti = 0; ti < arrays.tees.size(); ++ti) {
    const auto tee = arrays.tees[ti];
    for (int g = 1; g <= k; ++g) {
      const std::uint64_t row = ti * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(g - 1);
      for (int node : cache_node_set(tee, g, p)) arrays.node_placement.set(row, node, true);
      for (int user : user_retrieve_set(tee, g, p)) arrays.user_retrieve.set(row, user, true);
      const auto pairing = pairing_row(tee, g, p);
      for (int user = 1; user <= k; ++user) {
        const int r = pairing[static_cast<std::size_t>(user - 1)];
        if (r == 0) continue;
        std::merge(tee.begin(), tee.end(), &r, &r + 1, merged.begin());
        const auto id = lex_rank(merged, p.k_prime()) * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(g - 1);
        arrays.delivery.set(row, user, static_cast<std::int64_t>(id));
      }
    }
  }
  return arrays;
}

PdaReport validate_pda(const DeliveryArray& q, const LevelParams& p) {
  PdaReport report;
  const int k = p.k();
  auto fail = [&report](bool& flag, const std::string& what) {
    flag = false;
    if (report.witness.empty()) report.witness = what;
  };
  if (q.rows() != p.f() || q.cols() != k) {
    fail(report.label_count, "array is " + std::to_string(q.rows()) + "x" + std::to_string(q.cols()) + ", expected " +
                                 std::to_string(p.f()) + "x" + std::to_string(k));
    return report;
  }

  const std::uint64_t s = p.s();
  std::vector<std::vector<std::pair<std::uint64_t, int>>> where(s);
  for (std::uint64_t row = 0; row < q.rows(); ++row) {
    for (int col = 1; col <= k; ++col) {
      const auto v = q.at(row, col);
      if (v == DeliveryArray::kStar) continue;
      if (v < 0 || static_cast<std::uint64_t>(v) >= s) {
        fail(report.label_count, "entry (" + std::to_string(row) + "," + std::to_string(col) + ") holds unknown label id " + std::to_string(v));
        continue;
      }
      where[static_cast<std::uint64_t>(v)].emplace_back(row, col);
    }
  }

  auto at = [&](std::uint64_t row, int col) { return format(row_label(row, p)) + "/user " + std::to_string(col); };
  for (std::uint64_t id = 0; id < s; ++id) {
    const auto& occ = where[id];
    if (occ.empty()) continue;
    ++report.distinct_labels;
    const std::string name = format(message_label(static_cast<std::int64_t>(id), p));
    if (static_cast<int>(occ.size()) != p.t() + 1)
      fail(report.multiplicity, "label " + name + " occurs " + std::to_string(occ.size()) + " times, expected " + std::to_string(p.t() + 1));
    for (std::size_t a = 0; a < occ.size(); ++a) {
      for (std::size_t b = a + 1; b < occ.size(); ++b) {
        const auto [r1, c1] = occ[a];
        const auto [r2, c2] = occ[b];
        if (r1 == r2 || c1 == c2) {
          fail(report.c1, "C1: label " + name + " repeats at " + at(r1, c1) + " and " + at(r2, c2));
          continue;
        }
        if (!q.star(r1, c2) || !q.star(r2, c1))
          fail(report.c2, "C2: label " + name + " at " + at(r1, c1) + " and " + at(r2, c2) + " has a non-star cross entry");
      }
    }
    // Canonical form: the occurrence rows x occurrence columns subarray is
    // the label on the diagonal and stars elsewhere.
    for (std::size_t u = 0; u < occ.size(); ++u) {
      for (std::size_t v = 0; v < occ.size(); ++v) {
        const auto entry = q.at(occ[u].first, occ[v].second);
        const bool good = u == v ? entry == static_cast<std::int64_t>(id) : entry == DeliveryArray::kStar;
        if (!good) {
          fail(report.canonical, "label " + name + " subarray is not diagonal at " + at(occ[u].first, occ[v].second));
          u = occ.size();
          break;
        }
      }
    }
  }
  if (report.distinct_labels != s)
    fail(report.label_count, "found " + std::to_string(report.distinct_labels) + " distinct labels, expected S=" + std::to_string(s));
  return report;
}

bool check_shift_structure(const SchemeArrays& a) {
  const int k = a.params.k();
  const auto kk = static_cast<std::uint64_t>(k);
  for (std::uint64_t ti = 0; ti < a.tees.size(); ++ti) {
    const std::uint64_t base = ti * kk;
    for (int g = 1; g <= k; ++g) {
      const std::uint64_t row = base + static_cast<std::uint64_t>(g - 1);
      for (int col = 1; col <= k; ++col) {
        const int src = cyc(col - g + 1, k);
        if (a.node_placement.star(row, col) != a.node_placement.star(base, src)) return false;
        if (a.user_retrieve.star(row, col) != a.user_retrieve.star(base, src)) return false;
        const auto lhs = a.delivery.at(row, col);
        const auto rhs = a.delivery.at(base, src);
        if ((lhs == DeliveryArray::kStar) != (rhs == DeliveryArray::kStar)) return false;
        if (lhs == DeliveryArray::kStar) continue;
        if (lhs / k != rhs / k || lhs % k != g - 1 || rhs % k != 0) return false;
      }
    }
  }
  return true;
}

}  // namespace macc
