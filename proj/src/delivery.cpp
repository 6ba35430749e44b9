#include "macc/delivery.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include "macc/errors.hpp"

namespace macc {

namespace {

// The single element of `plus` missing from `tee`, or 0 if tee is not a
// t-subset of plus.
int missing_element(std::span<const int> plus, std::span<const int> tee) {
  if (plus.size() != tee.size() + 1) return 0;
  int missing = 0;
  std::size_t h = 0;
  for (int x : plus) {
    if (h < tee.size() && tee[h] == x) {
      ++h;
    } else if (missing == 0) {
      missing = x;
    } else {
      return 0;
    }
  }
  return h == tee.size() ? missing : 0;
}

int connected_level(int user, int node, int k) { return cyc(static_cast<long long>(node) - user + 1, k); }

void check_demand(const DemandVector& demand, int k, int n_files) {
  if (static_cast<int>(demand.d.size()) != k)
    throw InvalidArgument("demand vector has " + std::to_string(demand.d.size()) + " entries, expected K=" + std::to_string(k));
  for (std::size_t i = 0; i < demand.d.size(); ++i)
    if (demand.d[i] < 1 || (n_files > 0 && demand.d[i] > n_files))
      throw InvalidArgument("demand of user " + std::to_string(i + 1) + " outside [1, N]");
}

bool has_repeats(const DemandVector& demand) {
  std::set<int> seen(demand.d.begin(), demand.d.end());
  return seen.size() != demand.d.size();
}

struct UserTally {
  std::vector<std::uint64_t> direct;
  std::vector<std::uint64_t> decode;
  std::vector<Fetch> trace;
  std::exception_ptr error;
};

Rational level_sum(const std::vector<std::uint64_t>& counts, const SystemConfig& cfg) {
  Rational sum = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) sum += cfg.mu[l] * Rational(counts[l]);
  return sum;
}

}  // namespace

DemandVector worst_case_demand(int k, int n_files) {
  if (k < 1 || n_files < 1) throw InvalidArgument("K and N must be positive");
  DemandVector out;
  out.d.resize(static_cast<std::size_t>(k));
  for (int user = 1; user <= k; ++user) out.d[static_cast<std::size_t>(user - 1)] = cyc(user, n_files);
  return out;
}

XorSet::XorSet(std::vector<PacketId> packets) {
  for (const auto& p : packets) toggle(p);
}

void XorSet::toggle(const PacketId& packet) {
  auto it = std::lower_bound(items_.begin(), items_.end(), packet);
  if (it != items_.end() && *it == packet) {
    items_.erase(it);
  } else {
    items_.insert(it, packet);
  }
}

XorSet& XorSet::operator^=(const XorSet& other) {
  std::vector<PacketId> out;
  out.reserve(items_.size() + other.items_.size());
  std::set_symmetric_difference(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(), std::back_inserter(out));
  items_ = std::move(out);
  return *this;
}

bool XorSet::contains(const PacketId& packet) const { return std::binary_search(items_.begin(), items_.end(), packet); }

std::vector<XorSet> broadcast_messages(const SchemeArrays& arrays, const DemandVector& demand) {
  const int k = arrays.cols();
  check_demand(demand, k, 0);
  if (arrays.delivery.cols() != k) throw InvalidArgument("delivery array width does not match K");
  const std::uint64_t s = arrays.params.s();
  std::vector<XorSet> messages(s);
  for (std::uint64_t row = 0; row < arrays.rows(); ++row) {
    for (int user = 1; user <= k; ++user) {
      const std::int64_t label = arrays.delivery.at(row, user);
      if (label == DeliveryArray::kStar) continue;
      if (label < 0 || static_cast<std::uint64_t>(label) >= s) throw InvalidArgument("delivery entry out of range");
      messages[static_cast<std::size_t>(label)].toggle({demand.d[static_cast<std::size_t>(user - 1)], row});
    }
  }
  return messages;
}

std::string format_fetch(const Fetch& fetch, const SchemeArrays& arrays) {
  std::string label;
  if (fetch.kind == FetchKind::Direct) {
    const auto row = static_cast<std::uint64_t>(fetch.label);
    label = format_label(arrays.row_tee(row), arrays.row_g(row));
  } else {
    label = format_label(arrays.label_tee(fetch.label), arrays.label_g(fetch.label));
  }
  return "FETCH user=" + std::to_string(fetch.user) + " node=" + std::to_string(fetch.node) + " level=" + std::to_string(fetch.level) +
         " kind=" + (fetch.kind == FetchKind::Direct ? "direct" : "decode") + " label=" + label;
}

std::vector<Retrieval> direct_retrievals(const SchemeArrays& arrays, int user, const DemandVector& demand, const SystemConfig& cfg) {
  const int k = arrays.cols();
  const int level = arrays.params.level();
  if (user < 1 || user > k) throw InvalidArgument("user " + std::to_string(user) + " outside [1, K]");
  if (static_cast<int>(cfg.mu.size()) != level) throw InvalidArgument("access cost vector does not match L");
  check_demand(demand, k, 0);

  std::vector<Retrieval> out;
  for (std::uint64_t row = 0; row < arrays.rows(); ++row) {
    if (!arrays.user_retrieve.star(row, user)) continue;
    int holder = 0;
    int holder_level = 0;
    for (int l = 1; l <= level; ++l) {
      const int node = cyc(static_cast<long long>(user) + l - 1, k);
      if (!arrays.node_placement.star(row, node)) continue;
      if (holder != 0)
        throw DecodeFailure("packet " + format_label(arrays.row_tee(row), arrays.row_g(row)) + " is held by two nodes connected to user " +
                            std::to_string(user));
      holder = node;
      holder_level = l;
    }
    if (holder == 0)
      throw DecodeFailure("user " + std::to_string(user) + " cannot reach packet " + format_label(arrays.row_tee(row), arrays.row_g(row)));
    out.push_back({{demand.d[static_cast<std::size_t>(user - 1)], row}, holder, holder_level, cfg.mu[static_cast<std::size_t>(holder_level - 1)]});
  }
  return out;
}

SidePlan plan_sides(int own_r, std::span<const int> others) {
  SidePlan plan;
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (others[i] == own_r) throw DecodeFailure("two constituents of one message miss the same element");
    (others[i] > own_r ? plan.from_last : plan.from_first).push_back(i);
  }
  return plan;
}

DecodeResult decode_user(int user, const SchemeArrays& arrays, const DemandVector& demand, const std::vector<XorSet>& messages,
                         const SystemConfig& cfg) {
  const int k = arrays.cols();
  const int level = arrays.params.level();
  if (user < 1 || user > k) throw InvalidArgument("user " + std::to_string(user) + " outside [1, K]");
  if (static_cast<int>(cfg.mu.size()) != level) throw InvalidArgument("access cost vector does not match L");
  if (messages.size() != arrays.params.s()) throw InvalidArgument("message count does not match S");
  check_demand(demand, k, 0);

  const int first_node = user;
  const int last_node = cyc(static_cast<long long>(user) + level - 1, k);

  DecodeResult out;
  for (std::uint64_t row = 0; row < arrays.rows(); ++row) {
    const std::int64_t label = arrays.delivery.at(row, user);
    if (label == DeliveryArray::kStar) continue;
    const XorSet& message = messages[static_cast<std::size_t>(label)];
    const PacketId own{demand.d[static_cast<std::size_t>(user - 1)], row};
    if (!message.contains(own))
      throw DecodeFailure("message " + format_label(arrays.label_tee(label), arrays.label_g(label)) + " does not carry the packet of user " +
                          std::to_string(user));

    const auto plus = arrays.label_tee(label);
    const int own_r = missing_element(plus, arrays.row_tee(row));
    std::vector<PacketId> others;
    std::vector<int> others_r;
    for (const PacketId& packet : message.items()) {
      if (packet == own) continue;
      const int r = missing_element(plus, arrays.row_tee(packet.row));
      if (own_r == 0 || r == 0) throw DecodeFailure("message constituent is not a subset row of its label");
      others.push_back(packet);
      others_r.push_back(r);
    }

    const SidePlan plan = plan_sides(own_r, others_r);
    XorSet residual = message;
    auto fetch_side = [&](const std::vector<std::size_t>& picks, int node) {
      if (picks.empty()) return;
      XorSet side;
      for (std::size_t i : picks) {
        if (!arrays.node_placement.star(others[i].row, node))
          throw DecodeFailure("side packet " + format_label(arrays.row_tee(others[i].row), arrays.row_g(others[i].row)) +
                              " is not cached at node " + std::to_string(node) + " (user " + std::to_string(user) + ")");
        side.toggle(others[i]);
      }
      residual ^= side;
      out.fetches.push_back({user, node, connected_level(user, node, k), FetchKind::Decode, label, row, std::move(side)});
    };
    fetch_side(plan.from_first, first_node);
    fetch_side(plan.from_last, last_node);

    if (residual.size() != 1 || residual.items().front() != own)
      throw DecodeFailure("user " + std::to_string(user) + " is left with " + std::to_string(residual.size()) + " packets after decoding " +
                          format_label(plus, arrays.label_g(label)));
    out.recovered.push_back(own);
  }
  return out;
}

std::vector<std::uint64_t> CostBreakdown::access_packets_per_level() const {
  std::vector<std::uint64_t> out(direct_per_level.size(), 0);
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = direct_per_level[l] + decode_per_level[l];
  return out;
}

void check_matches(const LevelParams& p, const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.k != p.k()) throw InvalidArgument("config has K=" + std::to_string(cfg.k) + " but the scheme has K=" + std::to_string(p.k()));
  if (cfg.level != p.level())
    throw InvalidArgument("config has L=" + std::to_string(cfg.level) + " but the scheme has L=" + std::to_string(p.level()));
  if (cfg.memory_ratio() != p.gamma())
    throw InvalidArgument("config has M/N=" + to_string(cfg.memory_ratio()) + " but the scheme caches " + to_string(p.gamma()));
}

CostBreakdown simulate(const LevelParams& p, const SystemConfig& cfg, const DemandVector& demand, const SimulationOptions& options) {
  check_matches(p, cfg);
  return simulate(build_arrays(p, options.max_f), cfg, demand, options);
}

CostBreakdown simulate(const SchemeArrays& arrays, const SystemConfig& cfg, const DemandVector& demand, const SimulationOptions& options) {
  const LevelParams& p = arrays.params;
  check_matches(p, cfg);
  check_demand(demand, p.k(), cfg.n_files);
  const int k = p.k();
  const auto levels = static_cast<std::size_t>(p.level());
  const std::vector<XorSet> messages = broadcast_messages(arrays, demand);
  const bool tracing = options.trace != nullptr;

  std::vector<UserTally> tallies(static_cast<std::size_t>(k));
  [[maybe_unused]] const bool parallel = options.policy == ExecPolicy::Parallel;
#if defined(MACC_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int user = 1; user <= k; ++user) {
    UserTally& tally = tallies[static_cast<std::size_t>(user - 1)];
    try {
      tally.direct.assign(levels, 0);
      tally.decode.assign(levels, 0);
      std::vector<char> have(arrays.rows(), 0);
      std::uint64_t recovered = 0;
      auto mark = [&](std::uint64_t row) {
        if (have[row]) throw DecodeFailure("user " + std::to_string(user) + " obtains a packet twice");
        have[row] = 1;
        ++recovered;
      };

      for (const Retrieval& r : direct_retrievals(arrays, user, demand, cfg)) {
        mark(r.packet.row);
        ++tally.direct[static_cast<std::size_t>(r.level - 1)];
        if (tracing)
          tally.trace.push_back({user, r.node, r.level, FetchKind::Direct, static_cast<std::int64_t>(r.packet.row), r.packet.row, XorSet({r.packet})});
      }
      DecodeResult decoded = decode_user(user, arrays, demand, messages, cfg);
      for (const PacketId& packet : decoded.recovered) mark(packet.row);
      for (const Fetch& f : decoded.fetches) {
        if (f.level != 1 && f.level != p.level())
          throw DecodeFailure("decode fetch at access level " + std::to_string(f.level) + " for user " + std::to_string(user));
        ++tally.decode[static_cast<std::size_t>(f.level - 1)];
      }
      if (recovered != arrays.rows())
        throw DecodeFailure("user " + std::to_string(user) + " recovers " + std::to_string(recovered) + " of " + std::to_string(arrays.rows()) +
                            " packets");

      if (tracing) {
        // Merge direct and decode fetches by row so the log is row-minor.
        std::vector<Fetch> merged = std::move(tally.trace);
        merged.insert(merged.end(), std::make_move_iterator(decoded.fetches.begin()), std::make_move_iterator(decoded.fetches.end()));
        std::stable_sort(merged.begin(), merged.end(), [](const Fetch& a, const Fetch& b) { return a.row < b.row; });
        tally.trace = std::move(merged);
      }
    } catch (...) {
      tally.error = std::current_exception();
    }
  }

  CostBreakdown out;
  out.direct_per_level.assign(levels, 0);
  out.decode_per_level.assign(levels, 0);
  for (UserTally& tally : tallies) {
    if (tally.error) std::rethrow_exception(tally.error);
    for (std::size_t l = 0; l < levels; ++l) {
      out.direct_per_level[l] += tally.direct[l];
      out.decode_per_level[l] += tally.decode[l];
    }
    if (tracing) options.trace->insert(options.trace->end(), tally.trace.begin(), tally.trace.end());
  }
  out.broadcast_packets = messages.size();
  out.f = arrays.rows();
  out.repeated_demands = has_repeats(demand);
  const Rational f(out.f);
  out.broadcast_cost = cfg.rho * Rational(out.broadcast_packets) / f;
  out.direct_cost = level_sum(out.direct_per_level, cfg) / f;
  out.decode_cost = level_sum(out.decode_per_level, cfg) / f;
  out.total_cost = out.broadcast_cost + out.direct_cost + out.decode_cost;
  return out;
}

const CostBreakdown* LevelRunCache::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  ++hits_;
  return &it->second;
}

SuperpositionRun simulate_superposition(const SuperpositionDesign& design, const SystemConfig& cfg, const DemandVector& demand,
                                        std::uint64_t dense_cell_limit, ExecPolicy policy, LevelRunCache* cache) {
  cfg.validate();
  check_demand(demand, cfg.k, cfg.n_files);
  Rational alpha_sum = 0;
  Rational memory = 0;
  std::set<std::pair<int, Rational>> seen;
  for (const auto& s : design.supports) {
    if (s.level < 1 || s.level > cfg.level) throw InvalidArgument("support level " + std::to_string(s.level) + " outside [1, L]");
    if (!seen.insert({s.level, s.gamma}).second)
      throw InvalidArgument("support (level " + std::to_string(s.level) + ", gamma " + to_string(s.gamma) + ") appears twice in the design");
    if (s.alpha < 0) throw InvalidArgument("negative subfile fraction at level " + std::to_string(s.level));
    alpha_sum += s.alpha;
    memory += s.alpha * s.gamma;
  }
  if (alpha_sum != 1) throw InvalidArgument("subfile fractions sum to " + to_string(alpha_sum) + ", not 1");
  if (memory != cfg.memory_ratio())
    throw InvalidArgument("design uses memory " + to_string(memory) + " but M/N=" + to_string(cfg.memory_ratio()));

  SuperpositionRun run;
  run.total_cost = 0;
  for (const auto& s : design.supports) {
    if (s.alpha == 0) continue;
    const LevelParams p = LevelParams::from_ratio(cfg.k, s.level, s.gamma);
    SystemConfig sub = cfg.with_level(s.level);
    sub.m = s.gamma * cfg.n_files;
    LevelRun level_run;
    level_run.level = s.level;
    level_run.alpha = s.alpha;
    level_run.gamma = s.gamma;
    const bool fits = p.f() <= dense_cell_limit / static_cast<std::uint64_t>(p.k()) && p.f() <= max_subpacketization();
    level_run.streamed = !fits;
    std::string key;
    if (cache) {
      key = std::to_string(cfg.k) + ' ' + std::to_string(cfg.n_files) + ' ' + std::to_string(s.level) + ' ' + to_string(s.gamma) + ' ' + to_string(cfg.rho);
      for (const Rational& mu : sub.mu) key += ' ' + to_string(mu);
      key += " |";
      for (int d : demand.d) key += ' ' + std::to_string(d);
    }
    if (const CostBreakdown* hit = cache ? cache->find(key) : nullptr) {
      level_run.breakdown = *hit;
    } else if (fits) {
      SimulationOptions options;
      options.policy = policy;
      level_run.breakdown = simulate(p, sub, demand, options);
    } else {
      check_matches(p, sub);
      level_run.breakdown = simulate_orbit(p, sub, policy);
      level_run.breakdown.repeated_demands = has_repeats(demand);
    }
    if (cache) cache->store(key, level_run.breakdown);
    run.total_cost += s.alpha * level_run.breakdown.total_cost;
    run.levels.push_back(std::move(level_run));
  }
  return run;
}

}  // namespace macc
