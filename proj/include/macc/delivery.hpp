#pragma once

// Symbolic execution of one placement/delivery round.
//
// Packets are identifiers (file, row); XOR is symmetric difference of
// identifier sets, so a user decodes exactly when the broadcast minus its
// fetched side information is the single packet it wants.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "macc/design.hpp"
#include "macc/scheme.hpp"
#include "macc/system.hpp"

namespace macc {

enum class ExecPolicy { Serial, Parallel };

struct DemandVector {
  std::vector<int> d;  // d[k - 1] is the file requested by user k
};

/// All-distinct demands when N >= K, else d_k = <k>_N.
DemandVector worst_case_demand(int k, int n_files);

struct PacketId {
  int file = 0;
  std::uint64_t row = 0;
  friend auto operator<=>(const PacketId&, const PacketId&) = default;
};

/// A GF(2) combination of packets, kept as a sorted identifier set.
class XorSet {
 public:
  XorSet() = default;
  explicit XorSet(std::vector<PacketId> packets);

  void toggle(const PacketId& packet);
  XorSet& operator^=(const XorSet& other);
  friend XorSet operator^(XorSet lhs, const XorSet& rhs) { return lhs ^= rhs; }

  bool contains(const PacketId& packet) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<PacketId>& items() const { return items_; }

  friend bool operator==(const XorSet&, const XorSet&) = default;

 private:
  std::vector<PacketId> items_;
};

/// X_s for every label s (indexed by message id).
std::vector<XorSet> broadcast_messages(const SchemeArrays& arrays, const DemandVector& demand);

enum class FetchKind { Direct, Decode };

struct Fetch {
  int user = 0;
  int node = 0;
  int level = 0;
  FetchKind kind = FetchKind::Direct;
  std::int64_t label = 0;  // row index for Direct, message id for Decode
  std::uint64_t row = 0;   // row of the packet this fetch serves
  XorSet packets;
};

/// "FETCH user=<k> node=<c> level=<l> kind=<direct|decode> label=<...>"
std::string format_fetch(const Fetch& fetch, const SchemeArrays& arrays);

struct Retrieval {
  PacketId packet;
  int node = 0;
  int level = 0;
  Rational cost;
};

/// Packets user k reads straight from a connected node, one per starred row,
/// each charged mu_l of the connected node that holds it.
std::vector<Retrieval> direct_retrievals(const SchemeArrays& arrays, int user, const DemandVector& demand, const SystemConfig& cfg);

/// How one user cancels the other t packets of a broadcast: constituents
/// whose missing element exceeds the user's own go to the L-th connected node,
/// the rest to the first. Entries are positions into `others`.
struct SidePlan {
  std::vector<std::size_t> from_last;
  std::vector<std::size_t> from_first;
};
SidePlan plan_sides(int own_r, std::span<const int> others);

struct DecodeResult {
  std::vector<PacketId> recovered;
  std::vector<Fetch> fetches;
};

/// Decodes every non-star entry of user k. Throws DecodeFailure if a side
/// packet is not cached where the plan says or the residual is not the
/// demanded packet.
DecodeResult decode_user(int user, const SchemeArrays& arrays, const DemandVector& demand,
                         const std::vector<XorSet>& messages, const SystemConfig& cfg);

struct CostBreakdown {
  std::uint64_t broadcast_packets = 0;             // S_d
  std::vector<std::uint64_t> direct_per_level;     // index l - 1
  std::vector<std::uint64_t> decode_per_level;     // index l - 1
  std::uint64_t f = 0;
  Rational broadcast_cost;                         // rho * S_d / F
  Rational direct_cost;
  Rational decode_cost;
  Rational total_cost;
  bool repeated_demands = false;                   // some file requested twice

  /// Delta_{d,l}: every packet-sized fetch from the l-th connected node.
  std::vector<std::uint64_t> access_packets_per_level() const;

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

struct SimulationOptions {
  ExecPolicy policy = ExecPolicy::Parallel;
  std::vector<Fetch>* trace = nullptr;  // user-major, row-minor when set
  std::uint64_t max_f = max_subpacketization();
};

/// Throws InvalidArgument unless cfg describes the same K, L and M/N as p.
void check_matches(const LevelParams& p, const SystemConfig& cfg);

CostBreakdown simulate(const LevelParams& p, const SystemConfig& cfg, const DemandVector& demand,
                       const SimulationOptions& options = {});
CostBreakdown simulate(const SchemeArrays& arrays, const SystemConfig& cfg, const DemandVector& demand,
                       const SimulationOptions& options = {});

/// Same accounting without materializing the arrays: walks the rows and
/// labels of block g = 1 on the fly and scales by K, relying on the cyclic
/// shift structure of the construction. Every side packet is still checked
/// against the caching rule. Used when F * K is too large for dense storage.
CostBreakdown simulate_orbit(const LevelParams& p, const SystemConfig& cfg, ExecPolicy policy = ExecPolicy::Parallel);

struct LevelRun {
  int level = 0;
  Rational alpha;
  Rational gamma;
  bool streamed = false;
  CostBreakdown breakdown;
};

struct SuperpositionRun {
  std::vector<LevelRun> levels;
  Rational total_cost;  // sum of alpha_l * level cost
};

/// Per-level runs keyed by everything they depend on (K, N, level, ratio,
/// mu_1..mu_l, rho, demand). Lets a sweep over L reuse sub-schemes.
class LevelRunCache {
 public:
  const CostBreakdown* find(const std::string& key) const;
  void store(const std::string& key, const CostBreakdown& breakdown) { entries_[key] = breakdown; }
  std::size_t size() const { return entries_.size(); }
  std::size_t hits() const { return hits_; }

 private:
  std::map<std::string, CostBreakdown> entries_;
  mutable std::size_t hits_ = 0;
};

/// Runs one scheme per supported level on its subfile library and weights
/// each cost by the subfile size. Levels whose arrays exceed
/// `dense_cell_limit` cells use simulate_orbit.
SuperpositionRun simulate_superposition(const SuperpositionDesign& design, const SystemConfig& cfg,
                                        const DemandVector& demand, std::uint64_t dense_cell_limit = 1ULL << 22,
                                        ExecPolicy policy = ExecPolicy::Parallel, LevelRunCache* cache = nullptr);

}  // namespace macc
