#include <algorithm>
#include <exception>
#include <numeric>

#include "macc/delivery.hpp"
#include "macc/errors.hpp"

namespace macc {

namespace {

struct OrbitTally {
  std::vector<std::uint64_t> direct;
  std::vector<std::uint64_t> decode;
  std::uint64_t rows = 0;
  std::uint64_t open_entries = 0;     // (row, user) pairs outside U
  std::uint64_t decoded_entries = 0;  // (label, user) pairs served by decoding
  std::uint64_t labels = 0;
  std::exception_ptr error;

  explicit OrbitTally(int levels) : direct(static_cast<std::size_t>(levels), 0), decode(static_cast<std::size_t>(levels), 0) {}

  void merge(const OrbitTally& o) {
    for (std::size_t l = 0; l < direct.size(); ++l) {
      direct[l] += o.direct[l];
      decode[l] += o.decode[l];
    }
    rows += o.rows;
    open_entries += o.open_entries;
    decoded_entries += o.decoded_entries;
    labels += o.labels;
  }
};

// <a>_k for a in [1 - k, 2k], without a division.
inline int wrap(int a, int k) { return a > k ? a - k : (a < 1 ? a + k : a); }

// Visits every size-`size` subset of [n] whose smallest element is `first`.
template <class Fn>
void for_each_subset_from(int n, int size, int first, std::vector<int>& buf, Fn&& fn) {
  buf.resize(static_cast<std::size_t>(size));
  buf[0] = first;
  if (size == 1) {
    fn(buf);
    return;
  }
  std::span<int> tail(buf.data() + 1, static_cast<std::size_t>(size - 1));
  std::iota(tail.begin(), tail.end(), 1);
  const int span_n = n - first;
  if (span_n < size - 1) return;
  std::vector<int> rel(tail.begin(), tail.end());
  do {
    for (std::size_t i = 0; i < rel.size(); ++i) tail[i] = rel[i] + first;
    fn(buf);
  } while (next_combination(rel, span_n));
}

// Rows (T, 1): every user of U_{T,1} must find the packet at exactly one of
// its L connected nodes. For g = 1 the caching nodes T[h] + h(L-1) never
// wrap, and the h-th run of U is the L users ending at the h-th node.
void rows_with_first(const LevelParams& p, int first, OrbitTally& tally) {
  const int k = p.k();
  const int t = p.t();
  const int level = p.level();
  std::vector<char> holds(static_cast<std::size_t>(k) + 1, 0);
  std::vector<int> nodes(static_cast<std::size_t>(t));
  std::vector<int> buf;
  for_each_subset_from(p.k_prime(), t, first, buf, [&](const std::vector<int>& tee) {
    for (int h = 0; h < t; ++h) {
      nodes[static_cast<std::size_t>(h)] = tee[static_cast<std::size_t>(h)] + (h + 1) * (level - 1);
      holds[static_cast<std::size_t>(nodes[static_cast<std::size_t>(h)])] = 1;
    }
    for (int h = 0; h < t; ++h) {
      for (int user = nodes[static_cast<std::size_t>(h)] - level + 1; user <= nodes[static_cast<std::size_t>(h)]; ++user) {
        int found = 0;
        for (int l = 1; l <= level; ++l) {
          if (!holds[static_cast<std::size_t>(wrap(user + l - 1, k))]) continue;
          if (found) throw DecodeFailure("packet " + format_label(tee, 1) + " is held by two nodes connected to user " + std::to_string(user));
          found = l;
        }
        if (!found) throw DecodeFailure("user " + std::to_string(user) + " cannot reach packet " + format_label(tee, 1));
        ++tally.direct[static_cast<std::size_t>(found - 1)];
      }
    }
    for (int c : nodes) holds[static_cast<std::size_t>(c)] = 0;
    ++tally.rows;
    tally.open_entries += static_cast<std::uint64_t>(k - t * level);
  });
}

// Labels (T', 1), walked depth-first over T'. Constituent u is row
// (T' \ {T'[u]}, 1), delivered to user psi^{-1}. T'[i] sits at position
// i + 1 of rows missing a later element (node later(i)) and at position i of
// rows missing an earlier one (node earlier(i)). Bit u of the node tables
// marks that the node caches constituent u; each table has one writer per
// node because later(i) and earlier(i) are increasing in i.
class LabelWalker {
 public:
  using Mask = std::uint64_t;

  LabelWalker(const LevelParams& p, OrbitTally& tally)
      : k_(p.k()), k_prime_(p.k_prime()), width_(p.t() + 1), level_(p.level()), tally_(tally) {
    if (width_ > 64) throw ResourceLimit("streamed simulation supports t <= 63");
    all_ = width_ == 64 ? ~Mask{0} : (Mask{1} << width_) - 1;
    plus_.resize(static_cast<std::size_t>(width_));
    from_later_.assign(static_cast<std::size_t>(k_) + 1, 0);
    from_earlier_.assign(static_cast<std::size_t>(k_) + 1, 0);
  }

  void run(int first) { descend(0, first, first); }

 private:
  void descend(int i, int lo, int hi) {
    for (int x = lo; x <= hi; ++x) {
      plus_[static_cast<std::size_t>(i)] = x;
      const Mask below = (Mask{1} << i) - 1;
      const int later = x + (i + 1) * (level_ - 1);
      const int earlier = x + i * (level_ - 1);
      if (i + 1 < width_) from_later_[static_cast<std::size_t>(later)] = all_ & ~(below | (Mask{1} << i));
      if (i > 0) from_earlier_[static_cast<std::size_t>(earlier)] = below;
      if (i + 1 < width_) {
        descend(i + 1, x + 1, k_prime_ - width_ + i + 2);
      } else {
        visit();
      }
      if (i + 1 < width_) from_later_[static_cast<std::size_t>(later)] = 0;
      if (i > 0) from_earlier_[static_cast<std::size_t>(earlier)] = 0;
    }
  }

  Mask rows_at(int node) const { return from_later_[static_cast<std::size_t>(node)] | from_earlier_[static_cast<std::size_t>(node)]; }

  void visit() {
    int previous = 0;
    for (int v = 0; v < width_; ++v) {
      const int user = plus_[static_cast<std::size_t>(v)] + v * (level_ - 1);  // psi^{-1} of T'[v] for g = 1
      if (user <= previous) fail("reaches one user twice");
      previous = user;
      const Mask own = Mask{1} << v;
      // the receiver must not already reach its own packet
      for (int l = 0; l < level_; ++l)
        if (rows_at(wrap(user + l, k_)) & own) fail("is delivered to user " + std::to_string(user) + " who already reads it");
      const Mask lower = own - 1;
      const Mask upper = all_ & ~(lower | own);
      const int hi = wrap(user + level_ - 1, k_);
      if ((rows_at(user) & lower) != lower) fail("has side packets missing at node " + std::to_string(user));
      if ((rows_at(hi) & upper) != upper) fail("has side packets missing at node " + std::to_string(hi));
      if (lower) ++tally_.decode[0];
      if (upper) ++tally_.decode[static_cast<std::size_t>(level_ - 1)];
    }
    tally_.decoded_entries += static_cast<std::uint64_t>(width_);
    ++tally_.labels;
  }

  [[noreturn]] void fail(const std::string& what) const { throw DecodeFailure("label " + format_label(plus_, 1) + " " + what); }

  int k_, k_prime_, width_, level_;
  Mask all_ = 0;
  OrbitTally& tally_;
  std::vector<int> plus_;
  std::vector<Mask> from_later_, from_earlier_;
};

}  // namespace

CostBreakdown simulate_orbit(const LevelParams& p, const SystemConfig& cfg, ExecPolicy policy) {
  check_matches(p, cfg);
  const int k = p.k();
  const int levels = p.level();
  const int row_firsts = p.k_prime() - p.t() + 1;
  const int label_firsts = p.k_prime() - p.t();
  const int jobs = row_firsts + std::max(label_firsts, 0);

  std::vector<OrbitTally> parts(static_cast<std::size_t>(jobs), OrbitTally(levels));
  [[maybe_unused]] const bool parallel = policy == ExecPolicy::Parallel;
#if defined(MACC_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int job = 0; job < jobs; ++job) {
    OrbitTally& part = parts[static_cast<std::size_t>(job)];
    try {
      if (job < row_firsts) {
        rows_with_first(p, job + 1, part);
      } else {
        LabelWalker(p, part).run(job - row_firsts + 1);
      }
    } catch (...) {
      part.error = std::current_exception();
    }
  }

  OrbitTally total(levels);
  for (const OrbitTally& part : parts) {
    if (part.error) std::rethrow_exception(part.error);
    total.merge(part);
  }
  if (total.rows != binomial(p.k_prime(), p.t()) || total.labels != binomial(p.k_prime(), p.t() + 1))
    throw DecodeFailure("orbit enumeration miscounted rows or labels");
  // Every open (row, user) entry of the block must be served by exactly one label.
  if (total.open_entries != total.decoded_entries)
    throw DecodeFailure("block g=1 has " + std::to_string(total.open_entries) + " undelivered entries but labels serve " +
                        std::to_string(total.decoded_entries));

  const auto kk = static_cast<std::uint64_t>(k);
  CostBreakdown out;
  out.direct_per_level.resize(static_cast<std::size_t>(levels));
  out.decode_per_level.resize(static_cast<std::size_t>(levels));
  Rational direct = 0, decode = 0;
  for (std::size_t l = 0; l < static_cast<std::size_t>(levels); ++l) {
    out.direct_per_level[l] = total.direct[l] * kk;
    out.decode_per_level[l] = total.decode[l] * kk;
    direct += cfg.mu[l] * Rational(out.direct_per_level[l]);
    decode += cfg.mu[l] * Rational(out.decode_per_level[l]);
  }
  out.broadcast_packets = total.labels * kk;
  out.f = total.rows * kk;
  const Rational f(out.f);
  out.broadcast_cost = cfg.rho * Rational(out.broadcast_packets) / f;
  out.direct_cost = direct / f;
  out.decode_cost = decode / f;
  out.total_cost = out.broadcast_cost + out.direct_cost + out.decode_cost;
  return out;
}

}  // namespace macc
