#include "mutualsec/network.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "mutualsec/error.hpp"

namespace mutualsec {

namespace {

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw InvalidArgument("traffic rates must be finite and nonnegative");
  }
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTrafficTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TrafficMatrix::TrafficMatrix(std::size_t n) : n_(n), rates_(n * n, 0.0) {
  if (n < 2) throw InvalidArgument("an AS collection needs at least 2 ASs");
}

TrafficMatrix::TrafficMatrix(std::size_t n, std::vector<double> rates) : n_(n), rates_(std::move(rates)) {
  if (n < 2) throw InvalidArgument("an AS collection needs at least 2 ASs");
  if (rates_.size() != n * n) throw InvalidArgument("traffic matrix must have n*n entries");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      check_rate(rates_[i * n + j]);
    }
    if (rates_[i * n + i] != 0.0) throw InvalidArgument("self-traffic must be zero");
  }
}

void TrafficMatrix::set(AsIndex from, AsIndex to, double rate) {
  if (from >= n_ || to >= n_) throw InvalidArgument("AS index out of range");
  check_rate(rate);
  if (from == to && rate != 0.0) throw InvalidArgument("self-traffic must be zero");
  rates_[from * n_ + to] = rate;
}

double TrafficMatrix::total() const noexcept {
  double s = 0.0;
  for (double r : rates_) s += r;
  return s;
}

bool TrafficMatrix::symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

// ---------------------------------------------------------------------------

Subset::Subset(std::size_t universe, std::vector<AsIndex> members)
    : universe_(universe), members_(std::move(members)), flags_(universe, 0) {
  std::sort(members_.begin(), members_.end());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k] >= universe_) throw InvalidArgument("subset member out of range");
    if (k > 0 && members_[k] == members_[k - 1]) throw InvalidArgument("duplicate subset member");
    flags_[members_[k]] = 1;
  }
}

Subset Subset::all(std::size_t universe) {
  std::vector<AsIndex> m(universe);
  for (std::size_t i = 0; i < universe; ++i) m[i] = i;
  return Subset(universe, std::move(m));
}

Subset Subset::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > 64) throw InvalidArgument("mask subsets support at most 64 ASs");
  std::vector<AsIndex> m;
  m.reserve(static_cast<std::size_t>(std::popcount(mask)));
  for (std::size_t i = 0; i < universe; ++i)
    if ((mask >> i) & 1u) m.push_back(i);
  if (universe < 64 && (mask >> universe) != 0) throw InvalidArgument("mask selects ASs outside the universe");
  return Subset(universe, std::move(m));
}

Subset Subset::without(std::span<const AsIndex> removed) const {
  std::vector<AsIndex> keep;
  keep.reserve(members_.size());
  for (AsIndex i : members_)
    if (std::find(removed.begin(), removed.end(), i) == removed.end()) keep.push_back(i);
  return Subset(universe_, std::move(keep));
}

std::uint64_t Subset::mask() const {
  if (universe_ > 64) throw InvalidArgument("mask subsets support at most 64 ASs");
  std::uint64_t m = 0;
  for (AsIndex i : members_) m |= std::uint64_t{1} << i;
  return m;
}

std::string Subset::label() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) os << ',';
    os << members_[k] + 1;
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------

TrafficAggregates aggregates(const TrafficMatrix& tm) {
  const std::size_t n = tm.size();
  TrafficAggregates agg{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      agg.outbound[i] += tm(i, j);
      agg.inbound[j] += tm(i, j);
    }
  }
  return agg;
}

double inbound_within(const TrafficMatrix& tm, const Subset& p, AsIndex i) {
  if (p.universe() != tm.size()) throw InvalidArgument("subset universe does not match the traffic matrix");
  if (!p.contains(i)) throw InvalidArgument("AS " + std::to_string(i + 1) + " is not a member of " + p.label());
  double s = 0.0;
  for (AsIndex k : p.members()) s += tm(k, i);
  return s;
}

CriticalTraffic critical_traffic(const TrafficMatrix& tm, const Subset& p) {
  if (p.empty()) throw InvalidArgument("critical traffic of an empty subset is undefined");
  std::vector<double> within(p.size());
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) {
    within[k] = inbound_within(tm, p, p.members()[k]);
    lowest = std::min(lowest, within[k]);
  }
  CriticalTraffic ct{lowest, {}};
  for (std::size_t k = 0; k < p.size(); ++k)
    if (nearly_equal(within[k], lowest)) ct.critical.push_back(p.members()[k]);
  return ct;
}

// ---------------------------------------------------------------------------
// MCT enumeration kernel

namespace {

struct Candidate {
  std::uint64_t mask = 0;
  double critical = -std::numeric_limits<double>::infinity();
};

// Total order used to pick the witness; true when a is preferred over b.
bool prefer(const Candidate& a, const Candidate& b) {
  if (a.critical != b.critical) return a.critical > b.critical;
  int pa = std::popcount(a.mask), pb = std::popcount(b.mask);
  if (pa != pb) return pa > pb;
  // Lexicographically smaller member list: the lowest differing bit belongs to it.
  std::uint64_t diff = a.mask ^ b.mask;
  if (diff == 0) return false;
  std::uint64_t low = diff & (~diff + 1);
  return (a.mask & low) != 0;
}

double mask_critical(const std::vector<double>& columns, std::size_t n, std::uint64_t mask) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(m));
    const double* col = columns.data() + i * n;
    double s = 0.0;
    for (std::uint64_t r = mask; r != 0; r &= r - 1) s += col[std::countr_zero(r)];
    lowest = std::min(lowest, s);
  }
  return lowest;
}

}  // namespace

MctReport has_mct(const TrafficMatrix& tm, std::size_t limit, Exec exec) {
  const std::size_t n = tm.size();
  if (n > limit || n > 62) {
    throw InvalidArgument("MCT check enumerates 2^N subsets; N=" + std::to_string(n) +
                          " exceeds the limit of " + std::to_string(limit));
  }
  // Column-major copy so that inbound sums walk contiguous memory.
  std::vector<double> columns(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) columns[i * n + k] = tm(k, i);

  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  const double full_critical = mask_critical(columns, n, full);
  const double threshold = full_critical + kTrafficTieTolerance * std::max(1.0, std::abs(full_critical));

  Candidate best;
  const auto last = static_cast<std::int64_t>(full);  // masks 1 .. full-1

  if (exec == Exec::serial) {
    for (std::int64_t m = 1; m < last; ++m) {
      Candidate c{static_cast<std::uint64_t>(m), mask_critical(columns, n, static_cast<std::uint64_t>(m))};
      if (c.critical > threshold && prefer(c, best)) best = c;
    }
  } else {
#pragma omp parallel num_threads(thread_count())
    {
      Candidate local;
#pragma omp for schedule(dynamic, 1024) nowait
      for (std::int64_t m = 1; m < last; ++m) {
        Candidate c{static_cast<std::uint64_t>(m), mask_critical(columns, n, static_cast<std::uint64_t>(m))};
        if (c.critical > threshold && prefer(c, local)) local = c;
      }
#pragma omp critical(mutualsec_mct_reduce)
      {
        if (local.mask != 0 && prefer(local, best)) best = local;
      }
    }
  }

  MctReport report;
  report.full_critical = full_critical;
  report.subsets_checked = full - 1;
  if (best.mask != 0) {
    report.holds = false;
    report.witness = Subset::from_mask(n, best.mask);
    report.witness_critical = best.critical;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

void require_lambda(double lambda0) {
  if (!std::isfinite(lambda0) || lambda0 < 0.0) throw InvalidArgument("lambda0 must be finite and nonnegative");
}

TrafficMatrix build(const topology::Complete& s) {
  require_lambda(s.lambda0);
  TrafficMatrix tm(s.n);
  for (std::size_t i = 0; i < s.n; ++i)
    for (std::size_t j = i + 1; j < s.n; ++j) tm.set_symmetric(i, j, s.lambda0);
  return tm;
}

TrafficMatrix build(const topology::RingLattice& s) {
  require_lambda(s.lambda0);
  if (s.n < 3) throw InvalidArgument("ring lattice needs at least 3 ASs");
  if (s.d < 2 || s.d >= s.n) throw InvalidArgument("ring lattice degree d must satisfy 2 <= d < N");
  if (s.d % 2 == 1 && s.n % 2 == 1) throw InvalidArgument("ring lattice with odd degree d needs an even N");
  TrafficMatrix tm(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t k = 1; k <= s.d / 2; ++k) tm.set_symmetric(i, (i + k) % s.n, s.lambda0);
    if (s.d % 2 == 1) tm.set_symmetric(i, (i + s.n / 2) % s.n, s.lambda0);
  }
  return tm;
}

TrafficMatrix build(const topology::Line& s) {
  require_lambda(s.lambda0);
  TrafficMatrix tm(s.n);
  for (std::size_t i = 0; i + 1 < s.n; ++i) tm.set_symmetric(i, i + 1, s.lambda0);
  return tm;
}

TrafficMatrix build(const topology::Star& s) {
  require_lambda(s.lambda0);
  TrafficMatrix tm(s.n);
  for (std::size_t i = 1; i < s.n; ++i) tm.set_symmetric(0, i, s.lambda0);
  return tm;
}

TrafficMatrix build(const topology::CorePeriphery& s) {
  require_lambda(s.lambda0);
  if (s.core <= 2) throw InvalidArgument("core-periphery needs more than 2 core ASs (K > 2)");
  if (s.per_core >= s.core) throw InvalidArgument("core-periphery needs l < K");
  const std::size_t n = (1 + s.per_core) * s.core;
  TrafficMatrix tm(n);
  for (std::size_t i = 0; i < s.core; ++i)
    for (std::size_t j = i + 1; j < s.core; ++j) tm.set_symmetric(i, j, s.lambda0);
  for (std::size_t k = 0; k < s.core; ++k)
    for (std::size_t m = 0; m < s.per_core; ++m) tm.set_symmetric(k, s.core + k * s.per_core + m, s.lambda0);
  return tm;
}

TrafficMatrix build(const topology::EdgeList& s) {
  TrafficMatrix tm(s.n);
  for (const auto& e : s.edges) {
    if (e.a >= s.n || e.b >= s.n) throw InvalidArgument("edge endpoint out of range");
    if (e.a == e.b) throw InvalidArgument("self-loops are not allowed");
    check_rate(e.rate);
    if (e.directed) {
      tm.set(e.a, e.b, e.rate);
    } else {
      tm.set_symmetric(e.a, e.b, e.rate);
    }
  }
  return tm;
}

TrafficMatrix build(const topology::RawMatrix& s) { return TrafficMatrix(s.n, s.rates); }

}  // namespace

TrafficMatrix generate(const topology::Spec& spec) {
  return std::visit([](const auto& s) { return build(s); }, spec);
}

Subset core_set(std::size_t core, std::size_t per_core) {
  std::vector<AsIndex> m(core);
  for (std::size_t i = 0; i < core; ++i) m[i] = i;
  return Subset((1 + per_core) * core, std::move(m));
}

}  // namespace mutualsec
