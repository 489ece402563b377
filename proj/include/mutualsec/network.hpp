#pragma once

// AS collections as traffic matrices: validated storage, canonical topology
// generators, traffic aggregates and the critical-traffic structure that
// drives every incentive constraint.
//
// Indexing is 0-based throughout the library. The CLI and the file readers
// convert from the 1-based labels used in configs and edge lists.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mutualsec/exec.hpp"

namespace mutualsec {

using AsIndex = std::size_t;

// Relative tolerance used when two critical-traffic values are compared for
// equality (argmin sets, MCT violations). Integer-valued inputs are exact.
inline constexpr double kTrafficTieTolerance = 1e-12;

class TrafficMatrix {
 public:
  // Zero traffic between n ASs. Requires n >= 2.
  explicit TrafficMatrix(std::size_t n);
  // Row-major n*n rates; rates[i*n + j] is the rate sent from i to j.
  TrafficMatrix(std::size_t n, std::vector<double> rates);

  std::size_t size() const noexcept { return n_; }
  double operator()(AsIndex from, AsIndex to) const noexcept { return rates_[from * n_ + to]; }
  void set(AsIndex from, AsIndex to, double rate);
  void set_symmetric(AsIndex a, AsIndex b, double rate) {
    set(a, b, rate);
    set(b, a, rate);
  }

  std::span<const double> row(AsIndex from) const noexcept {
    return {rates_.data() + from * n_, n_};
  }
  const std::vector<double>& rates() const noexcept { return rates_; }

  // Sum of all rates.
  double total() const noexcept;
  bool symmetric() const noexcept;

  friend bool operator==(const TrafficMatrix&, const TrafficMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> rates_;
};

// Ordered set of AS indices drawn from a universe of n ASs.
class Subset {
 public:
  Subset() = default;
  Subset(std::size_t universe, std::vector<AsIndex> members);

  static Subset all(std::size_t universe);
  static Subset none(std::size_t universe) { return Subset(universe, {}); }
  // Bit k of mask selects AS k. Requires universe <= 64.
  static Subset from_mask(std::size_t universe, std::uint64_t mask);

  std::size_t universe() const noexcept { return universe_; }
  const std::vector<AsIndex>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(AsIndex i) const noexcept { return i < flags_.size() && flags_[i] != 0; }
  bool is_full() const noexcept { return members_.size() == universe_; }

  // Members not listed in `removed`.
  Subset without(std::span<const AsIndex> removed) const;
  std::uint64_t mask() const;

  // 1-based labels, e.g. "{3,4,5,6}".
  std::string label() const;

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.universe_ == b.universe_ && a.members_ == b.members_;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<AsIndex> members_;
  std::vector<char> flags_;
};

struct TrafficAggregates {
  std::vector<double> outbound;  // mu_i, row sums
  std::vector<double> inbound;   // nu_i, column sums
};

TrafficAggregates aggregates(const TrafficMatrix& tm);

// Inbound traffic of AS i that originates inside p. Throws if i is not in p.
double inbound_within(const TrafficMatrix& tm, const Subset& p, AsIndex i);

struct CriticalTraffic {
  double value = 0.0;
  std::vector<AsIndex> critical;  // every member attaining the minimum
};

// Minimum over members of p of inbound_within. Throws on an empty subset.
CriticalTraffic critical_traffic(const TrafficMatrix& tm, const Subset& p);

struct MctReport {
  bool holds = true;
  double full_critical = 0.0;
  // Most violating proper subset: largest critical traffic, then largest,
  // then lexicographically smallest. Empty optional when the property holds.
  std::optional<Subset> witness;
  double witness_critical = 0.0;
  std::uint64_t subsets_checked = 0;
};

inline constexpr std::size_t kDefaultMctLimit = 20;

// Exhaustive check of the maximal-critical-traffic property over all
// nonempty proper subsets. Throws when size() exceeds `limit`.
MctReport has_mct(const TrafficMatrix& tm, std::size_t limit = kDefaultMctLimit,
                  Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Topology generators. Generated edges carry the same rate in both directions.

namespace topology {

struct Complete {
  std::size_t n;
  double lambda0;
};

// Each AS is linked to its d nearest neighbours on a ring. An even d links
// d/2 neighbours on each side; an odd d additionally links the antipodal AS
// and therefore needs an even n.
struct RingLattice {
  std::size_t n;
  std::size_t d;
  double lambda0;
};

struct Line {
  std::size_t n;
  double lambda0;
};

// AS 0 is the hub.
struct Star {
  std::size_t n;
  double lambda0;
};

// `core` fully connected core ASs (indices 0..core-1) with `per_core`
// degree-one periphery ASs attached to each; periphery AS core + k*per_core + m
// hangs off core AS k. Requires core > 2 and per_core < core.
struct CorePeriphery {
  std::size_t core;
  std::size_t per_core;
  double lambda0;
};

struct Edge {
  AsIndex a;
  AsIndex b;
  double rate;
  bool directed = false;  // true: only a -> b
};

struct EdgeList {
  std::size_t n;
  std::vector<Edge> edges;
};

struct RawMatrix {
  std::size_t n;
  std::vector<double> rates;
};

using Spec = std::variant<Complete, RingLattice, Line, Star, CorePeriphery, EdgeList, RawMatrix>;

}  // namespace topology

TrafficMatrix generate(const topology::Spec& spec);

inline TrafficMatrix complete_graph(std::size_t n, double lambda0) {
  return generate(topology::Complete{n, lambda0});
}
inline TrafficMatrix ring_lattice(std::size_t n, std::size_t d, double lambda0) {
  return generate(topology::RingLattice{n, d, lambda0});
}
inline TrafficMatrix line_graph(std::size_t n, double lambda0) {
  return generate(topology::Line{n, lambda0});
}
inline TrafficMatrix star_graph(std::size_t n, double lambda0) {
  return generate(topology::Star{n, lambda0});
}
inline TrafficMatrix core_periphery(std::size_t core, std::size_t per_core, double lambda0) {
  return generate(topology::CorePeriphery{core, per_core, lambda0});
}
inline TrafficMatrix from_edges(std::size_t n, std::vector<topology::Edge> edges) {
  return generate(topology::EdgeList{n, std::move(edges)});
}

// Core AS indices of a restricted core-periphery collection.
Subset core_set(std::size_t core, std::size_t per_core);

}  // namespace mutualsec
