#pragma once

// Truncated differential / linear trail bounds.
//
// On binary variables the activation constraints force
//   s_F(r,i)   = OR of R_r over vertex i's read-set (including i),
//   L_{r+1}    = R_r,
//   R_{r+1}(i) = L_r(i) OR s_F(r,i),
// so every starting pattern has exactly one feasible trace. OR-propagation is
// monotone in the start, hence minimal starts carry one active bit per branch
// the boundary condition requires; the minimum is found by enumerating them.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "egc/graph.hpp"

namespace egc::trails {

using Mask = std::uint64_t;  // one bit per vertex, n <= 64

enum class Mode { differential, linear };

std::string to_string(Mode m);
Mode parse_mode(const std::string& name);

/// Which graph direction masks follow: the cipher's forward read-sets, or
/// their transpose (mask-propagation duality).
enum class Direction { forward, transposed };

struct ActivationTrace {
  std::vector<Mask> left;    // L_0..L_rounds
  std::vector<Mask> right;   // R_0..R_rounds
  std::vector<Mask> active;  // s_F(r, .) for r = 0..rounds-1
  std::vector<int> counts;   // |s_F(r, .)|
  int total = 0;
};

/// Precomputed reader masks of a topology: readers[j] = vertices whose
/// update reads bit j.
class Propagator {
 public:
  explicit Propagator(const graph::GraphTopology& g, Direction dir = Direction::forward);

  int n() const noexcept { return n_; }
  Mask full() const noexcept { return full_; }
  Mask activate(Mask right) const noexcept;
  ActivationTrace propagate(Mask l0, Mask r0, int rounds) const;
  /// Total active count only, without storing the trace.
  int total_active(Mask l0, Mask r0, int rounds) const noexcept;

 private:
  int n_;
  Mask full_;
  std::vector<Mask> readers_;
};

ActivationTrace propagate_activation(Mask l0, Mask r0, int rounds, const graph::GraphTopology& g);

inline constexpr double kNodeWeight = 0.41503749927884381;  // -log2(3/4)

struct TrailBoundReport {
  Mode mode = Mode::differential;
  int rounds = 0;
  int min_active = 0;
  Mask start_left = 0;
  Mask start_right = 0;
  std::vector<int> per_round;  // increments of the optimal trace
  double weight_bits = 0.0;    // min_active * w_node (differential), min_active (linear)
};

/// Differential boundary: |L_0| >= 1 and |R_0| >= 1. Linear boundary:
/// |L_0| + |R_0| >= 1 with nontrivial output. Ties break on the
/// lexicographically smallest (branch, bit) start.
TrailBoundReport min_active(Mode mode, int rounds, const graph::GraphTopology& g,
                            Direction dir = Direction::forward);

/// min_active for rounds 1..max_rounds.
std::vector<TrailBoundReport> min_active_series(Mode mode, int max_rounds, const graph::GraphTopology& g,
                                                Direction dir = Direction::forward);

/// ratio[k] = counts[k+1] / counts[k].
std::vector<double> growth_rates(const std::vector<int>& counts);

double differential_weight(int count);
/// Differential: w10 + 10 * 64 * w_node. Linear: 5 * w10 (w10 = 4-round count).
double extrapolate_full(double base, Mode mode);

struct LpModel {
  std::string text;
  int variable_count = 0;
  int constraint_count = 0;
};

/// CPLEX-LP text of the activation MILP.
LpModel build_lp_model(Mode mode, int rounds, const graph::GraphTopology& g);
/// Writes the model to `path`; throws std::runtime_error on I/O failure.
LpModel emit_lp_model(Mode mode, int rounds, const graph::GraphTopology& g, const std::string& path);

struct SingleLayerReport {
  int width = 0;
  double min_weight = 0.0;
  std::uint64_t best_difference = 0;
  std::uint64_t differences_examined = 0;
  bool exhaustive = true;
  int max_hamming_weight = 0;  // set when restricted
};

/// Minimum one-layer differential weight of F_core under per-vertex DDT
/// transition costs, over nonzero input differences with nonzero output.
/// Exhaustive when 2^width - 1 <= exhaustive_limit, else restricted to input
/// differences of Hamming weight <= restricted_weight.
SingleLayerReport single_layer_min_weight(int width, Offsets offsets, std::uint16_t truth_table = kRuleATruthTable,
                                          std::uint64_t exhaustive_limit = std::uint64_t{1} << 20,
                                          int restricted_weight = 4);

}  // namespace egc::trails
