#include "egc/trails.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "egc/boolean.hpp"

namespace egc::trails {

std::string to_string(Mode m) { return m == Mode::differential ? "differential" : "linear"; }

Mode parse_mode(const std::string& name) {
  if (name == "differential" || name == "diff") return Mode::differential;
  if (name == "linear" || name == "lin") return Mode::linear;
  throw ParameterError("unknown trail mode '" + name + "'");
}

namespace {

std::vector<int> closed_read_set(const graph::GraphTopology& g, int i) {
  std::set<int> s{i};
  for (int j : g.read_sets[static_cast<std::size_t>(i)]) s.insert(j);
  return {s.begin(), s.end()};
}

}  // namespace

Propagator::Propagator(const graph::GraphTopology& g, Direction dir) : n_(g.n), full_(0) {
  if (g.n < 1 || g.n > 64) throw ParameterError("activation propagation supports 1 <= n <= 64");
  const graph::GraphTopology& src = dir == Direction::forward ? g : g.transposed();
  full_ = n_ == 64 ? ~Mask{0} : ((Mask{1} << n_) - 1);
  readers_.assign(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    for (int j : closed_read_set(src, i)) readers_[static_cast<std::size_t>(j)] |= Mask{1} << i;
  }
}

Mask Propagator::activate(Mask right) const noexcept {
  Mask s = 0;
  while (right) {
    s |= readers_[static_cast<std::size_t>(std::countr_zero(right))];
    right &= right - 1;
  }
  return s;
}

ActivationTrace Propagator::propagate(Mask l0, Mask r0, int rounds) const {
  ActivationTrace t;
  Mask l = l0 & full_;
  Mask r = r0 & full_;
  t.left.push_back(l);
  t.right.push_back(r);
  for (int k = 0; k < rounds; ++k) {
    const Mask s = activate(r);
    t.active.push_back(s);
    t.counts.push_back(std::popcount(s));
    t.total += t.counts.back();
    const Mask next_r = l | s;
    l = r;
    r = next_r;
    t.left.push_back(l);
    t.right.push_back(r);
  }
  return t;
}

int Propagator::total_active(Mask l, Mask r, int rounds) const noexcept {
  int total = 0;
  for (int k = 0; k < rounds; ++k) {
    const Mask s = activate(r);
    total += std::popcount(s);
    const Mask next_r = l | s;
    l = r;
    r = next_r;
  }
  return total;
}

ActivationTrace propagate_activation(Mask l0, Mask r0, int rounds, const graph::GraphTopology& g) {
  if (rounds < 1) throw ParameterError("rounds must be >= 1");
  return Propagator(g).propagate(l0, r0, rounds);
}

TrailBoundReport min_active(Mode mode, int rounds, const graph::GraphTopology& g, Direction dir) {
  if (rounds < 1) throw ParameterError("rounds must be >= 1");
  const Propagator prop(g, dir);
  const int n = prop.n();
  int best = std::numeric_limits<int>::max();
  Mask best_l = 0;
  Mask best_r = 0;
  auto consider = [&](Mask l, Mask r) {
    const int c = prop.total_active(l, r, rounds);
    if (c < best) {
      best = c;
      best_l = l;
      best_r = r;
    }
  };
  if (mode == Mode::differential) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) consider(Mask{1} << a, Mask{1} << b);
    }
  } else {
    // Active bits never disappear under OR-propagation, so every nonzero
    // start has nonzero output.
    for (int a = 0; a < n; ++a) consider(Mask{1} << a, 0);
    for (int b = 0; b < n; ++b) consider(0, Mask{1} << b);
  }
  TrailBoundReport rep;
  rep.mode = mode;
  rep.rounds = rounds;
  rep.min_active = best;
  rep.start_left = best_l;
  rep.start_right = best_r;
  rep.per_round = prop.propagate(best_l, best_r, rounds).counts;
  rep.weight_bits = mode == Mode::differential ? differential_weight(best) : static_cast<double>(best);
  return rep;
}

std::vector<TrailBoundReport> min_active_series(Mode mode, int max_rounds, const graph::GraphTopology& g,
                                                Direction dir) {
  std::vector<TrailBoundReport> out;
  for (int r = 1; r <= max_rounds; ++r) out.push_back(min_active(mode, r, g, dir));
  return out;
}

std::vector<double> growth_rates(const std::vector<int>& counts) {
  std::vector<double> out;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    out.push_back(counts[k - 1] > 0 ? static_cast<double>(counts[k]) / counts[k - 1] : 0.0);
  }
  return out;
}

double differential_weight(int count) {
  if (count < 0) throw ParameterError("active count must be >= 0");
  return count * kNodeWeight;
}

double extrapolate_full(double base, Mode mode) {
  if (mode == Mode::differential) return base + 10.0 * 64.0 * kNodeWeight;
  return 5.0 * base;
}

namespace {

std::string var(char kind, int r, int i) {
  return std::string(1, kind) + "_" + std::to_string(r) + "_" + std::to_string(i);
}

// Emits `terms` joined by " + ", wrapping every few terms.
void write_sum(std::ostream& os, const std::vector<std::string>& terms) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0) os << (k % 8 == 0 ? "\n   + " : " + ");
    os << terms[k];
  }
}

}  // namespace

LpModel build_lp_model(Mode mode, int rounds, const graph::GraphTopology& g) {
  if (rounds < 1) throw ParameterError("rounds must be >= 1");
  const int n = g.n;
  std::ostringstream os;
  LpModel model;
  os << "\\ Truncated " << to_string(mode) << " activation model, " << rounds << " rounds, n = " << n
     << ", graph = " << graph::to_string(g.variant) << "\n";
  os << "Minimize\n obj: ";
  std::vector<std::string> obj;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) obj.push_back(var('s', r, i));
  }
  write_sum(os, obj);
  os << "\nSubject To\n";

  int c = 0;
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      const auto inputs = closed_read_set(g, i);
      const std::string s = var('s', r, i);
      for (int j : inputs) {
        os << " act_lo_" << r << '_' << i << '_' << j << ": " << s << " - " << var('R', r, j) << " >= 0\n";
        ++c;
      }
      os << " act_hi_" << r << '_' << i << ": " << s;
      for (int j : inputs) os << " - " << var('R', r, j);
      os << " <= 0\n";
      ++c;
      os << " swap_" << r << '_' << i << ": " << var('L', r + 1, i) << " - " << var('R', r, i) << " = 0\n";
      os << " xor_l_" << r << '_' << i << ": " << var('R', r + 1, i) << " - " << var('L', r, i) << " >= 0\n";
      os << " xor_f_" << r << '_' << i << ": " << var('R', r + 1, i) << " - " << s << " >= 0\n";
      os << " xor_hi_" << r << '_' << i << ": " << var('R', r + 1, i) << " - " << var('L', r, i) << " - " << s
         << " <= 0\n";
      c += 4;
    }
  }
  std::vector<std::string> in_l;
  std::vector<std::string> in_r;
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    in_l.push_back(var('L', 0, i));
    in_r.push_back(var('R', 0, i));
    out.push_back(var('L', rounds, i));
    out.push_back(var('R', rounds, i));
  }
  if (mode == Mode::differential) {
    os << " in_left: ";
    write_sum(os, in_l);
    os << " >= 1\n in_right: ";
    write_sum(os, in_r);
    os << " >= 1\n";
    c += 2;
  } else {
    std::vector<std::string> in = in_l;
    in.insert(in.end(), in_r.begin(), in_r.end());
    os << " in_any: ";
    write_sum(os, in);
    os << " >= 1\n";
    ++c;
  }
  os << " out_any: ";
  write_sum(os, out);
  os << " >= 1\n";
  ++c;

  os << "Binary\n";
  int vars = 0;
  for (int r = 0; r <= rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      os << ' ' << var('L', r, i) << ' ' << var('R', r, i) << '\n';
      vars += 2;
    }
  }
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      os << ' ' << var('s', r, i) << '\n';
      ++vars;
    }
  }
  os << "End\n";
  model.text = os.str();
  model.variable_count = vars;
  model.constraint_count = c;
  return model;
}

LpModel emit_lp_model(Mode mode, int rounds, const graph::GraphTopology& g, const std::string& path) {
  LpModel m = build_lp_model(mode, rounds, g);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << m.text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
  return m;
}

namespace {

struct VertexCosts {
  // cost[a][b] = -log2(DDT(a,b)/16), infinity when the transition is impossible.
  std::array<std::array<double, 2>, 16> cost{};
};

VertexCosts make_costs(std::uint16_t table) {
  const auto ddt = boolean::difference_table(boolean::TruthTable16{table});
  VertexCosts vc;
  for (std::size_t a = 0; a < 16; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const int e = ddt.entries[a][b];
      vc.cost[a][b] = e > 0 ? -std::log2(e / 16.0) : std::numeric_limits<double>::infinity();
    }
  }
  return vc;
}

// Weight of one input difference, infinity if no nonzero output is possible.
double layer_weight(std::uint64_t delta, int width, const std::array<int, 3>& shifts, const VertexCosts& vc) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  bool nonzero_free = false;
  double cheapest_switch = kInf;
  for (int j = 0; j < width; ++j) {
    const auto bit = [&](int off) { return static_cast<int>((delta >> ((j + off) % width)) & 1); };
    const int a = bit(0) | (bit(shifts[0]) << 1) | (bit(shifts[1]) << 2) | (bit(shifts[2]) << 3);
    if (a == 0) continue;
    const double c0 = vc.cost[static_cast<std::size_t>(a)][0];
    const double c1 = vc.cost[static_cast<std::size_t>(a)][1];
    const double best = std::min(c0, c1);
    total += best;
    if (c1 <= c0) {
      nonzero_free = true;
    } else if (c1 < kInf) {
      cheapest_switch = std::min(cheapest_switch, c1 - c0);
    }
  }
  if (nonzero_free) return total;
  return cheapest_switch < kInf ? total + cheapest_switch : kInf;
}

}  // namespace

SingleLayerReport single_layer_min_weight(int width, Offsets offsets, std::uint16_t truth_table,
                                          std::uint64_t exhaustive_limit, int restricted_weight) {
  if (width < 4 || width > 32) throw ParameterError("single-layer search supports widths 4..32");
  const CipherParams p = CipherParams::reduced(width, offsets, 1);  // validates the offsets
  std::array<int, 3> shifts{};
  for (std::size_t k = 0; k < 3; ++k) shifts[k] = ((p.offsets[k] % width) + width) % width;
  const VertexCosts vc = make_costs(truth_table);

  SingleLayerReport rep;
  rep.width = width;
  rep.min_weight = std::numeric_limits<double>::infinity();
  const std::uint64_t space = (std::uint64_t{1} << width) - 1;
  rep.exhaustive = space <= exhaustive_limit;
  auto visit = [&](std::uint64_t delta) {
    ++rep.differences_examined;
    const double w = layer_weight(delta, width, shifts, vc);
    if (w < rep.min_weight - 1e-12) {
      rep.min_weight = w;
      rep.best_difference = delta;
    }
  };
  if (rep.exhaustive) {
    for (std::uint64_t d = 1; d <= space; ++d) visit(d);
  } else {
    if (restricted_weight < 1) throw ParameterError("restricted search needs a Hamming-weight bound >= 1");
    rep.max_hamming_weight = restricted_weight;
    // Enumerate all combinations of up to `restricted_weight` bit positions.
    std::vector<int> pos;
    auto rec = [&](auto&& self, int start, std::uint64_t acc) -> void {
      if (acc) visit(acc);
      if (static_cast<int>(pos.size()) == restricted_weight) return;
      for (int b = start; b < width; ++b) {
        pos.push_back(b);
        self(self, b + 1, acc | (std::uint64_t{1} << b));
        pos.pop_back();
      }
    };
    rec(rec, 0, 0);
  }
  return rep;
}

}  // namespace egc::trails
