#include "egc/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "egc/rng.hpp"

namespace egc::graph {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::random3regular: return "random3regular";
    case Variant::poor_expander: return "poor_expander";
    case Variant::irregular34: return "irregular34";
    case Variant::custom: return "custom";
  }
  return "custom";
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "random" || name == "random3regular") return Variant::random3regular;
  if (name == "poor" || name == "poor_expander") return Variant::poor_expander;
  if (name == "irregular" || name == "irregular34") return Variant::irregular34;
  throw ParameterError("unknown graph variant '" + name + "'");
}

std::vector<std::vector<int>> GraphTopology::symmetrized() const {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j : read_sets[static_cast<std::size_t>(i)]) {
      if (i == j) continue;
      adj[static_cast<std::size_t>(i)].insert(j);
      adj[static_cast<std::size_t>(j)].insert(i);
    }
  }
  std::vector<std::vector<int>> out;
  out.reserve(adj.size());
  for (auto& s : adj) out.emplace_back(s.begin(), s.end());
  return out;
}

GraphTopology GraphTopology::transposed() const {
  GraphTopology t;
  t.n = n;
  t.variant = variant;
  t.seed = seed;
  t.read_sets.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j : read_sets[static_cast<std::size_t>(i)]) t.read_sets[static_cast<std::size_t>(j)].push_back(i);
  }
  return t;
}

std::string GraphTopology::edge_list() const {
  std::ostringstream os;
  const auto adj = symmetrized();
  for (int u = 0; u < n; ++u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (u < v) os << u << ' ' << v << '\n';
    }
  }
  return os.str();
}

GraphTopology circulant(int n, const std::vector<int>& offsets) {
  GraphTopology g;
  g.n = n;
  g.read_sets.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int o : offsets) g.read_sets[static_cast<std::size_t>(i)].push_back(((i + o) % n + n) % n);
  }
  return g;
}

namespace {

constexpr int kConfigurationRetries = 1000;

GraphTopology random_regular(int n, int degree, std::uint64_t seed) {
  if ((n * degree) % 2 != 0) throw ParameterError("random regular graph needs n * d even");
  RngConfig cfg{seed, 1};
  for (int attempt = 0; attempt < kConfigurationRetries; ++attempt) {
    auto rng = cfg.stream(0x52414E44ULL, static_cast<std::uint64_t>(attempt));
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n * degree));
    for (int v = 0; v < n; ++v) {
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    }
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::swap(stubs[i - 1], stubs[uniform_below(rng, i)]);
    }
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      const int u = stubs[i];
      const int v = stubs[i + 1];
      if (u == v || adj[static_cast<std::size_t>(u)].count(v)) {
        ok = false;
      } else {
        adj[static_cast<std::size_t>(u)].insert(v);
        adj[static_cast<std::size_t>(v)].insert(u);
      }
    }
    if (!ok) continue;
    GraphTopology g;
    g.n = n;
    g.variant = Variant::random3regular;
    g.seed = seed;
    for (auto& s : adj) g.read_sets.emplace_back(s.begin(), s.end());
    return g;
  }
  throw GraphError("configuration model failed after " + std::to_string(kConfigurationRetries) + " attempts");
}

std::vector<std::vector<int>> bfs_distances(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> dist(adj.size(), std::vector<int>(adj.size(), -1));
  for (int s = 0; s < n; ++s) {
    auto& d = dist[static_cast<std::size_t>(s)];
    std::queue<int> q;
    d[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (d[static_cast<std::size_t>(v)] < 0) {
          d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
  }
  return dist;
}

}  // namespace

GraphTopology build_topology(Variant variant, int n, std::optional<std::uint64_t> seed) {
  if (n < 8) throw ParameterError("graph needs n >= 8");
  GraphTopology g;
  switch (variant) {
    case Variant::baseline: {
      const Offsets o = scaled_offsets(n);
      g = circulant(n, {o[0], o[1], o[2]});
      break;
    }
    case Variant::poor_expander:
      g = circulant(n, {-1, +1, +2});
      break;
    case Variant::random3regular:
      if (!seed) throw ParameterError("random 3-regular graph needs a seed");
      return random_regular(n, 3, *seed);
    case Variant::irregular34: {
      const Offsets o = scaled_offsets(n);
      g = circulant(n, {o[0], o[1], o[2]});
      for (int i = 0; i < n; i += 2) g.read_sets[static_cast<std::size_t>(i)].push_back((i + n / 2) % n);
      break;
    }
    case Variant::custom:
      throw ParameterError("custom topologies are built with circulant()");
  }
  g.variant = variant;
  return g;
}

int diameter(const GraphTopology& g) {
  const auto dist = bfs_distances(g.symmetrized());
  int d = 0;
  for (const auto& row : dist) {
    for (int x : row) {
      if (x < 0) throw GraphError("graph is disconnected");
      d = std::max(d, x);
    }
  }
  return d;
}

double average_path_length(const GraphTopology& g) {
  const auto dist = bfs_distances(g.symmetrized());
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t u = 0; u < dist.size(); ++u) {
    for (std::size_t v = 0; v < dist.size(); ++v) {
      if (u == v) continue;
      if (dist[u][v] < 0) throw GraphError("graph is disconnected");
      sum += dist[u][v];
      ++pairs;
    }
  }
  return pairs ? sum / static_cast<double>(pairs) : 0.0;
}

MixingBound mixing_time_bound(int n, double gap) {
  if (!(gap > 0.0)) throw ParameterError("mixing-time bound needs a positive spectral gap");
  return {std::log(static_cast<double>(n)) / gap, std::log2(static_cast<double>(n)) / gap};
}

SpectralReport spectral_gap(const GraphTopology& g) {
  if (g.n > 256) throw ParameterError("dense spectral analysis supports n <= 256");
  const auto adj = g.symmetrized();
  const int n = g.n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v : adj[static_cast<std::size_t>(u)]) a(u, v) = 1.0;
  }
  const Eigen::VectorXd deg = a.rowwise().sum();

  SpectralReport rep;
  const Eigen::MatrixXd lap = Eigen::MatrixXd(deg.asDiagonal()) - a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lap_solver(lap, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lap_ev = lap_solver.eigenvalues();
  rep.laplacian_eigenvalues.assign(lap_ev.data(), lap_ev.data() + lap_ev.size());

  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  const Eigen::MatrixXd norm = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> norm_solver(norm, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd norm_ev = norm_solver.eigenvalues();
  rep.normalized_eigenvalues.assign(norm_ev.data(), norm_ev.data() + norm_ev.size());
  std::sort(rep.normalized_eigenvalues.rbegin(), rep.normalized_eigenvalues.rend());

  const auto dist = bfs_distances(adj);
  rep.connected = std::all_of(dist.begin(), dist.end(),
                              [](const auto& row) { return std::all_of(row.begin(), row.end(), [](int x) { return x >= 0; }); });
  if (!rep.connected) return rep;

  rep.spectral_gap = n > 1 ? rep.laplacian_eigenvalues[1] : 0.0;
  rep.normalized_gap = n > 1 ? 1.0 - std::abs(rep.normalized_eigenvalues[1]) : 0.0;
  rep.diameter = diameter(g);
  rep.average_path_length = average_path_length(g);
  if (rep.spectral_gap > 0.0) {
    const auto mb = mixing_time_bound(n, rep.spectral_gap);
    rep.mixing_bound_ln = mb.ln;
    rep.mixing_bound_log2 = mb.log2;
  }
  return rep;
}

}  // namespace egc::graph
