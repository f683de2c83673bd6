#pragma once

// Interaction-graph topologies and their spectral / metric properties.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egc/cipher.hpp"

namespace egc::graph {

enum class Variant { baseline, random3regular, poor_expander, irregular34, custom };

std::string to_string(Variant v);
/// Accepts "baseline", "random", "random3regular", "poor", "poor_expander",
/// "irregular", "irregular34". Throws ParameterError otherwise.
Variant parse_variant(const std::string& name);

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed read-sets: vertex i's update reads itself plus read_sets[i].
struct GraphTopology {
  int n = 0;
  Variant variant = Variant::custom;
  std::optional<std::uint64_t> seed;
  std::vector<std::vector<int>> read_sets;

  /// Undirected simple graph: duplicate edges collapsed, self-loops dropped.
  std::vector<std::vector<int>> symmetrized() const;
  /// Reverse of every read edge (who reads vertex i).
  GraphTopology transposed() const;
  /// Space-separated "u v" lines of the symmetrized edge set, u < v.
  std::string edge_list() const;
};

/// Circulant graph where vertex i reads (i + o) mod n for every offset o.
GraphTopology circulant(int n, const std::vector<int>& offsets);

/// Builds one of the four analysis variants. `baseline` uses the cipher's
/// scaled offsets; `poor_expander` uses {-1,+1,+2}; `random3regular` is a
/// configuration-model draw (seed required, <= 1000 rejections);
/// `irregular34` adds a read of (i + n/2) to every even vertex.
GraphTopology build_topology(Variant variant, int n, std::optional<std::uint64_t> seed = std::nullopt);

struct SpectralReport {
  /// Algebraic connectivity mu_2 of the Laplacian D - A of the symmetrized
  /// graph (for a d-regular graph, d * (1 - lambda_2 of A/d)).
  double spectral_gap = 0.0;
  /// 1 - |second-largest eigenvalue| of D^{-1/2} A D^{-1/2}.
  double normalized_gap = 0.0;
  int diameter = 0;
  bool connected = false;
  double mixing_bound_ln = 0.0;
  double mixing_bound_log2 = 0.0;
  double average_path_length = 0.0;
  std::vector<double> laplacian_eigenvalues;   // ascending
  std::vector<double> normalized_eigenvalues;  // descending
};

/// Dense eigen-decomposition (n <= 256). A disconnected graph reports gap 0
/// and connected = false.
SpectralReport spectral_gap(const GraphTopology& g);

/// All-pairs BFS on the symmetrized graph; throws GraphError if disconnected.
int diameter(const GraphTopology& g);
double average_path_length(const GraphTopology& g);

struct MixingBound {
  double ln = 0.0;
  double log2 = 0.0;
};

/// log(n) / gap in both bases; throws ParameterError when gap <= 0.
MixingBound mixing_time_bound(int n, double gap);

}  // namespace egc::graph
