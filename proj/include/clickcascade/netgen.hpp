#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace clickcascade::netgen {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected simple graph with sorted adjacency lists. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Throws InvalidInput on self-loops, duplicate edges or out-of-range nodes.
  static Graph from_edges(std::size_t n_nodes, std::span<const Edge> edges);

  std::size_t n_nodes() const noexcept { return adjacency_.size(); }
  std::size_t n_edges() const noexcept { return n_edges_; }
  std::span<const std::size_t> neighbors(std::size_t node) const { return adjacency_.at(node); }
  std::size_t degree(std::size_t node) const { return adjacency_.at(node).size(); }
  bool has_edge(std::size_t a, std::size_t b) const;

  /// Every edge once as (i, j) with i < j, in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t n_edges_ = 0;
};

struct ErdosRenyi {
  double p = 0.0;
};

struct BarabasiAlbert {
  std::size_t m = 1;
};

struct StochasticBlock {
  std::vector<std::size_t> block_sizes;
  std::vector<std::vector<double>> block_matrix;
};

using Topology = std::variant<ErdosRenyi, BarabasiAlbert, StochasticBlock>;

struct GraphSpec {
  Topology topology;
  std::size_t n_nodes = 0;
  std::uint64_t seed = 0;
};

/// Throws InvalidInput when the spec violates its topology's constraints.
void validate(const GraphSpec& spec);

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Starts from a complete graph on m + 1 nodes; every later node attaches to
/// m distinct nodes drawn with probability proportional to degree.
Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

Graph sbm(std::span<const std::size_t> block_sizes,
          const std::vector<std::vector<double>>& block_matrix, std::uint64_t seed);

Graph generate(const GraphSpec& spec);

/// 2E / (n (n - 1)). Throws InvalidInput for fewer than two nodes.
double density(const Graph& graph);

/// Edge-list text: a `n=<count>` header, then one `i j` line per edge, i < j.
void write_edge_list(std::ostream& out, const Graph& graph);
Graph read_edge_list(std::istream& in);

}  // namespace clickcascade::netgen
