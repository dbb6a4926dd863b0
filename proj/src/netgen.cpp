#include "clickcascade/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "clickcascade/error.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::netgen {

Graph Graph::from_edges(std::size_t n_nodes, std::span<const Edge> edges) {
  Graph g;
  g.adjacency_.assign(n_nodes, {});
  for (const auto& [a, b] : edges) {
    if (a >= n_nodes || b >= n_nodes)
      throw InvalidInput("graph: edge (" + std::to_string(a) + ", " + std::to_string(b) +
                         ") references a node outside [0, " + std::to_string(n_nodes) + ")");
    if (a == b) throw InvalidInput("graph: self-loop at node " + std::to_string(a));
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    auto& adj = g.adjacency_[i];
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
      throw InvalidInput("graph: duplicate edge at node " + std::to_string(i));
  }
  g.n_edges_ = edges.size();
  return g;
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency_.at(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(n_edges_);
  for (std::size_t i = 0; i < adjacency_.size(); ++i)
    for (std::size_t j : adjacency_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string(what) + " must be in [0, 1]");
}

struct Validator {
  std::size_t n;
  void operator()(const ErdosRenyi& er) const {
    if (n < 1) throw InvalidInput("erdos_renyi: need at least one node");
    check_probability(er.p, "erdos_renyi: p");
  }
  void operator()(const BarabasiAlbert& ba) const {
    if (ba.m < 1) throw InvalidInput("barabasi_albert: m must be at least 1");
    if (n < ba.m + 2)
      throw InvalidInput("barabasi_albert: need n >= m + 2 (n=" + std::to_string(n) +
                         ", m=" + std::to_string(ba.m) + ")");
  }
  void operator()(const StochasticBlock& sb) const {
    const std::size_t blocks = sb.block_sizes.size();
    if (blocks == 0) throw InvalidInput("sbm: no blocks");
    if (sb.block_matrix.size() != blocks)
      throw InvalidInput("sbm: block matrix has " + std::to_string(sb.block_matrix.size()) +
                         " rows for " + std::to_string(blocks) + " blocks");
    for (const auto& row : sb.block_matrix)
      if (row.size() != blocks) throw InvalidInput("sbm: block matrix is not square");
    for (std::size_t a = 0; a < blocks; ++a)
      for (std::size_t b = 0; b < blocks; ++b) {
        check_probability(sb.block_matrix[a][b], "sbm: block probability");
        if (sb.block_matrix[a][b] != sb.block_matrix[b][a])
          throw InvalidInput("sbm: block matrix is not symmetric");
      }
    std::size_t total = 0;
    for (std::size_t s : sb.block_sizes) total += s;
    if (n != 0 && total != n)
      throw InvalidInput("sbm: block sizes sum to " + std::to_string(total) + ", expected " +
                         std::to_string(n));
  }
};

}  // namespace

void validate(const GraphSpec& spec) { std::visit(Validator{spec.n_nodes}, spec.topology); }

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  validate({ErdosRenyi{p}, n, seed});
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  validate({BarabasiAlbert{m}, n, seed});
  Rng rng(seed);
  std::vector<Edge> edges;
  // Each node appears once per incident edge, so a uniform pick is a
  // degree-proportional pick.
  std::vector<std::size_t> endpoints;
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = i + 1; j <= m; ++j) {
      edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  std::vector<std::size_t> targets;
  for (std::size_t node = m + 1; node < n; ++node) {
    targets.clear();
    while (targets.size() < m) {
      const std::size_t candidate = endpoints[rng.uniform_index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), candidate) == targets.end())
        targets.push_back(candidate);
    }
    for (std::size_t t : targets) {
      edges.emplace_back(t, node);
      endpoints.push_back(t);
      endpoints.push_back(node);
    }
  }
  return Graph::from_edges(n, edges);
}

Graph sbm(std::span<const std::size_t> block_sizes,
          const std::vector<std::vector<double>>& block_matrix, std::uint64_t seed) {
  StochasticBlock spec{{block_sizes.begin(), block_sizes.end()}, block_matrix};
  std::size_t n = 0;
  for (std::size_t s : block_sizes) n += s;
  validate({spec, n, seed});

  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) block_of.insert(block_of.end(), block_sizes[b], b);

  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(block_matrix[block_of[i]][block_of[j]])) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph generate(const GraphSpec& spec) {
  validate(spec);
  return std::visit(
      [&](const auto& t) -> Graph {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ErdosRenyi>)
          return erdos_renyi(spec.n_nodes, t.p, spec.seed);
        else if constexpr (std::is_same_v<T, BarabasiAlbert>)
          return barabasi_albert(spec.n_nodes, t.m, spec.seed);
        else
          return sbm(t.block_sizes, t.block_matrix, spec.seed);
      },
      spec.topology);
}

double density(const Graph& graph) {
  const auto n = static_cast<double>(graph.n_nodes());
  if (graph.n_nodes() < 2) throw InvalidInput("density: need at least two nodes");
  return 2.0 * static_cast<double>(graph.n_edges()) / (n * (n - 1.0));
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "n=" << graph.n_nodes() << '\n';
  for (const auto& [i, j] : graph.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool header = false;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line.rfind("n=", 0) != 0)
        throw InvalidInput("edge list line 1: expected header 'n=<count>'");
      try {
        std::size_t used = 0;
        n = std::stoull(line.substr(2), &used);
        if (used + 2 != line.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InvalidInput("edge list line 1: bad node count '" + line.substr(2) + "'");
      }
      header = true;
      continue;
    }
    std::istringstream fields(line);
    long long a = -1, b = -1;
    std::string rest;
    if (!(fields >> a >> b) || (fields >> rest) || a < 0 || b < 0)
      throw InvalidInput("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    if (a >= b)
      throw InvalidInput("edge list line " + std::to_string(line_no) + ": expected i < j");
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  if (!header) throw InvalidInput("edge list: missing header");
  return Graph::from_edges(n, edges);
}

}  // namespace clickcascade::netgen
