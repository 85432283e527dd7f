#pragma once

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dppgd/errors.hpp"
#include "dppgd/rng.hpp"

namespace dppgd {

// Directed communication graph.  Nodes are 0-based internally; the text
// format (see parse_edge_list) is 1-based.  An edge (u, v) means u -> v:
// v receives from u, i.e. u is an in-neighbor of v.
struct DirectedGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;  // (from, to), 0-based

  void validate() const {
    if (node_count < 1) throw GraphError("graph must have at least one node");
    for (const auto& [u, v] : edges) {
      if (u < 0 || u >= node_count || v < 0 || v >= node_count)
        throw GraphError("edge endpoint out of range");
    }
  }

  // Sorts and deduplicates the edge list.
  void normalize() {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  bool has_edge(int u, int v) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) !=
           edges.end();
  }

  // In-neighborhood of i including i itself (agents always see their own
  // latest values), sorted ascending.
  std::vector<int> in_neighbors(int i) const {
    std::vector<int> result{i};
    for (const auto& [u, v] : edges)
      if (v == i && u != i) result.push_back(u);
    std::sort(result.begin(), result.end());
    return result;
  }

  // Out-neighborhood of j including j itself, sorted ascending.
  std::vector<int> out_neighbors(int j) const {
    std::vector<int> result{j};
    for (const auto& [u, v] : edges)
      if (u == j && v != j) result.push_back(v);
    std::sort(result.begin(), result.end());
    return result;
  }
};

namespace detail {

inline std::vector<std::vector<int>> adjacency(const DirectedGraph& g,
                                               bool reverse) {
  std::vector<std::vector<int>> adj(g.node_count);
  for (const auto& [u, v] : g.edges) {
    if (reverse)
      adj[v].push_back(u);
    else
      adj[u].push_back(v);
  }
  return adj;
}

inline bool reaches_all(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> frontier;
  frontier.push(start);
  seen[start] = 1;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == adj.size();
}

}  // namespace detail

// True iff every node can reach every other node along directed edges.
// Checked as: node 0 reaches all nodes in the graph and in its reverse.
inline bool is_strongly_connected(const DirectedGraph& g) {
  g.validate();
  if (g.node_count == 1) return true;
  return detail::reaches_all(detail::adjacency(g, false), 0) &&
         detail::reaches_all(detail::adjacency(g, true), 0);
}

inline DirectedGraph cycle_graph(int n, bool self_loops = true) {
  if (n < 1) throw GraphError("cycle_graph: need n >= 1");
  DirectedGraph g;
  g.node_count = n;
  for (int i = 0; i < n; ++i) {
    if (self_loops) g.edges.emplace_back(i, i);
    if (n > 1) g.edges.emplace_back(i, (i + 1) % n);
  }
  g.normalize();
  return g;
}

inline DirectedGraph complete_graph(int n, bool self_loops = true) {
  if (n < 1) throw GraphError("complete_graph: need n >= 1");
  DirectedGraph g;
  g.node_count = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j || self_loops) g.edges.emplace_back(i, j);
  g.normalize();
  return g;
}

// The canonical 10-node strongly connected digraph used by the bundled
// experiments: a directed ring with three long chords and self-loops.
// The chords give the nodes unequal in/out degrees, so the uniform weight
// rule yields genuinely different row- and column-stochastic matrices.
inline DirectedGraph fig1_graph() {
  DirectedGraph g;
  g.node_count = 10;
  for (int i = 0; i < 10; ++i) {
    g.edges.emplace_back(i, i);
    g.edges.emplace_back(i, (i + 1) % 10);
  }
  g.edges.emplace_back(1, 5);
  g.edges.emplace_back(4, 8);
  g.edges.emplace_back(7, 2);
  g.normalize();
  return g;
}

// Erdos-Renyi style digraph: each ordered pair (i, j), i != j, is an edge
// with probability edge_prob; self-loops always included when requested.
// Redraws until strongly connected, up to max_tries.
inline DirectedGraph random_strongly_connected(int n, double edge_prob,
                                               RngStream& rng,
                                               int max_tries = 100,
                                               bool self_loops = true) {
  if (n < 1) throw GraphError("random_strongly_connected: need n >= 1");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw GraphError("random_strongly_connected: edge_prob outside [0, 1]");
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    DirectedGraph g;
    g.node_count = n;
    for (int i = 0; i < n; ++i) {
      if (self_loops) g.edges.emplace_back(i, i);
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (rng.uniform01() <= edge_prob) g.edges.emplace_back(i, j);
      }
    }
    g.normalize();
    if (is_strongly_connected(g)) return g;
  }
  throw NotStronglyConnected(
      "random_strongly_connected: no strongly connected draw within budget");
}

// Text format: first non-comment line is the node count N, then one "u v"
// pair per line with 1-based node indices meaning u -> v.  Lines starting
// with '#' and blank lines are ignored.
inline DirectedGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  DirectedGraph g;
  bool have_count = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!have_count) {
      if (!(fields >> g.node_count))
        throw GraphError("edge list line " + std::to_string(line_no) +
                         ": expected node count");
      have_count = true;
      continue;
    }
    int u = 0, v = 0;
    if (!(fields >> u >> v))
      throw GraphError("edge list line " + std::to_string(line_no) +
                       ": expected 'u v'");
    if (u < 1 || u > g.node_count || v < 1 || v > g.node_count)
      throw GraphError("edge list line " + std::to_string(line_no) +
                       ": node index outside [1, N]");
    g.edges.emplace_back(u - 1, v - 1);
  }
  if (!have_count) throw GraphError("edge list: missing node count");
  g.normalize();
  g.validate();
  return g;
}

inline std::string format_edge_list(const DirectedGraph& g) {
  g.validate();
  DirectedGraph sorted = g;
  sorted.normalize();
  std::ostringstream out;
  out << sorted.node_count << "\n";
  for (const auto& [u, v] : sorted.edges)
    out << (u + 1) << " " << (v + 1) << "\n";
  return out.str();
}

inline DirectedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_edge_list(buffer.str());
}

inline void save_edge_list(const DirectedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file: " + path);
  out << format_edge_list(g);
  if (!out) throw IoError("failed writing graph file: " + path);
}

}  // namespace dppgd
