#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kc/common.hpp"

namespace kc {

struct Circuit;

// Plain graph, possibly directed; tree decompositions always look at the
// underlying undirected edges.
struct Graph {
  int n = 0;
  bool directed = false;
  std::vector<std::pair<int, int>> edges;

  void add_edge(int u, int v) { edges.emplace_back(u, v); }
  void dedupe();
};

Graph circuit_dag(const Circuit& c);

struct TreeDecomposition {
  struct Node {
    std::vector<int> bag;  // sorted, unique
    int parent = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  int root = 0;

  int size() const { return static_cast<int>(nodes.size()); }
  int add_node(std::vector<int> bag, int parent);
  // max bag size - 1; -1 for the empty decomposition
  int width() const;
  void sort_bags();
};

struct TdReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks connectedness, adjacency and union over V(g); elements of bags
// that are not vertices of g are ignored (minimize strips them).
TdReport validate_tree_decomposition(const TreeDecomposition& td, const Graph& g);

// Iteratively removes bag elements while the decomposition stays valid;
// the result cannot lose any single element without breaking validity.
TreeDecomposition minimize_tree_decomposition(const TreeDecomposition& td, const Graph& g);

// Every node ends up with at most two children (inserted nodes repeat the
// bag of the node they split); with pad_unary, internal nodes with a single
// child get an extra empty-bag leaf, so internal nodes become binary.
TreeDecomposition binarize_tree_decomposition(const TreeDecomposition& td, bool pad_unary = false);

TreeDecomposition reroot(const TreeDecomposition& td, int new_root);

// Substitute every bag element through a map (old -> list of new ids).
TreeDecomposition substitute_bags(const TreeDecomposition& td,
                                  const std::vector<std::vector<int>>& map);

// ---- PACE 2017 .td format ----
TreeDecomposition parse_td(std::istream& in);
TreeDecomposition load_td(const std::string& path);
void write_td(std::ostream& out, const TreeDecomposition& td, int n_vertices);
std::string td_to_string(const TreeDecomposition& td, int n_vertices);

}  // namespace kc
