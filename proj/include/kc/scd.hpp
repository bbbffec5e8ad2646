#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kc/common.hpp"
#include "kc/tree_decomposition.hpp"

namespace kc {

struct Circuit;

// ---- clique decompositions over numbered vertices ----

struct CdNode {
  enum class Op { Create, AddVertex, NewEdges, Relabel, Union };
  Op op;
  int child0 = -1, child1 = -1;
  int num = -1, num2 = -1;  // Create/AddVertex: num; NewEdges/Relabel: (num, num2)
  int vertex = -1;
};

struct CliqueDecomposition {
  bool directed = true;
  std::vector<CdNode> nodes;
  int root = -1;

  int size() const { return static_cast<int>(nodes.size()); }
  // number of distinct numbers used anywhere in the decomposition
  int width() const;
};

struct ScdReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Reconstructs the decomposition's graph while checking every operation
// precondition; compares against `expected` when given.
ScdReport validate_clique_decomposition(const CliqueDecomposition& cd,
                                        const Graph* expected = nullptr);
Graph clique_decomposition_graph(const CliqueDecomposition& cd);

// ---- simplified clique decompositions ----

enum class LabelType { Untyped, Unary, And, Or };

struct ScdLabel {
  int child0 = -1, child1 = -1;  // union children, -1 for singletons
  int vertex = -1;               // singleton's vertex
  LabelType type = LabelType::Untyped;

  bool singleton() const { return vertex >= 0; }
};

struct ScdNode {
  enum class Op { Leaf, AddVertex, UnionLabels, NewAdjacency, Combine };
  Op op;
  int child0 = -1, child1 = -1;
  int vertex = -1;          // Leaf, AddVertex
  int label = -1;           // label created by Leaf/AddVertex/UnionLabels
  int arg0 = -1, arg1 = -1; // UnionLabels: merged labels; NewAdjacency: (src, dst)
};

// Stored as operation-tagged nodes referencing a label registry; graphs are
// materialized only inside the validator.
struct Scd {
  bool directed = true;
  std::vector<ScdNode> nodes;
  int root = -1;
  std::vector<ScdLabel> labels;

  int size() const { return static_cast<int>(nodes.size()); }
  int label_count() const { return static_cast<int>(labels.size()); }

  int add_leaf(int vertex, LabelType t = LabelType::Untyped);
  int add_vertex_node(int child, int vertex, LabelType t = LabelType::Untyped);
  int add_union(int child, int l1, int l2);  // creates nodes.back().label
  int add_adjacency(int child, int src, int dst);
  int add_combine(int c0, int c1);

  std::vector<int> label_vertices(int label) const;
  int label_size(int label) const;
  int vertex_count() const;
  std::vector<int> postorder() const;
};

ScdReport validate_scd(const Scd& s, const Graph* expected = nullptr);
Graph scd_graph(const Scd& s);

// max over nodes of the live label count, tracked incrementally
int scd_width(const Scd& s);

// Appendix-style conversion; width at most doubles, same graph up to labels.
Scd clique_to_scd(const CliqueDecomposition& cd);

// Splits every label until non-singleton labels are homogeneous in
// {unary, and, or}; width at most triples; same DAG.
Scd make_type_respecting(const Scd& s, const Circuit& c);

// Gate kind -> label type (inputs and negations are unary).
LabelType gate_label_type(const Circuit& c, int gate);

// Per-label content type derived from the circuit; Untyped when mixed.
std::vector<LabelType> derive_label_types(const Scd& s, const Circuit& c);

// ---- text format (one node per line, pre-order) ----
Scd parse_scd(std::istream& in);
Scd load_scd(const std::string& path);
void write_scd(std::ostream& out, const Scd& s);
std::string scd_to_string(const Scd& s);

CliqueDecomposition parse_cd(std::istream& in);
CliqueDecomposition load_cd(const std::string& path);
void write_cd(std::ostream& out, const CliqueDecomposition& cd);
std::string cd_to_string(const CliqueDecomposition& cd);

}  // namespace kc
