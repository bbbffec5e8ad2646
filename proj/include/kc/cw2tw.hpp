#pragma once

#include <vector>

#include "kc/circuit.hpp"
#include "kc/scd.hpp"
#include "kc/tree_decomposition.hpp"

namespace kc {

// Realization of the per-label input funnel for unary labels: a single
// fan-in-1 AND gate (default) or the literal pair of stacked NOT gates.
enum class InGateMode { UnaryAnd, DoubleNot };

// Gates of the rewritten circuit per label. Singleton labels alias their
// original gate (which keeps its id); non-singleton labels contribute a
// conjunction/disjunction collector and optionally an input funnel.
struct GateAssociation {
  std::vector<int> oand, oor;  // -1 when absent
  std::vector<int> in_entry;   // gate receiving the funnel's inputs; -1 if pruned/absent
  std::vector<int> in_exit;    // gate providing the funnel's output
  std::vector<int> in_second;  // second NOT of a double-not funnel, else -1

  // distinct live gates of a label, for bag substitution
  std::vector<int> label_gates(int label) const;
  // gate count with a double-not funnel counted once
  int logical_gate_count(int original_gates) const;
};

struct FstarResult {
  Circuit fstar;
  GateAssociation assoc;
};

// Rewrites c into an equivalent circuit without large bicliques, guided by a
// type-respecting decomposition of its DAG. Original gates keep their ids
// and functions; at most 3 gates are added per non-singleton label and
// input-less funnels are pruned iteratively.
FstarResult build_fstar(const Circuit& c, const Scd& s, InGateMode mode = InGateMode::UnaryAnd);

// Labels as vertices; child-parent and adjacency edges.
Graph representation_graph(const Scd& s);

// Tree decomposition of the rewritten circuit, one postorder pass: label
// bags mirrored from the decomposition tree, then labels replaced by their
// gates. Width <= 3*scd_width(s)+2, bag count <= 2|F|.
TreeDecomposition fstar_tree_decomposition(const Scd& s, const GateAssociation& assoc);

struct TransformStats {
  int gates_in = 0;
  int gates_out = 0;
  int logical_gates_out = 0;
  int cd_width = -1;   // -1 when the pipeline entered at an scd
  int scd_width = 0;
  int typed_width = 0;
  int td_width = 0;
  int td_bags = 0;
  std::string to_string() const;
};

struct TransformResult {
  Circuit fstar;
  GateAssociation assoc;
  Scd typed_scd;
  TreeDecomposition td;
  TransformStats stats;
};

TransformResult transform(const Circuit& c, const CliqueDecomposition& cd,
                          InGateMode mode = InGateMode::UnaryAnd);
TransformResult transform_scd(const Circuit& c, const Scd& s,
                              InGateMode mode = InGateMode::UnaryAnd);

}  // namespace kc
