#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kc/cnf.hpp"
#include "kc/cw2tw.hpp"
#include "kc/dnnf.hpp"
#include "kc/scd.hpp"
#include "kc/tree_decomposition.hpp"
#include "kc/tseitin.hpp"

namespace kc {

using Key = uint32_t;

// A bag of the incidence-graph decomposition split into its parts. Key bits
// are laid out clause positions first, then variable positions, both in
// ascending id order; a clause bit of 1 means the clause is removed from
// the residual, a variable bit gives the assigned sign.
struct Bag {
  std::vector<int> clauses;  // ascending cnf clause ids
  std::vector<int> vars;     // ascending cnf variable ids

  int bits() const { return static_cast<int>(clauses.size() + vars.size()); }
};

Bag split_bag(const std::vector<int>& bag, int nv);

// Split data of one basic residual at a binary bag.
struct BranchContext {
  std::vector<int> shared_clauses;  // Cl(t1) ∩ Cl(t2)
  std::vector<int> removed_set;     // C'' = C' plus clauses satisfied by S
  std::vector<int> branching_set;   // shared clauses still alive: the 3-way choices
  Bag child1_space, child2_space;   // residual key spaces of the children
  Key x1_base = 0, x2_base = 0;     // fixed digits set, free digits at start value
  std::vector<std::pair<int, int>> free_positions;  // per branching clause: bit in x1, bit in x2
};

// S is (variable id, sign), total on t.vars.
BranchContext make_branch_context(const Cnf& f, const Bag& t, const Bag& t1, const Bag& t2,
                                  const std::vector<int>& removed,
                                  const std::vector<std::pair<int, bool>>& assignment);

// All 2^m child key pairs via a paired selective counter (increment on the
// first component, decrement on the second); free digits stay complementary.
std::vector<std::pair<Key, Key>> enumerate_child_splits(const BranchContext& ctx);

// ---- equivalence-preserving expansions (oracle-facing) ----

struct ShannonBranch {
  std::vector<int> literals;  // the conjoined assignment
  Cnf residual;               // f restricted by it
};

std::vector<ShannonBranch> shannon_expand(const Cnf& f, const std::vector<int>& vars,
                                          int expansion_cap = 12);

struct ClauseSplit {
  int clause = -1;
  std::vector<int> left, right;  // literal partition of the clause
};

std::vector<Cnf> clausal_expand(const Cnf& f, const std::vector<ClauseSplit>& splits);

// ---- compilation ----

struct CompilerOptions {
  int width_cap = 20;
  // derive the child-table wiring twice (bit masks vs. explicit sets) and
  // require agreement; for differential testing
  bool naive_wiring = false;
  InGateMode in_gate_mode = InGateMode::UnaryAnd;
};

struct CompileStats {
  int td_nodes = 0;
  int width = 0;
  long long br_entries = 0;
  long long rr_entries = 0;
  long long split_states = 0;
  int nodes_raw = 0;
  int nodes_final = 0;
  double size_ratio = 0;  // nodes_raw / (3^(width+1) * td_nodes)
  long long naive_checks = 0;
  std::vector<std::string> per_bag;  // "bag <t> br <n> rr <n>"
  std::string to_string() const;
};

struct CompileResult {
  Dnnf dnnf;
  CompileStats stats;
};

// Rooting at the bag with the most clauses, then minimize, binarize and pad
// unary nodes with empty leaves.
TreeDecomposition prepare_decomposition(const TreeDecomposition& td, const IncidenceGraph& ig);

// Bottom-up residual tables over a prepared decomposition. The result is
// decomposable by construction and equivalent to f.
CompileResult compile_cnf(const Cnf& f, const TreeDecomposition& td,
                          const CompilerOptions& opts = {});

struct PipelineStats {
  int circuit_gates = 0;
  int normalized_gates = 0;
  int circuit_td_width = 0;
  int cnf_vars = 0;
  int cnf_clauses = 0;
  int lifted_width = 0;
  int lifted_nodes = 0;
  int prepared_width = 0;
  int prepared_nodes = 0;
  TransformStats transform;  // only for the cliquewidth entry
  CompileStats compile;
  std::string to_string() const;
};

struct PipelineResult {
  Dnnf dnnf;
  PipelineStats stats;
};

// normalize -> encode -> lift -> prepare -> compile -> forget gate variables
PipelineResult compile_circuit(const Circuit& c, int output, const TreeDecomposition& td,
                               const CompilerOptions& opts = {});

// biclique elimination first, then the treewidth pipeline on the rewrite
PipelineResult compile_circuit_scd(const Circuit& c, const Scd& s, int output,
                                   const CompilerOptions& opts = {});
PipelineResult compile_circuit_cw(const Circuit& c, const CliqueDecomposition& cd, int output,
                                  const CompilerOptions& opts = {});

}  // namespace kc
