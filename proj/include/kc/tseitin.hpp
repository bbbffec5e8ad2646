#pragma once

#include <iosfwd>
#include <vector>

#include "kc/circuit.hpp"
#include "kc/cnf.hpp"
#include "kc/tree_decomposition.hpp"

namespace kc {

enum class ClauseTag { Carrying, Auxiliary, OutputUnit };

struct TaggedClause {
  ClauseTag tag;
  int gate = -1;        // owning AND/OR gate; -1 for the output unit
  int input_gate = -1;  // auxiliary clauses: the input the clause guards
};

struct TseitinMap {
  std::vector<int> gate_var;         // gate id -> cnf variable; -1 for NOT gates
  int output_lit = 0;                // ±(var+1)
  std::vector<TaggedClause> tags;    // parallel to cnf.clauses
  std::vector<TaggedClause> dropped; // carrying clauses with complementary inputs
};

// Clause encoding of a normalized single-output circuit: one variable per
// original input and per AND/OR gate, NOT gates become negative literals,
// plus the unit clause fixing the output literal.
std::pair<Cnf, TseitinMap> tseitin_transform(const Circuit& c, int output);

// Rewrites a tree decomposition of the circuit DAG into one of the
// incidence graph of the encoding; width at most doubles plus one, added
// nodes are leaves (one per auxiliary clause, one for the unit clause).
TreeDecomposition lift_tree_decomposition(const TreeDecomposition& td, const Circuit& c,
                                          const Cnf& f, const TseitinMap& m);

// ---- sidecar text format for the map ----
void write_tseitin_map(std::ostream& out, const TseitinMap& m);
std::string tseitin_map_to_string(const TseitinMap& m);
TseitinMap parse_tseitin_map(std::istream& in);

}  // namespace kc
