#pragma once

#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kc/common.hpp"
#include "kc/model_set.hpp"
#include "kc/tree_decomposition.hpp"

namespace kc {

// Literals are ±(var+1); clauses keep literals sorted by variable and never
// contain a variable twice.
inline int make_lit(int var, bool positive) { return positive ? var + 1 : -(var + 1); }
inline int lit_var(int lit) { return std::abs(lit) - 1; }
inline bool lit_positive(int lit) { return lit > 0; }

struct Clause {
  std::vector<int> lits;
  bool operator==(const Clause&) const = default;
};

// Normalizes literal order and duplicates; fails on a tautological clause.
Clause make_clause(std::vector<int> lits);
// Returns nullopt instead when the clause is tautological.
std::optional<Clause> try_make_clause(std::vector<int> lits);

struct Cnf {
  std::vector<std::string> variables;
  std::vector<Clause> clauses;

  int var_count() const { return static_cast<int>(variables.size()); }
  int clause_count() const { return static_cast<int>(clauses.size()); }
  void add_clause(std::vector<int> lits) { clauses.push_back(make_clause(std::move(lits))); }
};

bool clause_satisfied(const Clause& cl, uint32_t assignment);
ModelSet cnf_models(const Cnf& f, OracleLimits lim = {});

// Bipartite occurrence graph; vertices 0..nv-1 are variables and
// nv..nv+nc-1 are clauses.
struct IncidenceGraph {
  int nv = 0, nc = 0;
  Graph g;

  int clause_vertex(int clause) const { return nv + clause; }
};

IncidenceGraph incidence_graph(const Cnf& f);

// ---- DIMACS ----
Cnf parse_dimacs(std::istream& in);
Cnf load_dimacs(const std::string& path);
void write_dimacs(std::ostream& out, const Cnf& f);
std::string dimacs_to_string(const Cnf& f);

}  // namespace kc
