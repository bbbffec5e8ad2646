#pragma once

#include <cstdint>
#include <random>

#include "kc/circuit.hpp"
#include "kc/cnf.hpp"
#include "kc/scd.hpp"
#include "kc/tree_decomposition.hpp"

namespace kc {

// mt19937_64 with hand-rolled bounded sampling; std distributions are not
// portable across standard libraries and generated files must be
// byte-identical for a fixed seed.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t next() { return eng_(); }
  int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
  bool chance(int num, int den) { return below(den) < num; }

private:
  std::mt19937_64 eng_;
};

// Circuit grown together with its width certificate: fresh gates enter as
// singleton labels and take their fan-in from adjacency arcs, so the
// decomposition is valid by construction and the circuit acyclic.
struct GeneratedInstance {
  Circuit circuit;
  Scd scd;
  int width_budget = 0;
};

GeneratedInstance generate_instance(int k, int n, uint64_t seed);

struct GeneratedCdInstance {
  Circuit circuit;
  CliqueDecomposition cd;
  int width_budget = 0;
};

GeneratedCdInstance generate_cd_instance(int k, int n, uint64_t seed);

// Abstract numbered decompositions (no circuit attached), for conversion
// round-trips.
CliqueDecomposition generate_clique_decomposition(int k, int nv, uint64_t seed,
                                                  bool directed = false);

struct GeneratedCnf {
  Cnf cnf;
  TreeDecomposition td;  // decomposition of the incidence graph
};

// Clauses drawn from sliding variable windows with a path decomposition of
// width `window`.
GeneratedCnf generate_window_cnf(int nv, int nc, int window, uint64_t seed);

// Binary-tree family with one clause straddling every sibling pair, so
// internal bags carry genuine three-way branching; incidence width is
// exactly t and the bag count tracks `target_nodes`.
GeneratedCnf generate_width_family_cnf(int t, int target_nodes, uint64_t seed);

}  // namespace kc
