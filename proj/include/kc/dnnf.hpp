#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kc/common.hpp"
#include "kc/model_set.hpp"

namespace kc {

struct DnnfNode {
  enum class Kind : uint8_t { Lit, True, False, And, Or };
  Kind kind = Kind::True;
  int lit = 0;  // ±(var+1) for Lit nodes
  std::vector<int> children;
};

// De Morgan circuit with negation at the leaves; And nodes are expected to
// be decomposable. Children precede parents in the node table and the root
// is the last node.
struct Dnnf {
  std::vector<DnnfNode> nodes;
  int root = -1;
  std::vector<std::string> vars;

  int size() const { return static_cast<int>(nodes.size()); }
};

struct DnnfReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Bottom-up Var() bitsets; reports every And node whose children share a
// variable, with a witness.
DnnfReport check_decomposable(const Dnnf& d);

// Replaces literals of variables outside `keep` by the true constant.
// Node count is unchanged; models become the projection onto `keep`.
Dnnf forget(const Dnnf& d, const std::vector<std::string>& keep);

// Linear-time consistency; refuses non-decomposable input where the
// bottom-up rule would be unsound.
bool is_satisfiable(const Dnnf& d);

// Oracle enumeration over the given variable list (must cover Var(d)).
ModelSet models_dnnf(const Dnnf& d, const std::vector<std::string>& vars, OracleLimits lim = {});

// Constant propagation, unary collapse, structural sharing, dead-node sweep.
Dnnf simplify(const Dnnf& d);

// ---- c2d-style .nnf format ----
Dnnf parse_nnf(std::istream& in);
Dnnf load_nnf(const std::string& path);
void write_nnf(std::ostream& out, const Dnnf& d);
std::string nnf_to_string(const Dnnf& d);

}  // namespace kc
