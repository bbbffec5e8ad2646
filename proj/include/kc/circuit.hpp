#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kc/common.hpp"

namespace kc {

enum class GateKind { Input, ConstTrue, ConstFalse, And, Or, Not };

const char* gate_kind_name(GateKind k);

struct Gate {
  GateKind kind = GateKind::And;
  std::vector<int> inputs;  // fan-in, ordered
  std::string var;          // variable name for Input gates
};

// Multi-output Boolean circuit over {AND, OR, NOT} plus constants.
// Gate ids are dense indices into `gates`; textual names live in a side
// table so parse/serialize round-trips keep the original tokens.
struct Circuit {
  std::vector<Gate> gates;
  std::vector<int> outputs;
  std::vector<std::string> variables;  // input names, declaration order
  std::vector<std::string> names;      // per-gate token, may be empty

  int size() const { return static_cast<int>(gates.size()); }

  int add_input(const std::string& name);
  int add_gate(GateKind k, std::vector<int> ins);
  int add_const(bool value);
  std::string name_of(int id) const;  // stored token or "g<id>"
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_circuit(const Circuit& c);

// Gate ids in topological order (inputs before consumers); nullopt if cyclic.
std::optional<std::vector<int>> topo_order(const Circuit& c);

using Assignment = std::map<std::string, bool>;

// Value of every gate under a total assignment of c.variables.
std::vector<char> evaluate(const Circuit& c, const Assignment& a);

// Result of double-negation elimination. `bag_map[old]` lists the gates of
// the new circuit that stand in for `old` when reusing a tree decomposition
// of the original DAG (empty when the gate died with its whole chain).
struct NormalizeResult {
  Circuit circuit;
  std::vector<std::vector<int>> bag_map;
  std::vector<int> gate_map;  // old id -> new id, -1 if removed
};

NormalizeResult normalize_not_chains_mapped(const Circuit& c);
Circuit normalize_not_chains(const Circuit& c);

Circuit propagate_constants(const Circuit& c);

// Wire relation of the circuit as arc list (from input gate to consumer).
std::vector<std::pair<int, int>> circuit_arcs(const Circuit& c);

// ---- text format ----
// `var <name>` | `gate <id> <AND|OR|NOT> <in...>` | `const <id> <0|1>` |
// `output <id>`; '#' starts a comment; inputs refer to earlier tokens.
Circuit parse_circuit(std::istream& in);
Circuit parse_circuit_string(const std::string& text);
Circuit load_circuit(const std::string& path);
void write_circuit(std::ostream& out, const Circuit& c);
std::string circuit_to_string(const Circuit& c);

}  // namespace kc
