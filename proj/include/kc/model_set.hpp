#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kc/circuit.hpp"
#include "kc/common.hpp"

namespace kc {

// Exact set of satisfying assignments over an ordered variable list.
// Bit i of a mask is the value of vars[i]. Only used within the oracle
// limit, so 32-bit masks suffice.
struct ModelSet {
  std::vector<std::string> vars;
  std::vector<uint32_t> masks;  // sorted, unique

  bool operator==(const ModelSet&) const = default;
  size_t count() const { return masks.size(); }
};

// Projection Pr(S, keep): drop the other variables, dedupe.
ModelSet project(const ModelSet& s, const std::vector<std::string>& keep);

// Brute-force enumeration of the function at `output` over c.variables.
// Refuses above the oracle limit rather than approximating.
ModelSet models(const Circuit& c, int output, OracleLimits lim = {});

// One enumeration pass collecting the model set of every gate at once.
std::vector<ModelSet> models_all_gates(const Circuit& c, OracleLimits lim = {});

}  // namespace kc
