#include "kc/model_set.hpp"

#include <algorithm>

namespace kc {

ModelSet project(const ModelSet& s, const std::vector<std::string>& keep) {
  ModelSet out;
  out.vars = keep;
  std::vector<int> pos(keep.size(), -1);
  for (size_t i = 0; i < keep.size(); i++) {
    for (size_t j = 0; j < s.vars.size(); j++)
      if (s.vars[j] == keep[i]) {
        pos[i] = (int)j;
        break;
      }
    if (pos[i] == -1) fail(Errc::invalid_input, "project: unknown variable " + keep[i]);
  }
  out.masks.reserve(s.masks.size());
  for (uint32_t m : s.masks) {
    uint32_t p = 0;
    for (size_t i = 0; i < keep.size(); i++)
      if (m >> pos[i] & 1u) p |= 1u << i;
    out.masks.push_back(p);
  }
  std::sort(out.masks.begin(), out.masks.end());
  out.masks.erase(std::unique(out.masks.begin(), out.masks.end()), out.masks.end());
  return out;
}

std::vector<ModelSet> models_all_gates(const Circuit& c, OracleLimits lim) {
  int nv = (int)c.variables.size();
  if (nv > lim.max_vars)
    fail(Errc::refusal, "oracle limit exceeded: " + std::to_string(nv) + " variables > " +
                            std::to_string(lim.max_vars));
  auto order = topo_order(c);
  if (!order) fail(Errc::invalid_input, "models: circuit has a cycle");
  std::vector<int> var_index(c.size(), -1);
  for (int i = 0; i < c.size(); i++) {
    if (c.gates[i].kind != GateKind::Input) continue;
    for (int j = 0; j < nv; j++)
      if (c.variables[j] == c.gates[i].var) {
        var_index[i] = j;
        break;
      }
  }
  std::vector<ModelSet> out(c.size());
  for (auto& ms : out) ms.vars = c.variables;
  std::vector<char> val(c.size());
  uint32_t total = nv >= 31 ? 0 : (1u << nv);
  for (uint32_t a = 0; a < total; a++) {
    for (int id : *order) {
      const Gate& g = c.gates[id];
      switch (g.kind) {
        case GateKind::Input: val[id] = a >> var_index[id] & 1u; break;
        case GateKind::ConstTrue: val[id] = 1; break;
        case GateKind::ConstFalse: val[id] = 0; break;
        case GateKind::Not: val[id] = !val[g.inputs[0]]; break;
        case GateKind::And: {
          char v = 1;
          for (int in : g.inputs) v = v && val[in];
          val[id] = v;
          break;
        }
        case GateKind::Or: {
          char v = 0;
          for (int in : g.inputs) v = v || val[in];
          val[id] = v;
          break;
        }
      }
      if (val[id]) out[id].masks.push_back(a);
    }
  }
  return out;
}

ModelSet models(const Circuit& c, int output, OracleLimits lim) {
  int nv = (int)c.variables.size();
  if (nv > lim.max_vars)
    fail(Errc::refusal, "oracle limit exceeded: " + std::to_string(nv) + " variables > " +
                            std::to_string(lim.max_vars));
  if (output < 0 || output >= c.size()) fail(Errc::invalid_input, "models: bad output id");
  auto order = topo_order(c);
  if (!order) fail(Errc::invalid_input, "models: circuit has a cycle");
  std::vector<int> var_index(c.size(), -1);
  for (int i = 0; i < c.size(); i++) {
    if (c.gates[i].kind != GateKind::Input) continue;
    for (int j = 0; j < nv; j++)
      if (c.variables[j] == c.gates[i].var) {
        var_index[i] = j;
        break;
      }
  }
  ModelSet out;
  out.vars = c.variables;
  std::vector<char> val(c.size());
  uint32_t total = nv >= 31 ? 0 : (1u << nv);
  for (uint32_t a = 0; a < total; a++) {
    for (int id : *order) {
      const Gate& g = c.gates[id];
      switch (g.kind) {
        case GateKind::Input: val[id] = a >> var_index[id] & 1u; break;
        case GateKind::ConstTrue: val[id] = 1; break;
        case GateKind::ConstFalse: val[id] = 0; break;
        case GateKind::Not: val[id] = !val[g.inputs[0]]; break;
        case GateKind::And: {
          char v = 1;
          for (int in : g.inputs) v = v && val[in];
          val[id] = v;
          break;
        }
        case GateKind::Or: {
          char v = 0;
          for (int in : g.inputs) v = v || val[in];
          val[id] = v;
          break;
        }
      }
    }
    if (val[output]) out.masks.push_back(a);
  }
  return out;
}

}  // namespace kc
