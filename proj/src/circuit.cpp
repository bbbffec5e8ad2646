#include "kc/circuit.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace kc {

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::Input: return "INPUT";
    case GateKind::ConstTrue: return "CONST1";
    case GateKind::ConstFalse: return "CONST0";
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Not: return "NOT";
  }
  return "?";
}

int Circuit::add_input(const std::string& name) {
  int id = size();
  Gate g;
  g.kind = GateKind::Input;
  g.var = name;
  gates.push_back(std::move(g));
  names.push_back(name);
  variables.push_back(name);
  return id;
}

int Circuit::add_gate(GateKind k, std::vector<int> ins) {
  int id = size();
  Gate g;
  g.kind = k;
  g.inputs = std::move(ins);
  gates.push_back(std::move(g));
  names.emplace_back();
  return id;
}

int Circuit::add_const(bool value) {
  int id = size();
  Gate g;
  g.kind = value ? GateKind::ConstTrue : GateKind::ConstFalse;
  gates.push_back(std::move(g));
  names.emplace_back();
  return id;
}

std::string Circuit::name_of(int id) const {
  if (id >= 0 && id < (int)names.size() && !names[id].empty()) return names[id];
  return "g" + std::to_string(id);
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    s += v;
    s += '\n';
  }
  return s;
}

std::optional<std::vector<int>> topo_order(const Circuit& c) {
  int n = c.size();
  // Kahn over the wire relation: a gate is ready once all its inputs are done.
  std::vector<int> remaining(n, 0);
  std::vector<std::vector<int>> consumers(n);
  for (int i = 0; i < n; i++) {
    for (int in : c.gates[i].inputs) {
      if (in < 0 || in >= n) return std::nullopt;
      remaining[i]++;
      consumers[in].push_back(i);
    }
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> queue;
  for (int i = 0; i < n; i++)
    if (remaining[i] == 0) queue.push_back(i);
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    order.push_back(v);
    for (int u : consumers[v])
      if (--remaining[u] == 0) queue.push_back(u);
  }
  if ((int)order.size() != n) return std::nullopt;
  return order;
}

namespace {

// Shortest path witness for one cycle, for the validation report.
std::string cycle_witness(const Circuit& c) {
  int n = c.size();
  std::vector<int> color(n, 0), parent(n, -1);
  std::vector<int> stack;
  for (int s = 0; s < n; s++) {
    if (color[s]) continue;
    stack.push_back(s);
    while (!stack.empty()) {
      int v = stack.back();
      if (color[v] == 0) {
        color[v] = 1;
        for (int u : c.gates[v].inputs) {
          if (u < 0 || u >= n) continue;
          if (color[u] == 1) {
            // walk back from v to u
            std::string path = c.name_of(u);
            for (int w = v; w != u && w != -1; w = parent[w])
              path = c.name_of(w) + "->" + path;
            return path + "->" + c.name_of(u);
          }
          if (color[u] == 0) {
            parent[u] = v;
            stack.push_back(u);
          }
        }
      } else {
        if (color[v] == 1) color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return "";
}

}  // namespace

ValidationReport validate_circuit(const Circuit& c) {
  ValidationReport r;
  int n = c.size();
  if (c.outputs.empty()) r.violations.push_back("no outputs declared");
  for (int o : c.outputs)
    if (o < 0 || o >= n)
      r.violations.push_back("output id out of range: " + std::to_string(o));
  bool refs_ok = true;
  for (int i = 0; i < n; i++) {
    const Gate& g = c.gates[i];
    for (int in : g.inputs)
      if (in < 0 || in >= n) {
        r.violations.push_back("unknown id " + std::to_string(in) + " feeding " + c.name_of(i));
        refs_ok = false;
      }
    switch (g.kind) {
      case GateKind::Input:
      case GateKind::ConstTrue:
      case GateKind::ConstFalse:
        if (!g.inputs.empty())
          r.violations.push_back(std::string(gate_kind_name(g.kind)) + " arity: " + c.name_of(i) +
                                 " must have no inputs");
        break;
      case GateKind::Not:
        if (g.inputs.size() != 1) r.violations.push_back("NOT arity: " + c.name_of(i));
        break;
      case GateKind::And:
      case GateKind::Or:
        if (g.inputs.empty())
          r.violations.push_back(std::string(gate_kind_name(g.kind)) + " arity: " + c.name_of(i) +
                                 " needs fan-in >= 1");
        break;
    }
  }
  // variables must equal the input gate names, no duplicates
  std::vector<std::string> input_names;
  for (const auto& g : c.gates)
    if (g.kind == GateKind::Input) input_names.push_back(g.var);
  {
    std::unordered_set<std::string> seen;
    for (const auto& v : input_names)
      if (!seen.insert(v).second) r.violations.push_back("duplicate variable: " + v);
  }
  std::vector<std::string> declared = c.variables, actual = input_names;
  std::sort(declared.begin(), declared.end());
  std::sort(actual.begin(), actual.end());
  if (declared != actual) r.violations.push_back("variable list does not match input gates");
  if (refs_ok && !topo_order(c)) r.violations.push_back("cycle: " + cycle_witness(c));
  return r;
}

std::vector<char> evaluate(const Circuit& c, const Assignment& a) {
  std::vector<std::string> missing;
  for (const auto& v : c.variables)
    if (!a.count(v)) missing.push_back(v);
  if (!missing.empty()) {
    std::string msg = "partial assignment, missing:";
    for (const auto& v : missing) msg += " " + v;
    fail(Errc::invalid_input, msg);
  }
  auto order = topo_order(c);
  if (!order) fail(Errc::invalid_input, "evaluate: circuit has a cycle");
  std::vector<char> val(c.size(), 0);
  for (int id : *order) {
    const Gate& g = c.gates[id];
    switch (g.kind) {
      case GateKind::Input: val[id] = a.at(g.var); break;
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
  return val;
}

std::vector<std::pair<int, int>> circuit_arcs(const Circuit& c) {
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < c.size(); i++)
    for (int in : c.gates[i].inputs) arcs.emplace_back(in, i);
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

// ---- double-negation elimination ----

NormalizeResult normalize_not_chains_mapped(const Circuit& c) {
  int n = c.size();
  if (!topo_order(c)) fail(Errc::invalid_input, "normalize: circuit has a cycle");
  auto is_not = [&](int id) { return c.gates[id].kind == GateKind::Not; };

  // chase(v): skip pairs of stacked NOT gates; lands on the equivalent gate.
  std::vector<int> chase(n, -1);
  auto order = *topo_order(c);
  for (int id : order) {
    if (is_not(id) && is_not(c.gates[id].inputs[0]))
      chase[id] = chase[c.gates[c.gates[id].inputs[0]].inputs[0]];
    else
      chase[id] = id;
  }

  // chain base y / first NOT above it, for decomposition reuse
  std::vector<int> chain_base(n, -1), chain_first(n, -1);
  for (int id : order) {
    if (!is_not(id)) continue;
    int in = c.gates[id].inputs[0];
    if (!is_not(in)) {
      chain_base[id] = in;
      chain_first[id] = id;
    } else {
      chain_base[id] = chain_base[in];
      chain_first[id] = chain_first[in];
    }
  }

  // rewire consumers and outputs
  std::vector<std::vector<int>> new_inputs(n);
  std::vector<int> fanout(n, 0);
  for (int i = 0; i < n; i++) {
    if (is_not(i) && chase[i] != i) continue;  // to be dropped if unused
    new_inputs[i] = c.gates[i].inputs;
    for (int& in : new_inputs[i]) in = chase[in];
  }
  std::vector<int> new_outputs = c.outputs;
  for (int& o : new_outputs) o = chase[o];
  std::vector<char> alive(n, 1);
  std::vector<char> is_output(n, 0);
  for (int o : new_outputs) is_output[o] = 1;
  for (int i = 0; i < n; i++) {
    if (is_not(i) && chase[i] != i)
      alive[i] = 0;
    else
      for (int in : new_inputs[i]) fanout[in]++;
  }
  // a chain's first NOT may now be dead as well; sweep NOTs that lost all
  // consumers to the rewiring (pre-existing dangling gates stay put)
  std::vector<int> lost(n, 0);
  for (int i = 0; i < n; i++)
    if (!alive[i])
      for (int in : c.gates[i].inputs) lost[in]++;
  std::vector<int> work;
  for (int i = 0; i < n; i++)
    if (alive[i] && is_not(i) && fanout[i] == 0 && !is_output[i] && lost[i] > 0) work.push_back(i);
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    if (!alive[v] || !is_not(v) || fanout[v] > 0 || is_output[v]) continue;
    alive[v] = 0;
    for (int in : new_inputs[v]) {
      if (--fanout[in] == 0 && is_not(in) && !is_output[in]) work.push_back(in);
    }
    new_inputs[v].clear();
  }

  // dense renumbering
  NormalizeResult res;
  std::vector<int> remap(n, -1);
  for (int i = 0; i < n; i++) {
    if (!alive[i]) continue;
    remap[i] = res.circuit.size();
    Gate g = c.gates[i];
    g.inputs = new_inputs[i];
    res.circuit.gates.push_back(std::move(g));
    res.circuit.names.push_back(i < (int)c.names.size() ? c.names[i] : std::string());
    if (c.gates[i].kind == GateKind::Input) res.circuit.variables.push_back(c.gates[i].var);
  }
  for (auto& g : res.circuit.gates)
    for (int& in : g.inputs) in = remap[in];
  for (int o : new_outputs) res.circuit.outputs.push_back(remap[o]);

  // Which chains fed even-parity consumers (their base gained new wires)?
  std::vector<char> base_needed(n, 0);
  for (int i = 0; i < n; i++) {
    if (!alive[i]) continue;
    for (size_t j = 0; j < new_inputs[i].size(); j++) {
      int old_in = c.gates[i].inputs[j];
      if (old_in != new_inputs[i][j] && !is_not(new_inputs[i][j]))
        base_needed[new_inputs[i][j]] = 1;
    }
  }
  for (size_t j = 0; j < c.outputs.size(); j++) {
    int o = c.outputs[j], t = new_outputs[j];
    if (o != t && !is_not(t)) base_needed[t] = 1;
  }

  res.bag_map.assign(n, {});
  res.gate_map = remap;
  for (int i = 0; i < n; i++) {
    if (alive[i]) {
      res.bag_map[i].push_back(remap[i]);
      if (is_not(i) && chain_base[i] != -1 && base_needed[chain_base[i]])
        res.bag_map[i].push_back(remap[chain_base[i]]);
    } else {
      int first = chain_first[i];
      if (first != -1 && alive[first]) res.bag_map[i].push_back(remap[first]);
      if (chain_base[i] != -1 && base_needed[chain_base[i]])
        res.bag_map[i].push_back(remap[chain_base[i]]);
    }
    std::sort(res.bag_map[i].begin(), res.bag_map[i].end());
    res.bag_map[i].erase(std::unique(res.bag_map[i].begin(), res.bag_map[i].end()),
                         res.bag_map[i].end());
  }
  return res;
}

Circuit normalize_not_chains(const Circuit& c) { return normalize_not_chains_mapped(c).circuit; }

// ---- constant propagation ----

Circuit propagate_constants(const Circuit& c) {
  auto order = topo_order(c);
  if (!order) fail(Errc::invalid_input, "propagate_constants: circuit has a cycle");
  int n = c.size();
  // value[i]: 0/1 if gate i folds to a constant, -1 otherwise
  std::vector<int> value(n, -1);
  // forward[i]: gate i is transparent, stands for some other old gate
  std::vector<int> forward(n, -1);
  auto resolve = [&](int id) {
    while (forward[id] != -1) id = forward[id];
    return id;
  };
  std::vector<std::vector<int>> kept_inputs(n);
  for (int id : *order) {
    const Gate& g = c.gates[id];
    switch (g.kind) {
      case GateKind::Input: break;
      case GateKind::ConstTrue: value[id] = 1; break;
      case GateKind::ConstFalse: value[id] = 0; break;
      case GateKind::Not: {
        int in = g.inputs[0];
        if (value[in] != -1) value[id] = 1 - value[in];
        else kept_inputs[id] = {resolve(in)};
        break;
      }
      case GateKind::And:
      case GateKind::Or: {
        bool is_and = g.kind == GateKind::And;
        int absorbing = is_and ? 0 : 1;
        bool dropped = false, absorbed = false;
        std::vector<int> kept;
        for (int in : g.inputs) {
          if (value[in] != -1) {
            dropped = true;
            if (value[in] == absorbing) absorbed = true;
          } else {
            kept.push_back(resolve(in));
          }
        }
        if (absorbed) value[id] = absorbing;
        else if (kept.empty()) value[id] = 1 - absorbing;
        else if (kept.size() == 1 && dropped) forward[id] = kept[0];
        else kept_inputs[id] = std::move(kept);
        break;
      }
    }
  }
  // surviving gates keep their relative order
  Circuit out;
  std::vector<int> remap(n, -1);
  for (int i = 0; i < n; i++) {
    if (value[i] != -1 || forward[i] != -1) continue;
    remap[i] = out.size();
    Gate g = c.gates[i];
    g.inputs = kept_inputs[i];
    out.gates.push_back(std::move(g));
    out.names.push_back(i < (int)c.names.size() ? c.names[i] : std::string());
    if (c.gates[i].kind == GateKind::Input) out.variables.push_back(c.gates[i].var);
  }
  for (auto& g : out.gates)
    for (int& in : g.inputs) in = remap[resolve(in)];
  int const_true = -1, const_false = -1;
  for (int o : c.outputs) {
    int r = resolve(o);
    if (value[r] != -1) {
      int& slot = value[r] ? const_true : const_false;
      if (slot == -1) slot = out.add_const(value[r]);
      out.outputs.push_back(slot);
    } else {
      out.outputs.push_back(remap[r]);
    }
  }
  return out;
}

// ---- text format ----

Circuit parse_circuit(std::istream& in) {
  Circuit c;
  std::unordered_map<std::string, int> by_token;
  auto lookup = [&](const std::string& tok, int lineno) {
    auto it = by_token.find(tok);
    if (it == by_token.end())
      fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": unknown token '" + tok + "'");
    return it->second;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "var") {
      std::string name;
      if (!(ls >> name)) fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": var needs a name");
      if (by_token.count(name))
        fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": duplicate token '" + name + "'");
      by_token[name] = c.add_input(name);
    } else if (word == "gate") {
      std::string id, kind, tok;
      if (!(ls >> id >> kind))
        fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": gate needs id and kind");
      GateKind k;
      if (kind == "AND") k = GateKind::And;
      else if (kind == "OR") k = GateKind::Or;
      else if (kind == "NOT") k = GateKind::Not;
      else fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": bad gate kind '" + kind + "'");
      std::vector<int> ins;
      while (ls >> tok) ins.push_back(lookup(tok, lineno));
      if (by_token.count(id))
        fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": duplicate token '" + id + "'");
      int g = c.add_gate(k, std::move(ins));
      c.names[g] = id;
      by_token[id] = g;
    } else if (word == "const") {
      std::string id;
      int v;
      if (!(ls >> id >> v) || (v != 0 && v != 1))
        fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": const needs id and 0|1");
      if (by_token.count(id))
        fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": duplicate token '" + id + "'");
      int g = c.add_const(v == 1);
      c.names[g] = id;
      by_token[id] = g;
    } else if (word == "output") {
      std::string id;
      if (!(ls >> id)) fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": output needs id");
      c.outputs.push_back(lookup(id, lineno));
    } else {
      fail(Errc::parse, "circuit line " + std::to_string(lineno) + ": unknown directive '" + word + "'");
    }
  }
  return c;
}

Circuit parse_circuit_string(const std::string& text) {
  std::istringstream in(text);
  return parse_circuit(in);
}

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open circuit file: " + path);
  return parse_circuit(in);
}

void write_circuit(std::ostream& out, const Circuit& c) {
  for (int i = 0; i < c.size(); i++)
    if (c.gates[i].kind == GateKind::Input) out << "var " << c.gates[i].var << "\n";
  for (int i = 0; i < c.size(); i++) {
    const Gate& g = c.gates[i];
    switch (g.kind) {
      case GateKind::Input: break;
      case GateKind::ConstTrue: out << "const " << c.name_of(i) << " 1\n"; break;
      case GateKind::ConstFalse: out << "const " << c.name_of(i) << " 0\n"; break;
      default: {
        out << "gate " << c.name_of(i) << ' '
            << (g.kind == GateKind::And ? "AND" : g.kind == GateKind::Or ? "OR" : "NOT");
        for (int in : g.inputs) out << ' ' << c.name_of(in);
        out << "\n";
      }
    }
  }
  for (int o : c.outputs) out << "output " << c.name_of(o) << "\n";
}

std::string circuit_to_string(const Circuit& c) {
  std::ostringstream out;
  write_circuit(out, c);
  return out.str();
}

}  // namespace kc
