#include "kc/tseitin.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace kc {

namespace {

// literal of a gate's output in the encoding; NOT gates flip their input
int gate_literal(const Circuit& c, const TseitinMap& m, int g) {
  const Gate& gate = c.gates[g];
  if (gate.kind == GateKind::Not) {
    int in = gate.inputs[0];
    if (c.gates[in].kind == GateKind::Not)
      fail(Errc::invalid_input, "tseitin: stacked NOT gates, normalize first");
    return -gate_literal(c, m, in);
  }
  return make_lit(m.gate_var[g], true);
}

}  // namespace

std::pair<Cnf, TseitinMap> tseitin_transform(const Circuit& c, int output) {
  ValidationReport vr = validate_circuit(c);
  if (!vr.ok()) fail(Errc::invalid_input, "tseitin: invalid circuit:\n" + vr.to_string());
  if (output < 0 || output >= c.size()) fail(Errc::invalid_input, "tseitin: bad output id");
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::ConstTrue || g.kind == GateKind::ConstFalse)
      fail(Errc::invalid_input, "tseitin: constant gates present, propagate them first");
    if (g.kind == GateKind::Not && c.gates[g.inputs[0]].kind == GateKind::Not)
      fail(Errc::invalid_input, "tseitin: stacked NOT gates, normalize first");
  }

  Cnf f;
  TseitinMap m;
  m.gate_var.assign(c.size(), -1);
  f.variables = c.variables;
  std::unordered_map<std::string, int> var_index;
  for (int i = 0; i < f.var_count(); i++) var_index[f.variables[i]] = i;
  for (int g = 0; g < c.size(); g++)
    if (c.gates[g].kind == GateKind::Input) m.gate_var[g] = var_index.at(c.gates[g].var);
  std::unordered_set<std::string> taken(f.variables.begin(), f.variables.end());
  for (int g = 0; g < c.size(); g++) {
    if (c.gates[g].kind != GateKind::And && c.gates[g].kind != GateKind::Or) continue;
    std::string name = c.name_of(g);
    while (taken.count(name)) name += "'";
    taken.insert(name);
    m.gate_var[g] = f.var_count();
    f.variables.push_back(name);
  }

  for (int g = 0; g < c.size(); g++) {
    const Gate& gate = c.gates[g];
    if (gate.kind != GateKind::And && gate.kind != GateKind::Or) continue;
    int z = make_lit(m.gate_var[g], true);
    // distinct input literals, first contributing gate kept for the tag
    std::vector<std::pair<int, int>> ins;  // (literal, input gate)
    for (int in : gate.inputs) {
      int t = gate_literal(c, m, in);
      bool seen = false;
      for (auto& [lit, src] : ins) seen = seen || lit == t;
      if (!seen) ins.emplace_back(t, in);
    }
    std::vector<int> carrying;
    for (auto [t, src] : ins) {
      if (gate.kind == GateKind::And) {
        f.add_clause({t, -z});
        carrying.push_back(-t);
      } else {
        f.add_clause({-t, z});
        carrying.push_back(t);
      }
      m.tags.push_back({ClauseTag::Auxiliary, g, src});
    }
    carrying.push_back(gate.kind == GateKind::And ? z : -z);
    if (auto cl = try_make_clause(carrying)) {
      f.clauses.push_back(std::move(*cl));
      m.tags.push_back({ClauseTag::Carrying, g, -1});
    } else {
      // complementary inputs: the wide clause is vacuous, the binary ones
      // already pin the gate
      m.dropped.push_back({ClauseTag::Carrying, g, -1});
    }
  }
  m.output_lit = gate_literal(c, m, output);
  f.add_clause({m.output_lit});
  m.tags.push_back({ClauseTag::OutputUnit, -1, -1});
  return {std::move(f), std::move(m)};
}

TreeDecomposition lift_tree_decomposition(const TreeDecomposition& td, const Circuit& c,
                                          const Cnf& f, const TseitinMap& m) {
  if ((int)m.gate_var.size() != c.size() || (int)m.tags.size() != f.clause_count())
    fail(Errc::invalid_input, "lift: inconsistent inputs");
  Graph dag = circuit_dag(c);
  TdReport tr = validate_tree_decomposition(td, dag);
  if (!tr.ok())
    fail(Errc::invalid_input, "lift: invalid circuit decomposition:\n" + tr.to_string());

  int nv = f.var_count();
  std::vector<int> carrying_clause(c.size(), -1);
  int unit_clause = -1;
  for (int i = 0; i < f.clause_count(); i++) {
    if (m.tags[i].tag == ClauseTag::Carrying) carrying_clause[m.tags[i].gate] = i;
    if (m.tags[i].tag == ClauseTag::OutputUnit) unit_clause = i;
  }

  std::vector<std::vector<int>> sub(c.size());
  for (int g = 0; g < c.size(); g++) {
    switch (c.gates[g].kind) {
      case GateKind::Input: sub[g] = {m.gate_var[g]}; break;
      case GateKind::And:
      case GateKind::Or:
        sub[g] = {m.gate_var[g]};
        if (carrying_clause[g] >= 0) sub[g].push_back(nv + carrying_clause[g]);
        break;
      case GateKind::Not: sub[g] = {lit_var(gate_literal(c, m, g))}; break;
      default: fail(Errc::invalid_input, "lift: constant gates present");
    }
  }
  TreeDecomposition out = substitute_bags(td, sub);

  auto lowest_with = [&](int a, int b) -> int {
    for (int t = 0; t < td.size(); t++) {
      const auto& bag = td.nodes[t].bag;
      if (std::binary_search(bag.begin(), bag.end(), a) &&
          std::binary_search(bag.begin(), bag.end(), b))
        return t;
    }
    fail(Errc::internal, "lift: no bag witnesses a wire");
  };
  for (int i = 0; i < f.clause_count(); i++) {
    if (m.tags[i].tag != ClauseTag::Auxiliary) continue;
    int gate = m.tags[i].gate, in = m.tags[i].input_gate;
    int t = lowest_with(in, gate);
    out.add_node({m.gate_var[gate], lit_var(gate_literal(c, m, in)), nv + i}, t);
  }
  {
    int y = lit_var(m.output_lit);
    int host = -1;
    for (int t = 0; t < out.size() && host < 0; t++)
      if (std::binary_search(out.nodes[t].bag.begin(), out.nodes[t].bag.end(), y)) host = t;
    if (host < 0) fail(Errc::internal, "lift: output variable in no bag");
    out.add_node({y, nv + unit_clause}, host);
  }
  return out;
}

void write_tseitin_map(std::ostream& out, const TseitinMap& m) {
  out << "outputlit " << m.output_lit << "\n";
  for (size_t g = 0; g < m.gate_var.size(); g++)
    if (m.gate_var[g] >= 0) out << "gatevar " << g << ' ' << m.gate_var[g] << "\n";
  for (size_t i = 0; i < m.tags.size(); i++) {
    const TaggedClause& t = m.tags[i];
    out << "clause " << i << ' ';
    if (t.tag == ClauseTag::Carrying) out << "carrying " << t.gate;
    else if (t.tag == ClauseTag::Auxiliary) out << "aux " << t.gate << ' ' << t.input_gate;
    else out << "unit";
    out << "\n";
  }
  for (const TaggedClause& t : m.dropped) out << "dropped carrying " << t.gate << "\n";
}

std::string tseitin_map_to_string(const TseitinMap& m) {
  std::ostringstream out;
  write_tseitin_map(out, m);
  return out.str();
}

TseitinMap parse_tseitin_map(std::istream& in) {
  TseitinMap m;
  std::string line;
  int lineno = 0;
  std::vector<std::pair<int, int>> gatevars;
  std::vector<std::pair<int, TaggedClause>> tags;
  while (std::getline(in, line)) {
    lineno++;
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w)) continue;
    if (w == "outputlit") {
      if (!(ls >> m.output_lit)) fail(Errc::parse, "tseitin map: bad outputlit");
    } else if (w == "gatevar") {
      int g, v;
      if (!(ls >> g >> v)) fail(Errc::parse, "tseitin map: bad gatevar");
      gatevars.emplace_back(g, v);
    } else if (w == "clause") {
      int id;
      std::string kind;
      TaggedClause t;
      if (!(ls >> id >> kind)) fail(Errc::parse, "tseitin map: bad clause line");
      if (kind == "carrying") {
        t.tag = ClauseTag::Carrying;
        if (!(ls >> t.gate)) fail(Errc::parse, "tseitin map: bad carrying line");
      } else if (kind == "aux") {
        t.tag = ClauseTag::Auxiliary;
        if (!(ls >> t.gate >> t.input_gate)) fail(Errc::parse, "tseitin map: bad aux line");
      } else if (kind == "unit") {
        t.tag = ClauseTag::OutputUnit;
      } else {
        fail(Errc::parse, "tseitin map: unknown clause kind " + kind);
      }
      tags.emplace_back(id, t);
    } else if (w == "dropped") {
      std::string kind;
      TaggedClause t;
      t.tag = ClauseTag::Carrying;
      if (!(ls >> kind >> t.gate) || kind != "carrying")
        fail(Errc::parse, "tseitin map: bad dropped line");
      m.dropped.push_back(t);
    } else {
      fail(Errc::parse, "tseitin map line " + std::to_string(lineno) + ": unknown directive");
    }
  }
  int maxgate = -1;
  for (auto [g, v] : gatevars) maxgate = std::max(maxgate, g);
  for (auto& [id, t] : tags) maxgate = std::max({maxgate, t.gate, t.input_gate});
  m.gate_var.assign(maxgate + 1, -1);
  for (auto [g, v] : gatevars) m.gate_var[g] = v;
  int maxclause = -1;
  for (auto& [id, t] : tags) maxclause = std::max(maxclause, id);
  m.tags.assign(maxclause + 1, TaggedClause{});
  for (auto& [id, t] : tags) m.tags[id] = t;
  return m;
}

}  // namespace kc
