#include "kc/cw2tw.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kc {

std::vector<int> GateAssociation::label_gates(int label) const {
  std::vector<int> g;
  auto push = [&](int x) {
    if (x >= 0) g.push_back(x);
  };
  push(oand[label]);
  push(oor[label]);
  push(in_entry[label]);
  push(in_second[label]);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

int GateAssociation::logical_gate_count(int original_gates) const {
  int cnt = original_gates;
  for (size_t l = 0; l < oand.size(); l++) {
    if (oand[l] >= 0 && oand[l] >= original_gates) cnt++;
    if (oor[l] >= 0 && oor[l] >= original_gates) cnt++;
    if (in_entry[l] >= 0 && in_entry[l] >= original_gates) cnt++;  // funnel counts once
  }
  return cnt;
}

namespace {

// bottom-up over the label registry without recursion
template <typename Leaf, typename Join>
std::vector<char> label_fold(const Scd& s, Leaf leaf, Join join) {
  std::vector<char> out(s.label_count(), 0), done(s.label_count(), 0);
  for (int l0 = 0; l0 < s.label_count(); l0++) {
    std::vector<int> stack{l0};
    while (!stack.empty()) {
      int l = stack.back();
      if (done[l]) {
        stack.pop_back();
        continue;
      }
      const ScdLabel& lab = s.labels[l];
      if (lab.singleton()) {
        out[l] = leaf(lab.vertex);
        done[l] = 1;
        stack.pop_back();
      } else if (done[lab.child0] && done[lab.child1]) {
        out[l] = join(out[lab.child0], out[lab.child1]);
        done[l] = 1;
        stack.pop_back();
      } else {
        stack.push_back(lab.child0);
        stack.push_back(lab.child1);
      }
    }
  }
  return out;
}

}  // namespace

FstarResult build_fstar(const Circuit& c, const Scd& s, InGateMode mode) {
  for (const auto& g : c.gates)
    if (g.kind == GateKind::ConstTrue || g.kind == GateKind::ConstFalse)
      fail(Errc::invalid_input, "build_fstar: constant gates present, propagate them first");
  Graph dag = circuit_dag(c);
  {
    ScdReport r = validate_scd(s, &dag);
    if (!r.ok())
      fail(Errc::invalid_input,
           "build_fstar: scd is not a decomposition of the circuit DAG:\n" + r.to_string());
  }
  std::vector<LabelType> type = derive_label_types(s, c);
  for (int l = 0; l < s.label_count(); l++)
    if (!s.labels[l].singleton() && type[l] == LabelType::Untyped)
      fail(Errc::invalid_input,
           "build_fstar: scd is not type-respecting (mixed label " + std::to_string(l) + ")");
  std::vector<char> has_input = label_fold(
      s, [&](int v) { return char(c.gates[v].kind == GateKind::Input); },
      [](char a, char b) { return char(a || b); });

  int n = c.size();
  int L = s.label_count();
  GateAssociation assoc;
  assoc.oand.assign(L, -1);
  assoc.oor.assign(L, -1);
  assoc.in_entry.assign(L, -1);
  assoc.in_exit.assign(L, -1);
  assoc.in_second.assign(L, -1);

  // originals first, collectors and funnels after, label order
  std::vector<GateKind> kind(n);
  for (int i = 0; i < n; i++) kind[i] = c.gates[i].kind;
  auto new_gate = [&](GateKind k) {
    kind.push_back(k);
    return (int)kind.size() - 1;
  };
  for (int l = 0; l < L; l++) {
    if (s.labels[l].singleton()) {
      int g = s.labels[l].vertex;
      assoc.oand[l] = assoc.oor[l] = assoc.in_entry[l] = assoc.in_exit[l] = g;
      continue;
    }
    assoc.oand[l] = new_gate(GateKind::And);
    assoc.oor[l] = new_gate(GateKind::Or);
    if (has_input[l]) continue;
    switch (type[l]) {
      case LabelType::And: assoc.in_entry[l] = assoc.in_exit[l] = new_gate(GateKind::And); break;
      case LabelType::Or: assoc.in_entry[l] = assoc.in_exit[l] = new_gate(GateKind::Or); break;
      case LabelType::Unary:
        if (mode == InGateMode::UnaryAnd) {
          assoc.in_entry[l] = assoc.in_exit[l] = new_gate(GateKind::And);
        } else {
          assoc.in_entry[l] = new_gate(GateKind::Not);
          assoc.in_second[l] = assoc.in_exit[l] = new_gate(GateKind::Not);
        }
        break;
      default: break;
    }
  }

  std::vector<std::vector<int>> inputs(kind.size());
  if (mode == InGateMode::DoubleNot)
    for (int l = 0; l < L; l++)
      if (assoc.in_second[l] >= 0) inputs[assoc.in_second[l]].push_back(assoc.in_entry[l]);

  for (const auto& nd : s.nodes) {
    if (nd.op == ScdNode::Op::UnionLabels) {
      int l = nd.label;
      inputs[assoc.oand[l]].push_back(assoc.oand[nd.arg0]);
      inputs[assoc.oand[l]].push_back(assoc.oand[nd.arg1]);
      inputs[assoc.oor[l]].push_back(assoc.oor[nd.arg0]);
      inputs[assoc.oor[l]].push_back(assoc.oor[nd.arg1]);
      if (!has_input[l]) {
        inputs[assoc.in_entry[nd.arg0]].push_back(assoc.in_exit[l]);
        inputs[assoc.in_entry[nd.arg1]].push_back(assoc.in_exit[l]);
      }
    } else if (nd.op == ScdNode::Op::NewAdjacency) {
      int src = nd.arg0, dst = nd.arg1;
      if (has_input[dst])
        fail(Errc::invalid_input, "build_fstar: adjacency arc into a label with input gates");
      switch (type[dst]) {
        case LabelType::And: inputs[assoc.in_entry[dst]].push_back(assoc.oand[src]); break;
        case LabelType::Or: inputs[assoc.in_entry[dst]].push_back(assoc.oor[src]); break;
        case LabelType::Unary: inputs[assoc.in_entry[dst]].push_back(assoc.oand[src]); break;
        default: break;
      }
    }
  }
  for (auto& in : inputs) {
    std::sort(in.begin(), in.end());
    in.erase(std::unique(in.begin(), in.end()), in.end());
  }

  // prune input-less funnels, cascading to children, label order
  std::vector<int> fanin(kind.size());
  for (size_t g = 0; g < kind.size(); g++) fanin[g] = (int)inputs[g].size();
  std::vector<std::vector<int>> funnel_children(L);  // label -> labels fed by its funnel
  for (const auto& nd : s.nodes)
    if (nd.op == ScdNode::Op::UnionLabels && !has_input[nd.label]) {
      funnel_children[nd.label].push_back(nd.arg0);
      funnel_children[nd.label].push_back(nd.arg1);
    }
  std::vector<char> pruned(L, 0);
  std::set<int> work;
  for (int l = 0; l < L; l++)
    if (!s.labels[l].singleton() && assoc.in_entry[l] >= 0 && fanin[assoc.in_entry[l]] == 0)
      work.insert(l);
  std::vector<char> dead(kind.size(), 0);
  while (!work.empty()) {
    int l = *work.begin();
    work.erase(work.begin());
    if (pruned[l]) continue;
    pruned[l] = 1;
    dead[assoc.in_entry[l]] = 1;
    if (assoc.in_second[l] >= 0) dead[assoc.in_second[l]] = 1;
    int out_gate = assoc.in_exit[l];
    for (int ch : funnel_children[l]) {
      if (pruned[ch] && !s.labels[ch].singleton()) continue;
      auto& ins = inputs[assoc.in_entry[ch]];
      auto it = std::find(ins.begin(), ins.end(), out_gate);
      if (it != ins.end()) {
        ins.erase(it);
        // originals never get pruned; an empty funnel cascades
        if (ins.empty() && !s.labels[ch].singleton()) work.insert(ch);
      }
    }
    assoc.in_entry[l] = assoc.in_exit[l] = assoc.in_second[l] = -1;
  }

  // compact; originals keep their ids
  FstarResult res;
  std::vector<int> remap(kind.size(), -1);
  for (size_t g = 0; g < kind.size(); g++) {
    if (dead[g]) continue;
    remap[g] = res.fstar.size();
    Gate gate;
    gate.kind = kind[g];
    if ((int)g < n) {
      gate.var = c.gates[g].var;
      res.fstar.names.push_back((int)g < (int)c.names.size() ? c.names[g] : std::string());
    } else {
      res.fstar.names.emplace_back();
    }
    gate.inputs = std::move(inputs[g]);
    res.fstar.gates.push_back(std::move(gate));
  }
  for (auto& g : res.fstar.gates)
    for (int& in : g.inputs) in = remap[in];
  res.fstar.variables = c.variables;
  res.fstar.outputs = c.outputs;
  auto remap_assoc = [&](std::vector<int>& v) {
    for (int& x : v)
      if (x >= 0) x = remap[x];
  };
  remap_assoc(assoc.oand);
  remap_assoc(assoc.oor);
  remap_assoc(assoc.in_entry);
  remap_assoc(assoc.in_exit);
  remap_assoc(assoc.in_second);
  res.assoc = std::move(assoc);

  ValidationReport vr = validate_circuit(res.fstar);
  if (!vr.ok()) fail(Errc::internal, "build_fstar produced an invalid circuit:\n" + vr.to_string());
  return res;
}

Graph representation_graph(const Scd& s) {
  ScdReport r = validate_scd(s);
  if (!r.ok()) fail(Errc::invalid_input, "invalid scd:\n" + r.to_string());
  Graph g;
  g.directed = false;
  g.n = s.label_count();
  for (const auto& nd : s.nodes) {
    if (nd.op == ScdNode::Op::UnionLabels) {
      g.add_edge(nd.arg0, nd.label);
      g.add_edge(nd.arg1, nd.label);
    } else if (nd.op == ScdNode::Op::NewAdjacency) {
      g.add_edge(nd.arg0, nd.arg1);
    }
  }
  g.dedupe();
  return g;
}

TreeDecomposition fstar_tree_decomposition(const Scd& s, const GateAssociation& assoc) {
  if ((int)assoc.oand.size() != s.label_count())
    fail(Errc::invalid_input, "fstar_tree_decomposition: association does not match scd");
  // mirror the decomposition tree with label bags, skipping adjacency nodes
  TreeDecomposition td;
  std::vector<std::vector<int>> live(s.size());
  std::vector<int> tnode(s.size(), -1);
  auto order = s.postorder();
  for (int n : order) {
    const ScdNode& nd = s.nodes[n];
    switch (nd.op) {
      case ScdNode::Op::Leaf: {
        live[n] = {nd.label};
        tnode[n] = td.add_node(live[n], -1);
        break;
      }
      case ScdNode::Op::AddVertex: {
        live[n] = std::move(live[nd.child0]);
        live[n].insert(std::upper_bound(live[n].begin(), live[n].end(), nd.label), nd.label);
        tnode[n] = td.add_node(live[n], -1);
        td.nodes[tnode[n]].children.push_back(tnode[nd.child0]);
        td.nodes[tnode[nd.child0]].parent = tnode[n];
        break;
      }
      case ScdNode::Op::UnionLabels: {
        std::vector<int> prev = std::move(live[nd.child0]);
        live[n].reserve(prev.size());
        for (int l : prev)
          if (l != nd.arg0 && l != nd.arg1) live[n].push_back(l);
        live[n].insert(std::upper_bound(live[n].begin(), live[n].end(), nd.label), nd.label);
        tnode[n] = td.add_node(live[n], -1);
        td.nodes[tnode[n]].children.push_back(tnode[nd.child0]);
        td.nodes[tnode[nd.child0]].parent = tnode[n];
        // the created label also joins the bag below, witnessing both
        // child-parent pairs
        auto& cbag = td.nodes[tnode[nd.child0]].bag;
        cbag.insert(std::upper_bound(cbag.begin(), cbag.end(), nd.label), nd.label);
        break;
      }
      case ScdNode::Op::NewAdjacency: {
        live[n] = std::move(live[nd.child0]);
        tnode[n] = tnode[nd.child0];  // no bag of its own
        break;
      }
      case ScdNode::Op::Combine: {
        std::merge(live[nd.child0].begin(), live[nd.child0].end(), live[nd.child1].begin(),
                   live[nd.child1].end(), std::back_inserter(live[n]));
        tnode[n] = td.add_node(live[n], -1);
        for (int ch : {tnode[nd.child0], tnode[nd.child1]}) {
          td.nodes[tnode[n]].children.push_back(ch);
          td.nodes[ch].parent = tnode[n];
        }
        break;
      }
    }
  }
  td.root = tnode[s.root];

  // contract edges whose bags are nested; brings the bag count under the
  // label count
  std::vector<char> gone(td.size(), 0);
  bool changed = true;
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  while (changed) {
    changed = false;
    for (int t = 0; t < td.size(); t++) {
      if (gone[t]) continue;
      int p = td.nodes[t].parent;
      if (p < 0) continue;
      bool tp = subset(td.nodes[t].bag, td.nodes[p].bag);
      bool pt = subset(td.nodes[p].bag, td.nodes[t].bag);
      if (!tp && !pt) continue;
      if (pt && !tp) td.nodes[p].bag = td.nodes[t].bag;
      // merge t into p
      auto& pc = td.nodes[p].children;
      pc.erase(std::remove(pc.begin(), pc.end(), t), pc.end());
      for (int ch : td.nodes[t].children) {
        td.nodes[ch].parent = p;
        pc.push_back(ch);
      }
      td.nodes[t].children.clear();
      gone[t] = 1;
      changed = true;
    }
  }
  // compact and substitute labels by their gates
  TreeDecomposition out;
  std::vector<int> map(td.size(), -1);
  for (int t = 0; t < td.size(); t++) {
    if (gone[t]) continue;
    std::vector<int> bag;
    for (int l : td.nodes[t].bag) {
      auto g = assoc.label_gates(l);
      bag.insert(bag.end(), g.begin(), g.end());
    }
    map[t] = out.add_node(std::move(bag), -1);
  }
  for (int t = 0; t < td.size(); t++) {
    if (gone[t]) continue;
    for (int ch : td.nodes[t].children) {
      out.nodes[map[ch]].parent = map[t];
      out.nodes[map[t]].children.push_back(map[ch]);
    }
  }
  out.root = map[td.root];
  return out;
}

std::string TransformStats::to_string() const {
  std::ostringstream os;
  os << "gates_in " << gates_in << "\n";
  os << "gates_out " << gates_out << "\n";
  os << "logical_gates_out " << logical_gates_out << "\n";
  if (cd_width >= 0) os << "cd_width " << cd_width << "\n";
  os << "scd_width " << scd_width << "\n";
  os << "typed_scd_width " << typed_width << "\n";
  os << "td_width " << td_width << "\n";
  os << "td_bags " << td_bags << "\n";
  return os.str();
}

TransformResult transform_scd(const Circuit& c, const Scd& s, InGateMode mode) {
  TransformResult res;
  res.stats.gates_in = c.size();
  res.stats.scd_width = scd_width(s);
  res.typed_scd = make_type_respecting(s, c);
  res.stats.typed_width = scd_width(res.typed_scd);
  auto fr = build_fstar(c, res.typed_scd, mode);
  res.fstar = std::move(fr.fstar);
  res.assoc = std::move(fr.assoc);
  res.td = fstar_tree_decomposition(res.typed_scd, res.assoc);
  res.stats.gates_out = res.fstar.size();
  res.stats.logical_gates_out = res.assoc.logical_gate_count(c.size());
  res.stats.td_width = res.td.width();
  res.stats.td_bags = res.td.size();
  return res;
}

TransformResult transform(const Circuit& c, const CliqueDecomposition& cd, InGateMode mode) {
  Scd s = clique_to_scd(cd);
  TransformResult res = transform_scd(c, s, mode);
  res.stats.cd_width = cd.width();
  return res;
}

}  // namespace kc
