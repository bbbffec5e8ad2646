#include "kc/scd.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kc/circuit.hpp"

namespace kc {

std::string ScdReport::to_string() const {
  if (ok()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    s += v;
    s += '\n';
  }
  return s;
}

// ---- clique decompositions ----

int CliqueDecomposition::width() const {
  std::unordered_set<int> nums;
  for (const auto& nd : nodes) {
    if (nd.num >= 0) nums.insert(nd.num);
    if (nd.num2 >= 0) nums.insert(nd.num2);
  }
  return static_cast<int>(nums.size());
}

namespace {

std::vector<int> cd_postorder(const CliqueDecomposition& cd) {
  std::vector<int> order;
  if (cd.root < 0) return order;
  std::vector<std::pair<int, int>> stack{{cd.root, 0}};
  while (!stack.empty()) {
    auto& [n, stage] = stack.back();
    const CdNode& nd = cd.nodes[n];
    int child = stage == 0 ? nd.child0 : stage == 1 ? nd.child1 : -1;
    if (stage < 2 && child >= 0) {
      stage++;
      stack.emplace_back(child, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  return order;
}

struct CdState {
  std::map<int, std::vector<int>> classes;  // number -> vertices, kept ordered
};

}  // namespace

ScdReport validate_clique_decomposition(const CliqueDecomposition& cd, const Graph* expected) {
  ScdReport r;
  auto bad = [&](int node, const std::string& what) {
    r.violations.push_back("node " + std::to_string(node) + ": " + what);
  };
  if (cd.root < 0 || cd.root >= cd.size()) {
    r.violations.push_back("missing root");
    return r;
  }
  for (int i = 0; i < cd.size(); i++) {
    const CdNode& nd = cd.nodes[i];
    bool unary = nd.op != CdNode::Op::Create && nd.op != CdNode::Op::Union;
    if (nd.op == CdNode::Op::Create && nd.child0 != -1) bad(i, "leaf with a child");
    if (unary && (nd.child0 < 0 || nd.child1 != -1)) bad(i, "unary op needs one child");
    if (nd.op == CdNode::Op::Union && (nd.child0 < 0 || nd.child1 < 0))
      bad(i, "union needs two children");
  }
  if (!r.ok()) return r;

  std::unordered_set<int> seen_vertices;
  std::vector<CdState> state(cd.size());
  Graph g;
  g.directed = cd.directed;
  for (int n : cd_postorder(cd)) {
    const CdNode& nd = cd.nodes[n];
    switch (nd.op) {
      case CdNode::Op::Create: {
        if (nd.vertex < 0 || !seen_vertices.insert(nd.vertex).second)
          bad(n, "vertex not fresh: " + std::to_string(nd.vertex));
        state[n].classes[nd.num] = {nd.vertex};
        break;
      }
      case CdNode::Op::AddVertex: {
        state[n] = std::move(state[nd.child0]);
        if (nd.vertex < 0 || !seen_vertices.insert(nd.vertex).second)
          bad(n, "vertex not fresh: " + std::to_string(nd.vertex));
        if (state[n].classes.count(nd.num))
          bad(n, "number " + std::to_string(nd.num) + " already in use");
        state[n].classes[nd.num] = {nd.vertex};
        break;
      }
      case CdNode::Op::NewEdges: {
        state[n] = std::move(state[nd.child0]);
        auto i = state[n].classes.find(nd.num), j = state[n].classes.find(nd.num2);
        if (nd.num == nd.num2 || i == state[n].classes.end() || j == state[n].classes.end()) {
          bad(n, "new-edges needs two distinct non-empty numbers");
          break;
        }
        for (int u : i->second)
          for (int v : j->second) g.add_edge(u, v);
        break;
      }
      case CdNode::Op::Relabel: {
        state[n] = std::move(state[nd.child0]);
        auto i = state[n].classes.find(nd.num);
        if (nd.num == nd.num2) bad(n, "relabel onto itself");
        if (i == state[n].classes.end()) break;  // nothing labeled i
        auto& dst = state[n].classes[nd.num2];
        dst.insert(dst.end(), i->second.begin(), i->second.end());
        std::sort(dst.begin(), dst.end());
        state[n].classes.erase(nd.num);
        break;
      }
      case CdNode::Op::Union: {
        state[n] = std::move(state[nd.child0]);
        for (auto& [num, verts] : state[nd.child1].classes) {
          auto& dst = state[n].classes[num];
          dst.insert(dst.end(), verts.begin(), verts.end());
          std::sort(dst.begin(), dst.end());
        }
        break;
      }
    }
  }
  g.n = 0;
  for (int v : seen_vertices) g.n = std::max(g.n, v + 1);
  g.dedupe();
  if (expected) {
    Graph e = *expected;
    e.dedupe();
    std::unordered_set<int> verts(seen_vertices.begin(), seen_vertices.end());
    // vertex sets must match exactly
    if ((int)verts.size() != e.n || g.n != e.n)
      r.violations.push_back("vertex set differs from expected graph");
    if (g.edges != e.edges) r.violations.push_back("edge set differs from expected graph");
  }
  return r;
}

Graph clique_decomposition_graph(const CliqueDecomposition& cd) {
  ScdReport r = validate_clique_decomposition(cd);
  if (!r.ok()) fail(Errc::invalid_input, "invalid clique decomposition:\n" + r.to_string());
  // rebuild the graph (validator discards it)
  Graph g;
  g.directed = cd.directed;
  std::vector<CdState> state(cd.size());
  int maxv = -1;
  for (int n : cd_postorder(cd)) {
    const CdNode& nd = cd.nodes[n];
    switch (nd.op) {
      case CdNode::Op::Create:
        state[n].classes[nd.num] = {nd.vertex};
        maxv = std::max(maxv, nd.vertex);
        break;
      case CdNode::Op::AddVertex:
        state[n] = std::move(state[nd.child0]);
        state[n].classes[nd.num] = {nd.vertex};
        maxv = std::max(maxv, nd.vertex);
        break;
      case CdNode::Op::NewEdges: {
        state[n] = std::move(state[nd.child0]);
        for (int u : state[n].classes[nd.num])
          for (int v : state[n].classes[nd.num2]) g.add_edge(u, v);
        break;
      }
      case CdNode::Op::Relabel: {
        state[n] = std::move(state[nd.child0]);
        auto i = state[n].classes.find(nd.num);
        if (i == state[n].classes.end()) break;
        auto& dst = state[n].classes[nd.num2];
        dst.insert(dst.end(), i->second.begin(), i->second.end());
        state[n].classes.erase(nd.num);
        break;
      }
      case CdNode::Op::Union:
        state[n] = std::move(state[nd.child0]);
        for (auto& [num, verts] : state[nd.child1].classes) {
          auto& dst = state[n].classes[num];
          dst.insert(dst.end(), verts.begin(), verts.end());
        }
        break;
    }
  }
  g.n = maxv + 1;
  g.dedupe();
  return g;
}

// ---- SCD ----

int Scd::add_leaf(int vertex, LabelType t) {
  int lab = label_count();
  labels.push_back(ScdLabel{-1, -1, vertex, t});
  nodes.push_back(ScdNode{ScdNode::Op::Leaf, -1, -1, vertex, lab, -1, -1});
  root = size() - 1;
  return root;
}

int Scd::add_vertex_node(int child, int vertex, LabelType t) {
  int lab = label_count();
  labels.push_back(ScdLabel{-1, -1, vertex, t});
  nodes.push_back(ScdNode{ScdNode::Op::AddVertex, child, -1, vertex, lab, -1, -1});
  root = size() - 1;
  return root;
}

int Scd::add_union(int child, int l1, int l2) {
  int lab = label_count();
  LabelType t = labels[l1].type == labels[l2].type ? labels[l1].type : LabelType::Untyped;
  labels.push_back(ScdLabel{l1, l2, -1, t});
  nodes.push_back(ScdNode{ScdNode::Op::UnionLabels, child, -1, -1, lab, l1, l2});
  root = size() - 1;
  return root;
}

int Scd::add_adjacency(int child, int src, int dst) {
  nodes.push_back(ScdNode{ScdNode::Op::NewAdjacency, child, -1, -1, -1, src, dst});
  root = size() - 1;
  return root;
}

int Scd::add_combine(int c0, int c1) {
  nodes.push_back(ScdNode{ScdNode::Op::Combine, c0, c1, -1, -1, -1, -1});
  root = size() - 1;
  return root;
}

std::vector<int> Scd::label_vertices(int label) const {
  std::vector<int> out, stack{label};
  while (!stack.empty()) {
    int l = stack.back();
    stack.pop_back();
    if (l < 0 || l >= label_count()) fail(Errc::internal, "bad label id");
    if (labels[l].singleton()) out.push_back(labels[l].vertex);
    else {
      stack.push_back(labels[l].child0);
      stack.push_back(labels[l].child1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Scd::label_size(int label) const {
  int cnt = 0;
  std::vector<int> stack{label};
  while (!stack.empty()) {
    int l = stack.back();
    stack.pop_back();
    if (labels[l].singleton()) cnt++;
    else {
      stack.push_back(labels[l].child0);
      stack.push_back(labels[l].child1);
    }
  }
  return cnt;
}

int Scd::vertex_count() const {
  int cnt = 0;
  for (const auto& nd : nodes)
    if (nd.op == ScdNode::Op::Leaf || nd.op == ScdNode::Op::AddVertex) cnt++;
  return cnt;
}

std::vector<int> Scd::postorder() const {
  std::vector<int> order;
  if (root < 0) return order;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [n, stage] = stack.back();
    const ScdNode& nd = nodes[n];
    int child = stage == 0 ? nd.child0 : stage == 1 ? nd.child1 : -1;
    if (stage < 2 && child >= 0) {
      stage++;
      stack.emplace_back(child, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  return order;
}

ScdReport validate_scd(const Scd& s, const Graph* expected) {
  ScdReport r;
  auto bad = [&](int node, const std::string& what) {
    r.violations.push_back("node " + std::to_string(node) + ": " + what);
  };
  if (s.root < 0 || s.root >= s.size()) {
    r.violations.push_back("missing root");
    return r;
  }
  for (int i = 0; i < s.size(); i++) {
    const ScdNode& nd = s.nodes[i];
    bool binary = nd.op == ScdNode::Op::Combine;
    bool leaf = nd.op == ScdNode::Op::Leaf;
    if (leaf && nd.child0 != -1) bad(i, "leaf with a child");
    if (!leaf && !binary && (nd.child0 < 0 || nd.child1 != -1)) bad(i, "unary op needs one child");
    if (binary && (nd.child0 < 0 || nd.child1 < 0)) bad(i, "combine needs two children");
  }
  if (!r.ok()) return r;

  auto order = s.postorder();
  if ((int)order.size() != s.size()) r.violations.push_back("node tree not connected");
  std::unordered_set<int> seen_vertices;
  std::vector<char> label_created(s.label_count(), 0);
  std::vector<std::vector<int>> live(s.size());  // sorted live label ids per node
  std::vector<std::pair<int, int>> arcs;         // adjacency ops as label pairs
  auto create_label = [&](int n, int lab, int vertex) {
    if (lab < 0 || lab >= s.label_count() || label_created[lab]) {
      bad(n, "label not fresh");
      return;
    }
    label_created[lab] = 1;
    if (s.labels[lab].vertex != vertex) bad(n, "label registry vertex mismatch");
  };
  for (int n : order) {
    const ScdNode& nd = s.nodes[n];
    switch (nd.op) {
      case ScdNode::Op::Leaf: {
        if (nd.vertex < 0 || !seen_vertices.insert(nd.vertex).second)
          bad(n, "vertex not fresh: " + std::to_string(nd.vertex));
        create_label(n, nd.label, nd.vertex);
        live[n] = {nd.label};
        break;
      }
      case ScdNode::Op::AddVertex: {
        live[n] = std::move(live[nd.child0]);
        if (nd.vertex < 0 || !seen_vertices.insert(nd.vertex).second)
          bad(n, "vertex not fresh: " + std::to_string(nd.vertex));
        create_label(n, nd.label, nd.vertex);
        live[n].insert(std::upper_bound(live[n].begin(), live[n].end(), nd.label), nd.label);
        break;
      }
      case ScdNode::Op::UnionLabels: {
        live[n] = std::move(live[nd.child0]);
        auto has = [&](int l) { return std::binary_search(live[n].begin(), live[n].end(), l); };
        if (nd.arg0 == nd.arg1 || !has(nd.arg0) || !has(nd.arg1)) {
          bad(n, "union of labels not live in child graph");
          break;
        }
        create_label(n, nd.label, -1);
        if (s.labels[nd.label].child0 != nd.arg0 || s.labels[nd.label].child1 != nd.arg1)
          bad(n, "label registry children mismatch");
        std::vector<int> next;
        next.reserve(live[n].size() - 1);
        for (int l : live[n])
          if (l != nd.arg0 && l != nd.arg1) next.push_back(l);
        next.insert(std::upper_bound(next.begin(), next.end(), nd.label), nd.label);
        live[n] = std::move(next);
        break;
      }
      case ScdNode::Op::NewAdjacency: {
        live[n] = std::move(live[nd.child0]);
        auto has = [&](int l) { return std::binary_search(live[n].begin(), live[n].end(), l); };
        if (nd.arg0 == nd.arg1 || !has(nd.arg0) || !has(nd.arg1))
          bad(n, "adjacency between labels not live in child graph");
        else
          arcs.emplace_back(nd.arg0, nd.arg1);
        break;
      }
      case ScdNode::Op::Combine: {
        // global vertex freshness already forces disjointness
        live[n] = std::move(live[nd.child0]);
        std::vector<int> merged;
        merged.reserve(live[n].size() + live[nd.child1].size());
        std::merge(live[n].begin(), live[n].end(), live[nd.child1].begin(), live[nd.child1].end(),
                   std::back_inserter(merged));
        for (size_t i = 0; i + 1 < merged.size(); i++)
          if (merged[i] == merged[i + 1]) bad(n, "combine with shared label");
        live[n] = std::move(merged);
        break;
      }
    }
  }
  if (s.label_count() > 2 * (int)seen_vertices.size() - 1)
    r.violations.push_back("label count exceeds 2n-1");
  if (!r.ok()) return r;

  if (expected) {
    Graph g;
    g.directed = s.directed;
    for (auto [a, b] : arcs)
      for (int u : s.label_vertices(a))
        for (int v : s.label_vertices(b)) g.add_edge(u, v);
    int maxv = -1;
    for (int v : seen_vertices) maxv = std::max(maxv, v);
    g.n = maxv + 1;
    g.dedupe();
    Graph e = *expected;
    e.dedupe();
    if ((int)seen_vertices.size() != e.n || g.n != e.n)
      r.violations.push_back("vertex set differs from expected graph");
    else if (g.edges != e.edges)
      r.violations.push_back("edge set differs from expected graph");
  }
  return r;
}

Graph scd_graph(const Scd& s) {
  ScdReport r = validate_scd(s);
  if (!r.ok()) fail(Errc::invalid_input, "invalid scd:\n" + r.to_string());
  Graph g;
  g.directed = s.directed;
  int maxv = -1;
  for (const auto& nd : s.nodes) {
    maxv = std::max(maxv, nd.vertex);
    if (nd.op == ScdNode::Op::NewAdjacency)
      for (int u : s.label_vertices(nd.arg0))
        for (int v : s.label_vertices(nd.arg1)) g.add_edge(u, v);
  }
  g.n = maxv + 1;
  g.dedupe();
  return g;
}

int scd_width(const Scd& s) {
  ScdReport r = validate_scd(s);
  if (!r.ok()) fail(Errc::invalid_input, "invalid scd:\n" + r.to_string());
  std::vector<int> cnt(s.size(), 0);
  int width = 0;
  for (int n : s.postorder()) {
    const ScdNode& nd = s.nodes[n];
    switch (nd.op) {
      case ScdNode::Op::Leaf: cnt[n] = 1; break;
      case ScdNode::Op::AddVertex: cnt[n] = cnt[nd.child0] + 1; break;
      case ScdNode::Op::UnionLabels: cnt[n] = cnt[nd.child0] - 1; break;
      case ScdNode::Op::NewAdjacency: cnt[n] = cnt[nd.child0]; break;
      case ScdNode::Op::Combine: cnt[n] = cnt[nd.child0] + cnt[nd.child1]; break;
    }
    width = std::max(width, cnt[n]);
  }
  return width;
}

Scd clique_to_scd(const CliqueDecomposition& cd) {
  ScdReport r = validate_clique_decomposition(cd);
  if (!r.ok()) fail(Errc::invalid_input, "invalid clique decomposition:\n" + r.to_string());
  Scd s;
  s.directed = cd.directed;
  std::vector<std::map<int, int>> numlab(cd.size());  // number -> scd label
  std::vector<int> snode(cd.size(), -1);
  for (int n : cd_postorder(cd)) {
    const CdNode& nd = cd.nodes[n];
    switch (nd.op) {
      case CdNode::Op::Create: {
        snode[n] = s.add_leaf(nd.vertex);
        numlab[n][nd.num] = s.nodes[snode[n]].label;
        break;
      }
      case CdNode::Op::AddVertex: {
        numlab[n] = std::move(numlab[nd.child0]);
        snode[n] = s.add_vertex_node(snode[nd.child0], nd.vertex);
        numlab[n][nd.num] = s.nodes[snode[n]].label;
        break;
      }
      case CdNode::Op::NewEdges: {
        numlab[n] = std::move(numlab[nd.child0]);
        snode[n] = s.add_adjacency(snode[nd.child0], numlab[n][nd.num], numlab[n][nd.num2]);
        break;
      }
      case CdNode::Op::Relabel: {
        numlab[n] = std::move(numlab[nd.child0]);
        snode[n] = snode[nd.child0];
        auto i = numlab[n].find(nd.num);
        if (i == numlab[n].end()) break;  // nothing to do, no node emitted
        auto j = numlab[n].find(nd.num2);
        if (j == numlab[n].end()) {
          numlab[n][nd.num2] = i->second;  // plain rename, no node emitted
          numlab[n].erase(nd.num);
        } else {
          snode[n] = s.add_union(snode[n], i->second, j->second);
          j->second = s.nodes[snode[n]].label;
          numlab[n].erase(nd.num);
        }
        break;
      }
      case CdNode::Op::Union: {
        numlab[n] = std::move(numlab[nd.child0]);
        snode[n] = s.add_combine(snode[nd.child0], snode[nd.child1]);
        for (auto& [num, lab] : numlab[nd.child1]) {
          auto i = numlab[n].find(num);
          if (i == numlab[n].end()) {
            numlab[n][num] = lab;
          } else {
            snode[n] = s.add_union(snode[n], i->second, lab);
            i->second = s.nodes[snode[n]].label;
          }
        }
        break;
      }
    }
  }
  s.root = snode[cd.root];
  return s;
}

LabelType gate_label_type(const Circuit& c, int gate) {
  switch (c.gates[gate].kind) {
    case GateKind::And: return LabelType::And;
    case GateKind::Or: return LabelType::Or;
    case GateKind::Input:
    case GateKind::Not: return LabelType::Unary;
    default:
      fail(Errc::invalid_input, "constant gates are not supported here; propagate them first");
  }
}

std::vector<LabelType> derive_label_types(const Scd& s, const Circuit& c) {
  std::vector<LabelType> t(s.label_count(), LabelType::Untyped);
  std::vector<char> done(s.label_count(), 0);
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
        t[l] = gate_label_type(c, lab.vertex);
        done[l] = 1;
        stack.pop_back();
      } else if (done[lab.child0] && done[lab.child1]) {
        t[l] = t[lab.child0] == t[lab.child1] ? t[lab.child0] : LabelType::Untyped;
        done[l] = 1;
        stack.pop_back();
      } else {
        stack.push_back(lab.child0);
        stack.push_back(lab.child1);
      }
    }
  }
  return t;
}

Scd make_type_respecting(const Scd& s, const Circuit& c) {
  Graph dag = circuit_dag(c);
  ScdReport r = validate_scd(s, &dag);
  if (!r.ok())
    fail(Errc::invalid_input, "scd is not a decomposition of the circuit DAG:\n" + r.to_string());

  constexpr LabelType kOrder[3] = {LabelType::Unary, LabelType::And, LabelType::Or};
  auto slot = [&](LabelType t) {
    return t == LabelType::Unary ? 0 : t == LabelType::And ? 1 : 2;
  };
  Scd out;
  out.directed = s.directed;
  // original label id -> typed sublabels (unary, and, or)
  std::vector<std::array<int, 3>> sub(s.label_count(), {-1, -1, -1});
  std::vector<int> snode(s.size(), -1);
  for (int n : s.postorder()) {
    const ScdNode& nd = s.nodes[n];
    switch (nd.op) {
      case ScdNode::Op::Leaf: {
        LabelType t = gate_label_type(c, nd.vertex);
        snode[n] = out.add_leaf(nd.vertex, t);
        sub[nd.label][slot(t)] = out.nodes[snode[n]].label;
        break;
      }
      case ScdNode::Op::AddVertex: {
        LabelType t = gate_label_type(c, nd.vertex);
        snode[n] = out.add_vertex_node(snode[nd.child0], nd.vertex, t);
        sub[nd.label][slot(t)] = out.nodes[snode[n]].label;
        break;
      }
      case ScdNode::Op::UnionLabels: {
        snode[n] = snode[nd.child0];
        for (LabelType t : kOrder) {
          int a = sub[nd.arg0][slot(t)], b = sub[nd.arg1][slot(t)];
          if (a >= 0 && b >= 0) {
            snode[n] = out.add_union(snode[n], a, b);
            sub[nd.label][slot(t)] = out.nodes[snode[n]].label;
          } else if (a >= 0 || b >= 0) {
            sub[nd.label][slot(t)] = a >= 0 ? a : b;
          }
        }
        break;
      }
      case ScdNode::Op::NewAdjacency: {
        snode[n] = snode[nd.child0];
        for (LabelType ts : kOrder)
          for (LabelType td : kOrder) {
            int a = sub[nd.arg0][slot(ts)], b = sub[nd.arg1][slot(td)];
            if (a >= 0 && b >= 0) snode[n] = out.add_adjacency(snode[n], a, b);
          }
        break;
      }
      case ScdNode::Op::Combine: {
        snode[n] = out.add_combine(snode[nd.child0], snode[nd.child1]);
        break;
      }
    }
  }
  out.root = snode[s.root];
  return out;
}

// ---- text formats ----

namespace {

int scd_arity(ScdNode::Op op) {
  switch (op) {
    case ScdNode::Op::Leaf: return 0;
    case ScdNode::Op::Combine: return 2;
    default: return 1;
  }
}

int cd_arity(CdNode::Op op) {
  switch (op) {
    case CdNode::Op::Create: return 0;
    case CdNode::Op::Union: return 2;
    default: return 1;
  }
}

}  // namespace

Scd parse_scd(std::istream& in) {
  Scd s;
  std::unordered_map<int, int> labmap;  // file label token -> dense id
  auto intern_new = [&](int tok, int vertex, int ch0, int ch1) {
    if (labmap.count(tok)) fail(Errc::parse, "scd: duplicate label " + std::to_string(tok));
    int id = s.label_count();
    labmap[tok] = id;
    s.labels.push_back(ScdLabel{ch0, ch1, vertex, LabelType::Untyped});
    return id;
  };
  auto intern = [&](int tok) {
    auto it = labmap.find(tok);
    if (it == labmap.end()) fail(Errc::parse, "scd: unknown label " + std::to_string(tok));
    return it->second;
  };
  struct Frame {
    int node;
    int remaining;
  };
  std::vector<Frame> stack;
  std::vector<int> roots;
  auto attach = [&](int n) {
    while (!stack.empty() && stack.back().remaining == 0) stack.pop_back();
    if (!stack.empty()) {
      ScdNode& p = s.nodes[stack.back().node];
      if (p.child0 == -1) p.child0 = n;
      else p.child1 = n;
      stack.back().remaining--;
    } else {
      roots.push_back(n);
    }
    stack.push_back({n, scd_arity(s.nodes[n].op)});
  };
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w)) continue;
    auto want = [&](auto&... xs) {
      if (!((ls >> xs) && ...))
        fail(Errc::parse, "scd line " + std::to_string(lineno) + ": malformed " + w);
    };
    if (!header) {
      std::string dir;
      if (w != "scd" || !(ls >> dir) || (dir != "directed" && dir != "undirected"))
        fail(Errc::parse, "scd line " + std::to_string(lineno) + ": expected 'scd directed|undirected'");
      s.directed = dir == "directed";
      header = true;
      continue;
    }
    int n = s.size();
    if (w == "leaf") {
      int lab, v;
      want(lab, v);
      s.nodes.push_back(ScdNode{ScdNode::Op::Leaf, -1, -1, v, intern_new(lab, v, -1, -1), -1, -1});
    } else if (w == "addv") {
      int lab, v;
      want(lab, v);
      s.nodes.push_back(
          ScdNode{ScdNode::Op::AddVertex, -1, -1, v, intern_new(lab, v, -1, -1), -1, -1});
    } else if (w == "union") {
      int l1, l2, lnew;
      want(l1, l2, lnew);
      int a = intern(l1), b = intern(l2);
      s.nodes.push_back(
          ScdNode{ScdNode::Op::UnionLabels, -1, -1, -1, intern_new(lnew, -1, a, b), a, b});
    } else if (w == "adj") {
      int l1, l2;
      want(l1, l2);
      s.nodes.push_back(ScdNode{ScdNode::Op::NewAdjacency, -1, -1, -1, -1, intern(l1), intern(l2)});
    } else if (w == "combine") {
      s.nodes.push_back(ScdNode{ScdNode::Op::Combine, -1, -1, -1, -1, -1, -1});
    } else {
      fail(Errc::parse, "scd line " + std::to_string(lineno) + ": unknown op '" + w + "'");
    }
    attach(n);
  }
  while (!stack.empty()) {
    if (stack.back().remaining != 0) fail(Errc::parse, "scd: missing children at end of file");
    stack.pop_back();
  }
  if (roots.size() != 1) fail(Errc::parse, "scd: expected exactly one root");
  s.root = roots[0];
  return s;
}

Scd load_scd(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open scd file: " + path);
  return parse_scd(in);
}

void write_scd(std::ostream& out, const Scd& s) {
  out << "scd " << (s.directed ? "directed" : "undirected") << "\n";
  if (s.root < 0) return;
  std::vector<int> stack{s.root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    const ScdNode& nd = s.nodes[n];
    switch (nd.op) {
      case ScdNode::Op::Leaf: out << "leaf " << nd.label << ' ' << nd.vertex << "\n"; break;
      case ScdNode::Op::AddVertex: out << "addv " << nd.label << ' ' << nd.vertex << "\n"; break;
      case ScdNode::Op::UnionLabels:
        out << "union " << nd.arg0 << ' ' << nd.arg1 << ' ' << nd.label << "\n";
        break;
      case ScdNode::Op::NewAdjacency: out << "adj " << nd.arg0 << ' ' << nd.arg1 << "\n"; break;
      case ScdNode::Op::Combine: out << "combine\n"; break;
    }
    if (nd.child1 >= 0) stack.push_back(nd.child1);
    if (nd.child0 >= 0) stack.push_back(nd.child0);
  }
}

std::string scd_to_string(const Scd& s) {
  std::ostringstream out;
  write_scd(out, s);
  return out.str();
}

CliqueDecomposition parse_cd(std::istream& in) {
  CliqueDecomposition cd;
  struct Frame {
    int node;
    int remaining;
  };
  std::vector<Frame> stack;
  std::vector<int> roots;
  auto attach = [&](int n) {
    while (!stack.empty() && stack.back().remaining == 0) stack.pop_back();
    if (!stack.empty()) {
      CdNode& p = cd.nodes[stack.back().node];
      if (p.child0 == -1) p.child0 = n;
      else p.child1 = n;
      stack.back().remaining--;
    } else {
      roots.push_back(n);
    }
    stack.push_back({n, cd_arity(cd.nodes[n].op)});
  };
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w)) continue;
    if (!header) {
      std::string dir;
      if (w != "cd" || !(ls >> dir) || (dir != "directed" && dir != "undirected"))
        fail(Errc::parse, "cd line " + std::to_string(lineno) + ": expected 'cd directed|undirected'");
      cd.directed = dir == "directed";
      header = true;
      continue;
    }
    auto want = [&](auto&... xs) {
      if (!((ls >> xs) && ...))
        fail(Errc::parse, "cd line " + std::to_string(lineno) + ": malformed " + w);
    };
    int n = cd.size();
    CdNode nd;
    if (w == "leaf") {
      nd.op = CdNode::Op::Create;
      want(nd.num, nd.vertex);
    } else if (w == "addv") {
      nd.op = CdNode::Op::AddVertex;
      want(nd.num, nd.vertex);
    } else if (w == "edges") {
      nd.op = CdNode::Op::NewEdges;
      want(nd.num, nd.num2);
    } else if (w == "relabel") {
      nd.op = CdNode::Op::Relabel;
      want(nd.num, nd.num2);
    } else if (w == "combine") {
      nd.op = CdNode::Op::Union;
    } else {
      fail(Errc::parse, "cd line " + std::to_string(lineno) + ": unknown op '" + w + "'");
    }
    cd.nodes.push_back(nd);
    attach(n);
  }
  while (!stack.empty()) {
    if (stack.back().remaining != 0) fail(Errc::parse, "cd: missing children at end of file");
    stack.pop_back();
  }
  if (roots.size() != 1) fail(Errc::parse, "cd: expected exactly one root");
  cd.root = roots[0];
  return cd;
}

CliqueDecomposition load_cd(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open cd file: " + path);
  return parse_cd(in);
}

void write_cd(std::ostream& out, const CliqueDecomposition& cd) {
  out << "cd " << (cd.directed ? "directed" : "undirected") << "\n";
  if (cd.root < 0) return;
  std::vector<int> stack{cd.root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    const CdNode& nd = cd.nodes[n];
    switch (nd.op) {
      case CdNode::Op::Create: out << "leaf " << nd.num << ' ' << nd.vertex << "\n"; break;
      case CdNode::Op::AddVertex: out << "addv " << nd.num << ' ' << nd.vertex << "\n"; break;
      case CdNode::Op::NewEdges: out << "edges " << nd.num << ' ' << nd.num2 << "\n"; break;
      case CdNode::Op::Relabel: out << "relabel " << nd.num << ' ' << nd.num2 << "\n"; break;
      case CdNode::Op::Union: out << "combine\n"; break;
    }
    if (nd.child1 >= 0) stack.push_back(nd.child1);
    if (nd.child0 >= 0) stack.push_back(nd.child0);
  }
}

std::string cd_to_string(const CliqueDecomposition& cd) {
  std::ostringstream out;
  write_cd(out, cd);
  return out.str();
}

}  // namespace kc
