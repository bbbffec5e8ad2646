#include "kc/generator.hpp"

#include <algorithm>
#include <numeric>

namespace kc {

namespace {

struct LiveLabel {
  int label = -1;
  std::vector<int> members;  // gate ids
  bool has_input = false;
};

struct Subtree {
  int root = -1;  // scd node
  std::vector<LiveLabel> live;
};

GateKind pick_gate_kind(Rng& rng, bool inputs_left, bool singleton_source_available,
                        bool any_source_available) {
  if (!any_source_available) return GateKind::Input;
  if (inputs_left && rng.chance(1, 4)) return GateKind::Input;
  if (singleton_source_available && rng.chance(1, 4)) return GateKind::Not;
  return rng.chance(1, 2) ? GateKind::And : GateKind::Or;
}

}  // namespace

GeneratedInstance generate_instance(int k, int n, uint64_t seed) {
  if (k < 2) fail(Errc::invalid_input, "generate: width budget must be at least 2");
  if (n < 1) fail(Errc::invalid_input, "generate: need at least one gate");
  Rng rng(seed);
  GeneratedInstance out;
  Circuit& c = out.circuit;
  Scd& s = out.scd;
  s.directed = true;
  out.width_budget = k;

  if (n == 1) {
    int g = c.add_input("v0");
    s.add_leaf(g, LabelType::Unary);
    c.outputs = {g};
    return out;
  }

  int inputs_target = std::max(1, std::min(12, n / 3));
  int inputs_made = 0;
  std::vector<int> fanout(0);
  std::vector<Subtree> stack;

  auto new_gate = [&](GateKind kind) {
    int g;
    if (kind == GateKind::Input) {
      g = c.add_input("v" + std::to_string(inputs_made));
      inputs_made++;
    } else {
      g = c.add_gate(kind, {});
    }
    fanout.push_back(0);
    return g;
  };
  auto do_union = [&](Subtree& st) {
    int i = rng.below((int)st.live.size());
    int j = rng.below((int)st.live.size() - 1);
    if (j >= i) j++;
    if (i > j) std::swap(i, j);
    st.root = s.add_union(st.root, st.live[i].label, st.live[j].label);
    LiveLabel merged;
    merged.label = s.nodes[st.root].label;
    merged.members = st.live[i].members;
    merged.members.insert(merged.members.end(), st.live[j].members.begin(),
                          st.live[j].members.end());
    merged.has_input = st.live[i].has_input || st.live[j].has_input;
    st.live.erase(st.live.begin() + j);
    st.live.erase(st.live.begin() + i);
    st.live.push_back(std::move(merged));
  };
  auto add_gate_to = [&](Subtree& st) {
    bool first = st.root < 0;
    while ((int)st.live.size() >= k) do_union(st);
    bool singleton_source = false, any_source = !first && !st.live.empty();
    for (const auto& l : st.live) singleton_source = singleton_source || l.members.size() == 1;
    GateKind kind =
        first ? GateKind::Input
              : pick_gate_kind(rng, inputs_made < inputs_target, singleton_source, any_source);
    if (kind == GateKind::Input && inputs_made >= inputs_target && any_source)
      kind = rng.chance(1, 2) ? GateKind::And : GateKind::Or;
    int g = new_gate(kind);
    st.root = first ? s.add_leaf(g, gate_label_type(c, g))
                    : s.add_vertex_node(st.root, g, gate_label_type(c, g));
    int glabel = s.nodes[st.root].label;
    if (kind == GateKind::Not) {
      std::vector<int> cands;
      for (int i = 0; i < (int)st.live.size(); i++)
        if (st.live[i].members.size() == 1) cands.push_back(i);
      int src = cands[rng.below((int)cands.size())];
      st.root = s.add_adjacency(st.root, st.live[src].label, glabel);
      c.gates[g].inputs.push_back(st.live[src].members[0]);
      fanout[st.live[src].members[0]]++;
    } else if (kind == GateKind::And || kind == GateKind::Or) {
      int nsrc = 1 + (st.live.size() > 1 && rng.chance(1, 2) ? 1 : 0) +
                 (st.live.size() > 2 && rng.chance(1, 4) ? 1 : 0);
      std::vector<int> idx(st.live.size());
      std::iota(idx.begin(), idx.end(), 0);
      for (int i = 0; i < nsrc; i++) {
        int j = i + rng.below((int)idx.size() - i);
        std::swap(idx[i], idx[j]);
      }
      for (int i = 0; i < nsrc; i++) {
        const LiveLabel& src = st.live[idx[i]];
        st.root = s.add_adjacency(st.root, src.label, glabel);
        for (int m : src.members) {
          c.gates[g].inputs.push_back(m);
          fanout[m]++;
        }
      }
    }
    st.live.push_back(LiveLabel{glabel, {g}, kind == GateKind::Input});
  };
  auto combine = [&]() {
    Subtree b = std::move(stack.back());
    stack.pop_back();
    Subtree a = std::move(stack.back());
    stack.pop_back();
    while ((int)(a.live.size() + b.live.size()) > k) do_union(a.live.size() > 1 ? a : b);
    Subtree m;
    m.root = s.add_combine(a.root, b.root);
    m.live = std::move(a.live);
    m.live.insert(m.live.end(), b.live.begin(), b.live.end());
    stack.push_back(std::move(m));
  };

  stack.push_back(Subtree{});
  while (c.size() < n - 1) {
    if (stack.size() == 1 && k >= 3 && inputs_made + 1 < inputs_target && c.size() + 2 < n - 1 &&
        (int)stack.back().live.size() < k - 1 && rng.chance(1, 6)) {
      stack.push_back(Subtree{});
    }
    add_gate_to(stack.back());
    if (stack.size() == 2 && rng.chance(1, 4)) combine();
    else if (stack.size() == 1 && stack.back().live.size() >= 2 && rng.chance(1, 5))
      do_union(stack.back());
  }
  while (stack.size() > 1) combine();

  // collector output fed by every sink
  Subtree& st = stack.back();
  while ((int)st.live.size() >= k) do_union(st);
  int z = new_gate(rng.chance(1, 2) ? GateKind::And : GateKind::Or);
  st.root = s.add_vertex_node(st.root, z, gate_label_type(c, z));
  int zlabel = s.nodes[st.root].label;
  for (const auto& l : st.live) {
    bool has_sink = false;
    for (int m : l.members) has_sink = has_sink || fanout[m] == 0;
    if (!has_sink) continue;
    st.root = s.add_adjacency(st.root, l.label, zlabel);
    for (int m : l.members) {
      c.gates[z].inputs.push_back(m);
      fanout[m]++;
    }
  }
  c.outputs = {z};
  s.root = st.root;

  ValidationReport vr = validate_circuit(c);
  if (!vr.ok()) fail(Errc::internal, "generator produced an invalid circuit:\n" + vr.to_string());
  Graph dag = circuit_dag(c);
  ScdReport sr = validate_scd(s, &dag);
  if (!sr.ok()) fail(Errc::internal, "generator produced an invalid scd:\n" + sr.to_string());
  if (scd_width(s) > k) fail(Errc::internal, "generator exceeded its width budget");
  return out;
}

GeneratedCdInstance generate_cd_instance(int k, int n, uint64_t seed) {
  if (k < 2) fail(Errc::invalid_input, "generate: width budget must be at least 2");
  if (n < 1) fail(Errc::invalid_input, "generate: need at least one gate");
  Rng rng(seed);
  GeneratedCdInstance out;
  Circuit& c = out.circuit;
  CliqueDecomposition& cd = out.cd;
  cd.directed = true;
  out.width_budget = k;

  struct NumClass {
    int num;
    std::vector<int> members;
    bool has_input;
  };
  struct CdSubtree {
    int root = -1;
    std::vector<NumClass> used;
  };
  int inputs_target = std::max(1, std::min(12, n / 3));
  int inputs_made = 0;
  std::vector<int> fanout;

  auto node = [&](CdNode nd) {
    cd.nodes.push_back(nd);
    return cd.size() - 1;
  };
  auto new_gate = [&](GateKind kind) {
    int g;
    if (kind == GateKind::Input) g = c.add_input("v" + std::to_string(inputs_made++));
    else g = c.add_gate(kind, {});
    fanout.push_back(0);
    return g;
  };
  auto free_number = [&](CdSubtree& st) -> int {
    std::vector<char> used(k + 1, 0);
    for (const auto& cl : st.used) used[cl.num] = 1;
    std::vector<int> free;
    for (int i = 1; i <= k; i++)
      if (!used[i]) free.push_back(i);
    if (!free.empty()) return free[rng.below((int)free.size())];
    // merge two classes to release a number
    int i = rng.below((int)st.used.size());
    int j = rng.below((int)st.used.size() - 1);
    if (j >= i) j++;
    st.root = node({CdNode::Op::Relabel, st.root, -1, st.used[i].num, st.used[j].num, -1});
    int released = st.used[i].num;
    st.used[j].members.insert(st.used[j].members.end(), st.used[i].members.begin(),
                              st.used[i].members.end());
    st.used[j].has_input = st.used[j].has_input || st.used[i].has_input;
    st.used.erase(st.used.begin() + i);
    return released;
  };
  auto add_gate_to = [&](CdSubtree& st) {
    bool first = st.root < 0;
    int num = first ? 1 + rng.below(k) : free_number(st);  // may merge classes
    bool singleton_source = false, any_source = !first && !st.used.empty();
    for (const auto& cl : st.used) singleton_source = singleton_source || cl.members.size() == 1;
    GateKind kind =
        first ? GateKind::Input
              : pick_gate_kind(rng, inputs_made < inputs_target, singleton_source, any_source);
    if (kind == GateKind::Input && inputs_made >= inputs_target && any_source)
      kind = rng.chance(1, 2) ? GateKind::And : GateKind::Or;
    int g = new_gate(kind);
    if (first) st.root = node({CdNode::Op::Create, -1, -1, num, -1, g});
    else st.root = node({CdNode::Op::AddVertex, st.root, -1, num, -1, g});
    if (kind == GateKind::Not) {
      std::vector<int> cands;
      for (int i = 0; i < (int)st.used.size(); i++)
        if (st.used[i].members.size() == 1) cands.push_back(i);
      const NumClass& src = st.used[cands[rng.below((int)cands.size())]];
      st.root = node({CdNode::Op::NewEdges, st.root, -1, src.num, num, -1});
      c.gates[g].inputs.push_back(src.members[0]);
      fanout[src.members[0]]++;
    } else if (kind == GateKind::And || kind == GateKind::Or) {
      int nsrc = 1 + (st.used.size() > 1 && rng.chance(1, 2) ? 1 : 0);
      std::vector<int> idx(st.used.size());
      std::iota(idx.begin(), idx.end(), 0);
      for (int i = 0; i < nsrc; i++) {
        int j = i + rng.below((int)idx.size() - i);
        std::swap(idx[i], idx[j]);
      }
      for (int i = 0; i < nsrc; i++) {
        const NumClass& src = st.used[idx[i]];
        st.root = node({CdNode::Op::NewEdges, st.root, -1, src.num, num, -1});
        for (int m : src.members) {
          c.gates[g].inputs.push_back(m);
          fanout[m]++;
        }
      }
    }
    st.used.push_back(NumClass{num, {g}, kind == GateKind::Input});
  };

  std::vector<CdSubtree> stack;
  stack.push_back(CdSubtree{});
  if (n == 1) {
    int g = new_gate(GateKind::Input);
    cd.root = node({CdNode::Op::Create, -1, -1, 1, -1, g});
    c.outputs = {g};
    return out;
  }
  auto combine = [&]() {
    CdSubtree b = std::move(stack.back());
    stack.pop_back();
    CdSubtree a = std::move(stack.back());
    stack.pop_back();
    CdSubtree m;
    m.root = node({CdNode::Op::Union, a.root, b.root, -1, -1, -1});
    m.used = std::move(a.used);
    for (auto& cl : b.used) {
      bool merged = false;
      for (auto& dst : m.used)
        if (dst.num == cl.num) {
          dst.members.insert(dst.members.end(), cl.members.begin(), cl.members.end());
          dst.has_input = dst.has_input || cl.has_input;
          merged = true;
        }
      if (!merged) m.used.push_back(std::move(cl));
    }
    stack.push_back(std::move(m));
  };
  while (c.size() < n - 1) {
    if (stack.size() == 1 && inputs_made + 1 < inputs_target && c.size() + 2 < n - 1 &&
        rng.chance(1, 6))
      stack.push_back(CdSubtree{});
    add_gate_to(stack.back());
    if (stack.size() == 2 && rng.chance(1, 4)) combine();
  }
  while (stack.size() > 1) combine();

  CdSubtree& st = stack.back();
  int znum = free_number(st);
  int z = new_gate(rng.chance(1, 2) ? GateKind::And : GateKind::Or);
  st.root = node({CdNode::Op::AddVertex, st.root, -1, znum, -1, z});
  for (const auto& cl : st.used) {
    bool has_sink = false;
    for (int m : cl.members) has_sink = has_sink || fanout[m] == 0;
    if (!has_sink) continue;
    st.root = node({CdNode::Op::NewEdges, st.root, -1, cl.num, znum, -1});
    for (int m : cl.members) {
      c.gates[z].inputs.push_back(m);
      fanout[m]++;
    }
  }
  c.outputs = {z};
  cd.root = st.root;

  ValidationReport vr = validate_circuit(c);
  if (!vr.ok()) fail(Errc::internal, "generator produced an invalid circuit:\n" + vr.to_string());
  Graph dag = circuit_dag(c);
  ScdReport sr = validate_clique_decomposition(cd, &dag);
  if (!sr.ok())
    fail(Errc::internal, "generator produced an invalid decomposition:\n" + sr.to_string());
  if (cd.width() > k) fail(Errc::internal, "generator exceeded its width budget");
  return out;
}

CliqueDecomposition generate_clique_decomposition(int k, int nv, uint64_t seed, bool directed) {
  if (k < 1 || nv < 1) fail(Errc::invalid_input, "generate: bad parameters");
  Rng rng(seed);
  CliqueDecomposition cd;
  cd.directed = directed;

  struct Sub {
    int root;
    std::vector<int> nums;  // used numbers
  };
  auto node = [&](CdNode nd) {
    cd.nodes.push_back(nd);
    return cd.size() - 1;
  };
  std::vector<Sub> stack;
  int made = 0;
  auto fresh_num = [&](const Sub& st) -> int {
    std::vector<char> used(k + 1, 0);
    for (int x : st.nums) used[x] = 1;
    std::vector<int> free;
    for (int i = 1; i <= k; i++)
      if (!used[i]) free.push_back(i);
    if (free.empty()) return -1;
    return free[rng.below((int)free.size())];
  };
  while (made < nv || stack.size() != 1) {
    bool can_create = made < nv;
    if (stack.empty() || (can_create && stack.size() < 3 && rng.chance(1, 5))) {
      Sub st{node({CdNode::Op::Create, -1, -1, 1 + rng.below(k), -1, made}), {}};
      st.nums = {cd.nodes.back().num};
      made++;
      stack.push_back(std::move(st));
      continue;
    }
    Sub& st = stack.back();
    int action = rng.below(4);
    if (action == 0 && can_create) {
      int num = fresh_num(st);
      if (num < 0 && st.nums.size() >= 2) {
        int i = rng.below((int)st.nums.size());
        int j = rng.below((int)st.nums.size() - 1);
        if (j >= i) j++;
        st.root = node({CdNode::Op::Relabel, st.root, -1, st.nums[i], st.nums[j], -1});
        num = st.nums[i];
        st.nums.erase(st.nums.begin() + i);
      }
      if (num < 0) continue;
      st.root = node({CdNode::Op::AddVertex, st.root, -1, num, -1, made});
      st.nums.push_back(num);
      made++;
    } else if (action == 1 && st.nums.size() >= 2) {
      int i = rng.below((int)st.nums.size());
      int j = rng.below((int)st.nums.size() - 1);
      if (j >= i) j++;
      st.root = node({CdNode::Op::NewEdges, st.root, -1, st.nums[i], st.nums[j], -1});
    } else if (action == 2 && st.nums.size() >= 2 && rng.chance(1, 3)) {
      int i = rng.below((int)st.nums.size());
      int j = rng.below((int)st.nums.size() - 1);
      if (j >= i) j++;
      st.root = node({CdNode::Op::Relabel, st.root, -1, st.nums[i], st.nums[j], -1});
      st.nums.erase(st.nums.begin() + i);
    } else if (stack.size() >= 2 && rng.chance(1, 3)) {
      Sub b = std::move(stack.back());
      stack.pop_back();
      Sub a = std::move(stack.back());
      stack.pop_back();
      Sub m{node({CdNode::Op::Union, a.root, b.root, -1, -1, -1}), {}};
      m.nums = a.nums;
      for (int x : b.nums)
        if (std::find(m.nums.begin(), m.nums.end(), x) == m.nums.end()) m.nums.push_back(x);
      stack.push_back(std::move(m));
    }
  }
  cd.root = stack.back().root;
  ScdReport r = validate_clique_decomposition(cd);
  if (!r.ok()) fail(Errc::internal, "generator produced an invalid decomposition:\n" + r.to_string());
  return cd;
}

GeneratedCnf generate_window_cnf(int nv, int nc, int window, uint64_t seed) {
  if (nv < 1 || nc < 0 || window < 1 || window > nv)
    fail(Errc::invalid_input, "generate: bad cnf parameters");
  Rng rng(seed);
  GeneratedCnf out;
  for (int i = 0; i < nv; i++) out.cnf.variables.push_back("x" + std::to_string(i + 1));
  int windows = nv - window + 1;
  std::vector<std::vector<int>> clauses_at(windows);
  for (int i = 0; i < nc; i++) {
    int w = rng.below(windows);
    int len = 1 + rng.below(std::min(window, 3));
    std::vector<int> vars(window);
    std::iota(vars.begin(), vars.end(), w);
    for (int j = 0; j < len; j++) {
      int t = j + rng.below((int)vars.size() - j);
      std::swap(vars[j], vars[t]);
    }
    std::vector<int> lits;
    for (int j = 0; j < len; j++) lits.push_back(make_lit(vars[j], rng.chance(1, 2)));
    out.cnf.clauses.push_back(make_clause(std::move(lits)));
    clauses_at[w].push_back(i);
  }
  // path decomposition: a chain of window bags, one extra bag per clause
  int prev = -1;
  for (int w = 0; w < windows; w++) {
    std::vector<int> base;
    for (int j = 0; j < window; j++) base.push_back(w + j);
    prev = out.td.add_node(base, prev);
    if (prev == 0) out.td.root = 0;
    for (int ci : clauses_at[w]) {
      std::vector<int> bag = base;
      bag.push_back(nv + ci);
      prev = out.td.add_node(bag, prev);
    }
  }
  return out;
}

GeneratedCnf generate_width_family_cnf(int t, int target_nodes, uint64_t seed) {
  if (t < 1) fail(Errc::invalid_input, "generate: width must be positive");
  Rng rng(seed);
  GeneratedCnf out;
  Cnf& f = out.cnf;
  if (t == 1) {
    // chain: bags {x_i, C_i}, {C_i, x_i+1}
    int m = std::max(1, target_nodes / 2);
    for (int i = 0; i <= m; i++) f.variables.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < m; i++)
      f.clauses.push_back(
          make_clause({make_lit(i, rng.chance(1, 2)), make_lit(i + 1, rng.chance(1, 2))}));
    int prev = -1;
    for (int i = 0; i < m; i++) {
      prev = out.td.add_node({i, (int)f.variables.size() + i}, prev);
      prev = out.td.add_node({(int)f.variables.size() + i, i + 1}, prev);
    }
    out.td.root = 0;
    return out;
  }
  int s = t - 1;  // fresh variables per tree node
  int nodes = std::max(3, target_nodes) | 1;  // odd => full binary shape fits
  // heap-shaped binary tree on ids 0..nodes-1
  auto left = [&](int u) { return 2 * u + 1; };
  auto right = [&](int u) { return 2 * u + 2; };
  auto internal = [&](int u) { return right(u) < nodes; };
  std::vector<int> seg(nodes);
  for (int u = 0; u < nodes; u++) {
    seg[u] = (int)f.variables.size();
    for (int i = 0; i < s; i++)
      f.variables.push_back("x" + std::to_string(f.variables.size() + 1));
  }
  int nv = f.var_count();
  std::vector<int> straddle(nodes, -1), local(nodes, -1);
  for (int u = 0; u < nodes; u++) {
    if (internal(u)) {
      int a = seg[left(u)] + rng.below(s), b = seg[right(u)] + rng.below(s);
      straddle[u] = f.clause_count();
      f.clauses.push_back(make_clause({make_lit(a, rng.chance(1, 2)), make_lit(b, rng.chance(1, 2))}));
    } else {
      int a = seg[u] + rng.below(s);
      local[u] = f.clause_count();
      std::vector<int> lits{make_lit(a, rng.chance(1, 2))};
      if (s > 1 && rng.chance(1, 2)) {
        int b = seg[u] + rng.below(s);
        if (b != a) lits.push_back(make_lit(b, rng.chance(1, 2)));
      }
      f.clauses.push_back(make_clause(std::move(lits)));
    }
  }
  std::vector<int> tnode(nodes, -1);
  for (int u = 0; u < nodes; u++) {
    std::vector<int> bag;
    for (int i = 0; i < s; i++) bag.push_back(seg[u] + i);
    if (internal(u)) bag.push_back(nv + straddle[u]);
    else bag.push_back(nv + local[u]);
    if (u > 0) bag.push_back(nv + straddle[(u - 1) / 2]);
    tnode[u] = out.td.add_node(bag, u == 0 ? -1 : tnode[(u - 1) / 2]);
  }
  out.td.root = 0;
  return out;
}

}  // namespace kc
