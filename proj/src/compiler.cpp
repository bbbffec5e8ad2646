#include "kc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace kc {

Bag split_bag(const std::vector<int>& bag, int nv) {
  Bag b;
  for (int v : bag) {
    if (v < nv) b.vars.push_back(v);
    else b.clauses.push_back(v - nv);
  }
  std::sort(b.clauses.begin(), b.clauses.end());
  std::sort(b.vars.begin(), b.vars.end());
  return b;
}

namespace {

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains_sorted(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

int position_of(const std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return -1;
  return static_cast<int>(it - v.begin());
}

}  // namespace

BranchContext make_branch_context(const Cnf& f, const Bag& t, const Bag& t1, const Bag& t2,
                                  const std::vector<int>& removed,
                                  const std::vector<std::pair<int, bool>>& assignment) {
  BranchContext ctx;
  std::map<int, bool> s;
  for (auto [v, sgn] : assignment) s[v] = sgn;
  for (int v : t.vars)
    if (!s.count(v))
      fail(Errc::invalid_input, "branch context: assignment not total on the bag variables");
  std::vector<int> rem = removed;
  std::sort(rem.begin(), rem.end());
  rem.erase(std::unique(rem.begin(), rem.end()), rem.end());
  for (int c : rem)
    if (!contains_sorted(t.clauses, c))
      fail(Errc::invalid_input, "branch context: removed clause outside the bag");

  auto satisfied = [&](int c) {
    for (int l : f.clauses[c].lits) {
      auto it = s.find(lit_var(l));
      if (it != s.end() && it->second == lit_positive(l)) return true;
    }
    return false;
  };
  ctx.removed_set = rem;
  for (int c : t.clauses)
    if (!contains_sorted(rem, c) && satisfied(c)) ctx.removed_set.push_back(c);
  std::sort(ctx.removed_set.begin(), ctx.removed_set.end());

  ctx.shared_clauses = intersect_sorted(t1.clauses, t2.clauses);
  for (int c : ctx.shared_clauses)
    if (!contains_sorted(t.clauses, c))
      fail(Errc::invalid_input, "branch context: shared clause missing from the parent bag");
  for (int c : ctx.shared_clauses)
    if (!contains_sorted(ctx.removed_set, c)) ctx.branching_set.push_back(c);

  ctx.child1_space.clauses = intersect_sorted(t1.clauses, t.clauses);
  ctx.child1_space.vars = intersect_sorted(t1.vars, t.vars);
  ctx.child2_space.clauses = intersect_sorted(t2.clauses, t.clauses);
  ctx.child2_space.vars = intersect_sorted(t2.vars, t.vars);

  auto base = [&](const Bag& space, bool second) {
    Key x = 0;
    int nc = static_cast<int>(space.clauses.size());
    for (int p = 0; p < nc; p++) {
      int c = space.clauses[p];
      bool bit = contains_sorted(ctx.removed_set, c);
      if (second && contains_sorted(ctx.branching_set, c)) bit = true;  // start value
      if (bit) x |= Key(1) << p;
    }
    for (size_t p = 0; p < space.vars.size(); p++)
      if (s.at(space.vars[p])) x |= Key(1) << (nc + p);
    return x;
  };
  ctx.x1_base = base(ctx.child1_space, false);
  ctx.x2_base = base(ctx.child2_space, true);
  for (int c : ctx.branching_set) {
    int p1 = position_of(ctx.child1_space.clauses, c);
    int p2 = position_of(ctx.child2_space.clauses, c);
    if (p1 < 0 || p2 < 0)
      fail(Errc::internal, "branch context: branching clause missing from a child space");
    ctx.free_positions.emplace_back(p1, p2);
  }
  return ctx;
}

std::vector<std::pair<Key, Key>> enumerate_child_splits(const BranchContext& ctx) {
  int m = static_cast<int>(ctx.free_positions.size());
  std::vector<std::pair<Key, Key>> out;
  out.reserve(size_t(1) << m);
  Key x1 = ctx.x1_base, x2 = ctx.x2_base;
  out.emplace_back(x1, x2);
  for (uint64_t step = 1; step < (uint64_t(1) << m); step++) {
    // binary increment on x1's free digits, mirrored decrement on x2's
    for (int i = 0; i < m; i++) {
      auto [p1, p2] = ctx.free_positions[i];
      x1 ^= Key(1) << p1;
      x2 ^= Key(1) << p2;
      if (x1 >> p1 & 1u) break;
    }
    out.emplace_back(x1, x2);
  }
  return out;
}

// ---- expansions ----

std::vector<ShannonBranch> shannon_expand(const Cnf& f, const std::vector<int>& vars,
                                          int expansion_cap) {
  if ((int)vars.size() > expansion_cap)
    fail(Errc::refusal, "shannon expansion over " + std::to_string(vars.size()) +
                            " variables exceeds the cap " + std::to_string(expansion_cap));
  for (int v : vars)
    if (v < 0 || v >= f.var_count()) fail(Errc::invalid_input, "shannon: bad variable id");
  std::vector<ShannonBranch> out;
  for (uint32_t mask = 0; mask < (1u << vars.size()); mask++) {
    ShannonBranch br;
    std::map<int, bool> s;
    for (size_t i = 0; i < vars.size(); i++) {
      bool sgn = mask >> i & 1u;
      s[vars[i]] = sgn;
      br.literals.push_back(make_lit(vars[i], sgn));
    }
    br.residual.variables = f.variables;
    for (const Clause& cl : f.clauses) {
      bool sat = false;
      std::vector<int> kept;
      for (int l : cl.lits) {
        auto it = s.find(lit_var(l));
        if (it == s.end()) kept.push_back(l);
        else if (it->second == lit_positive(l)) sat = true;
      }
      if (!sat) br.residual.clauses.push_back(Clause{std::move(kept)});
    }
    out.push_back(std::move(br));
  }
  return out;
}

std::vector<Cnf> clausal_expand(const Cnf& f, const std::vector<ClauseSplit>& splits) {
  std::vector<char> is_split(f.clause_count(), 0);
  for (const auto& sp : splits) {
    if (sp.clause < 0 || sp.clause >= f.clause_count() || is_split[sp.clause])
      fail(Errc::invalid_input, "clausal expansion: bad clause id");
    is_split[sp.clause] = 1;
    std::vector<int> merged = sp.left;
    merged.insert(merged.end(), sp.right.begin(), sp.right.end());
    std::sort(merged.begin(), merged.end());
    std::vector<int> orig = f.clauses[sp.clause].lits;
    std::sort(orig.begin(), orig.end());
    if (merged != orig)
      fail(Errc::invalid_input, "clausal expansion: split does not partition the clause");
  }
  std::vector<Cnf> out;
  for (uint32_t mask = 0; mask < (1u << splits.size()); mask++) {
    Cnf g;
    g.variables = f.variables;
    for (int i = 0; i < f.clause_count(); i++)
      if (!is_split[i]) g.clauses.push_back(f.clauses[i]);
    for (size_t i = 0; i < splits.size(); i++) {
      const auto& side = (mask >> i & 1u) ? splits[i].right : splits[i].left;
      g.clauses.push_back(make_clause(side));
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---- compilation ----

namespace {

struct Builder {
  Dnnf d;
  int id_true = -1, id_false = -1;
  std::map<int, int> lit_nodes;

  int mk_true() {
    if (id_true < 0) {
      id_true = d.size();
      d.nodes.push_back(DnnfNode{DnnfNode::Kind::True, 0, {}});
    }
    return id_true;
  }
  int mk_false() {
    if (id_false < 0) {
      id_false = d.size();
      d.nodes.push_back(DnnfNode{DnnfNode::Kind::False, 0, {}});
    }
    return id_false;
  }
  int mk_lit(int lit) {
    auto it = lit_nodes.find(lit);
    if (it != lit_nodes.end()) return it->second;
    int id = d.size();
    d.nodes.push_back(DnnfNode{DnnfNode::Kind::Lit, lit, {}});
    lit_nodes.emplace(lit, id);
    return id;
  }
  int mk_and(std::vector<int> ch) {
    std::vector<int> keep;
    for (int c : ch) {
      if (c == id_true) continue;
      if (c == id_false) return mk_false();
      keep.push_back(c);
    }
    if (keep.empty()) return mk_true();
    if (keep.size() == 1) return keep[0];
    int id = d.size();
    d.nodes.push_back(DnnfNode{DnnfNode::Kind::And, 0, std::move(keep)});
    return id;
  }
  int mk_or(std::vector<int> ch) {
    std::vector<int> keep;
    for (int c : ch) {
      if (c == id_false) continue;
      if (c == id_true) return mk_true();
      keep.push_back(c);
    }
    if (keep.empty()) return mk_false();
    if (keep.size() == 1) return keep[0];
    int id = d.size();
    d.nodes.push_back(DnnfNode{DnnfNode::Kind::Or, 0, std::move(keep)});
    return id;
  }
};

std::vector<int> td_postorder(const TreeDecomposition& td) {
  std::vector<int> order;
  std::vector<std::pair<int, size_t>> stack{{td.root, 0}};
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < td.nodes[n].children.size()) {
      int ch = td.nodes[n].children[next++];
      stack.emplace_back(ch, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

std::string CompileStats::to_string() const {
  std::ostringstream os;
  os << "td_nodes " << td_nodes << "\n";
  os << "td_width " << width << "\n";
  os << "br_entries " << br_entries << "\n";
  os << "rr_entries " << rr_entries << "\n";
  os << "split_states " << split_states << "\n";
  os << "nodes_raw " << nodes_raw << "\n";
  os << "nodes_final " << nodes_final << "\n";
  os << "size_ratio " << size_ratio << "\n";
  if (naive_checks) os << "naive_checks " << naive_checks << "\n";
  for (const auto& line : per_bag) os << line << "\n";
  return os.str();
}

TreeDecomposition prepare_decomposition(const TreeDecomposition& td, const IncidenceGraph& ig) {
  TreeDecomposition m = minimize_tree_decomposition(td, ig.g);
  int best = 0, best_clauses = -1;
  for (int t = 0; t < m.size(); t++) {
    int c = 0;
    for (int v : m.nodes[t].bag)
      if (v >= ig.nv) c++;
    if (c > best_clauses) {
      best_clauses = c;
      best = t;
    }
  }
  m = reroot(m, best);
  return binarize_tree_decomposition(m, /*pad_unary=*/true);
}

CompileResult compile_cnf(const Cnf& f, const TreeDecomposition& td, const CompilerOptions& opts) {
  CompileResult res;
  IncidenceGraph ig = incidence_graph(f);
  if (td.size() == 0) {
    if (ig.g.n > 0) fail(Errc::invalid_input, "compile: empty decomposition");
    res.dnnf.vars = f.variables;
    res.dnnf.nodes.push_back(DnnfNode{DnnfNode::Kind::True, 0, {}});
    res.dnnf.root = 0;
    res.stats.nodes_raw = res.stats.nodes_final = 1;
    return res;
  }
  {
    TdReport r = validate_tree_decomposition(td, ig.g);
    if (!r.ok())
      fail(Errc::invalid_input,
           "compile: decomposition does not fit the incidence graph:\n" + r.to_string());
  }
  if (td.width() > opts.width_cap)
    fail(Errc::refusal, "compile: decomposition width " + std::to_string(td.width()) +
                            " exceeds the cap " + std::to_string(opts.width_cap));
  for (const auto& nd : td.nodes) {
    if (nd.children.size() != 0 && nd.children.size() != 2)
      fail(Errc::invalid_input, "compile: decomposition must be binarized and padded");
    if ((int)nd.bag.size() > 22) fail(Errc::refusal, "compile: bag too large for dense tables");
  }

  res.stats.td_nodes = td.size();
  res.stats.width = td.width();

  int n = td.size();
  std::vector<Bag> bags(n);
  for (int t = 0; t < n; t++) bags[t] = split_bag(td.nodes[t].bag, ig.nv);

  Builder b;
  b.d.vars = f.variables;
  std::vector<std::vector<int>> br(n), rr(n);
  std::vector<Bag> rrspace(n);

  auto order = td_postorder(td);
  for (int t : order) {
    const Bag& B = bags[t];
    int nc = (int)B.clauses.size(), nvb = (int)B.vars.size();
    int bits = nc + nvb;
    Key var_region_mask = nvb >= 31 ? ~Key(0) : ((Key(1) << nvb) - 1);
    // per-clause satisfied masks over the variable region
    std::vector<Key> pos(nc, 0), neg(nc, 0);
    for (int p = 0; p < nc; p++)
      for (int l : f.clauses[B.clauses[p]].lits) {
        int q = position_of(B.vars, lit_var(l));
        if (q < 0) continue;
        (lit_positive(l) ? pos[p] : neg[p]) |= Key(1) << q;
      }
    auto satisfied = [&](int p, Key x) {
      Key vbits = (x >> nc) & var_region_mask;
      return ((vbits & pos[p]) | (~vbits & neg[p] & var_region_mask)) != 0;
    };

    br[t].assign(size_t(1) << bits, -1);
    res.stats.br_entries += size_t(1) << bits;
    const auto& ch = td.nodes[t].children;
    if (ch.empty()) {
      for (Key x = 0; x < (Key(1) << bits); x++) {
        bool ok = true;
        for (int p = 0; p < nc && ok; p++)
          if (!(x >> p & 1u) && !satisfied(p, x)) ok = false;
        br[t][x] = ok ? b.mk_true() : b.mk_false();
      }
    } else {
      int c1 = ch[0], c2 = ch[1];
      // clauses no child can see: either removed, satisfied here, or dead
      std::vector<int> local;
      for (int p = 0; p < nc; p++)
        if (!contains_sorted(bags[c1].clauses, B.clauses[p]) &&
            !contains_sorted(bags[c2].clauses, B.clauses[p]))
          local.push_back(p);
      for (Key x = 0; x < (Key(1) << bits); x++) {
        bool dead = false;
        for (int p : local)
          if (!(x >> p & 1u) && !satisfied(p, x)) {
            dead = true;
            break;
          }
        if (dead) {
          br[t][x] = b.mk_false();
          continue;
        }
        std::vector<int> removed;
        for (int p = 0; p < nc; p++)
          if (x >> p & 1u) removed.push_back(B.clauses[p]);
        std::vector<std::pair<int, bool>> assignment;
        for (int q = 0; q < nvb; q++) assignment.emplace_back(B.vars[q], (x >> (nc + q)) & 1u);
        BranchContext ctx = make_branch_context(f, B, bags[c1], bags[c2], removed, assignment);
        auto pairs = enumerate_child_splits(ctx);
        res.stats.split_states += (long long)pairs.size();
        std::vector<int> inputs;
        inputs.reserve(pairs.size());
        for (auto [x1, x2] : pairs) inputs.push_back(b.mk_and({rr[c1][x1], rr[c2][x2]}));
        br[t][x] = b.mk_or(std::move(inputs));
      }
    }

    if (t == td.root) continue;
    int parent = td.nodes[t].parent;
    rrspace[t].clauses = intersect_sorted(B.clauses, bags[parent].clauses);
    rrspace[t].vars = intersect_sorted(B.vars, bags[parent].vars);
    int rn = rrspace[t].bits();
    int rnc = (int)rrspace[t].clauses.size();
    // masks and position maps between the bag space and the shared space
    Key redundant_mask = 0;
    std::vector<int> shared_pos;  // for each shared-space bit, its bag-space bit
    for (int p = 0; p < nc; p++)
      if (!contains_sorted(rrspace[t].clauses, B.clauses[p])) redundant_mask |= Key(1) << p;
    for (int p = 0; p < rnc; p++) shared_pos.push_back(position_of(B.clauses, rrspace[t].clauses[p]));
    for (size_t q = 0; q < rrspace[t].vars.size(); q++)
      shared_pos.push_back(nc + position_of(B.vars, rrspace[t].vars[q]));
    std::vector<int> free_vars;  // bag var positions outside the parent
    for (int q = 0; q < nvb; q++)
      if (!contains_sorted(rrspace[t].vars, B.vars[q])) free_vars.push_back(q);

    std::vector<std::vector<int>> pending(size_t(1) << rn);
    for (Key x = 0; x < (Key(1) << bits); x++) {
      bool redundant = (x & redundant_mask) != 0;
      if (opts.naive_wiring) {
        // re-derive by explicit set operations and require agreement
        std::vector<int> removed;
        for (int p = 0; p < nc; p++)
          if (x >> p & 1u) removed.push_back(B.clauses[p]);
        bool redundant2 = false;
        for (int cidx : removed)
          if (!contains_sorted(bags[parent].clauses, cidx)) redundant2 = true;
        if (redundant != redundant2)
          fail(Errc::internal, "redundancy mask disagrees with the set derivation");
        if (!redundant) {
          Key y2 = 0;
          for (int p = 0; p < rnc; p++)
            if (contains_sorted(removed, rrspace[t].clauses[p])) y2 |= Key(1) << p;
          for (size_t q = 0; q < rrspace[t].vars.size(); q++) {
            int bagq = position_of(B.vars, rrspace[t].vars[q]);
            if (x >> (nc + bagq) & 1u) y2 |= Key(1) << (rnc + q);
          }
          Key y1 = 0;
          for (int p = 0; p < rn; p++)
            if (x >> shared_pos[p] & 1u) y1 |= Key(1) << p;
          if (y1 != y2) fail(Errc::internal, "restriction key disagrees with the set derivation");
        }
        res.stats.naive_checks++;
      }
      if (redundant) continue;
      Key y = 0;
      for (int p = 0; p < rn; p++)
        if (x >> shared_pos[p] & 1u) y |= Key(1) << p;
      std::vector<int> conj;
      for (int q : free_vars) conj.push_back(b.mk_lit(make_lit(B.vars[q], x >> (nc + q) & 1u)));
      conj.push_back(br[t][x]);
      pending[y].push_back(b.mk_and(std::move(conj)));
    }
    rr[t].assign(size_t(1) << rn, -1);
    res.stats.rr_entries += size_t(1) << rn;
    for (Key y = 0; y < (Key(1) << rn); y++) rr[t][y] = b.mk_or(std::move(pending[y]));
    res.stats.per_bag.push_back("bag " + std::to_string(t) + " br " +
                                std::to_string(size_t(1) << bits) + " rr " +
                                std::to_string(size_t(1) << rn));
    // child tables are dead now
    for (int c : ch) {
      br[c].clear();
      br[c].shrink_to_fit();
      rr[c].clear();
      rr[c].shrink_to_fit();
    }
  }

  // the root residual keeps every bag clause and conjoins the full assignment
  {
    int t = td.root;
    const Bag& B = bags[t];
    int nc = (int)B.clauses.size(), nvb = (int)B.vars.size();
    std::vector<int> inputs;
    for (Key v = 0; v < (Key(1) << nvb); v++) {
      Key x = v << nc;
      std::vector<int> conj;
      for (int q = 0; q < nvb; q++) conj.push_back(b.mk_lit(make_lit(B.vars[q], v >> q & 1u)));
      conj.push_back(br[t][x]);
      inputs.push_back(b.mk_and(std::move(conj)));
    }
    b.d.root = b.mk_or(std::move(inputs));
    res.stats.per_bag.push_back("bag " + std::to_string(t) + " br " +
                                std::to_string(size_t(1) << (nc + nvb)) + " rr 0");
  }

  res.stats.nodes_raw = b.d.size();
  res.dnnf = simplify(b.d);
  res.stats.nodes_final = res.dnnf.size();
  res.stats.size_ratio =
      res.stats.nodes_raw / (std::pow(3.0, res.stats.width + 1) * res.stats.td_nodes);
  return res;
}

// ---- pipelines ----

std::string PipelineStats::to_string() const {
  std::ostringstream os;
  os << "circuit_gates " << circuit_gates << "\n";
  os << "normalized_gates " << normalized_gates << "\n";
  os << "circuit_td_width " << circuit_td_width << "\n";
  os << "cnf_vars " << cnf_vars << "\n";
  os << "cnf_clauses " << cnf_clauses << "\n";
  os << "lifted_width " << lifted_width << "\n";
  os << "lifted_nodes " << lifted_nodes << "\n";
  os << "prepared_width " << prepared_width << "\n";
  os << "prepared_nodes " << prepared_nodes << "\n";
  if (transform.gates_in > 0) os << transform.to_string();
  os << compile.to_string();
  return os.str();
}

PipelineResult compile_circuit(const Circuit& c, int output, const TreeDecomposition& td,
                               const CompilerOptions& opts) {
  ValidationReport vr = validate_circuit(c);
  if (!vr.ok()) fail(Errc::invalid_input, "compile: invalid circuit:\n" + vr.to_string());
  if (output < 0 || output >= c.size()) fail(Errc::invalid_input, "compile: bad output id");
  PipelineResult res;
  res.stats.circuit_gates = c.size();
  res.stats.circuit_td_width = td.width();

  Circuit single = c;
  single.outputs = {output};
  {
    Graph dag = circuit_dag(single);
    TdReport r = validate_tree_decomposition(td, dag);
    if (!r.ok())
      fail(Errc::invalid_input,
           "compile: decomposition does not fit the circuit DAG:\n" + r.to_string());
  }
  NormalizeResult norm = normalize_not_chains_mapped(single);
  res.stats.normalized_gates = norm.circuit.size();
  TreeDecomposition td1 = substitute_bags(td, norm.bag_map);
  td1 = minimize_tree_decomposition(td1, circuit_dag(norm.circuit));

  auto [f, m] = tseitin_transform(norm.circuit, norm.circuit.outputs[0]);
  res.stats.cnf_vars = f.var_count();
  res.stats.cnf_clauses = f.clause_count();
  TreeDecomposition lifted = lift_tree_decomposition(td1, norm.circuit, f, m);
  res.stats.lifted_width = lifted.width();
  res.stats.lifted_nodes = lifted.size();

  IncidenceGraph ig = incidence_graph(f);
  TreeDecomposition prep = prepare_decomposition(lifted, ig);
  res.stats.prepared_width = prep.width();
  res.stats.prepared_nodes = prep.size();

  CompileResult cr = compile_cnf(f, prep, opts);
  res.stats.compile = cr.stats;
  Dnnf d = forget(cr.dnnf, c.variables);
  res.dnnf = simplify(d);
  return res;
}

PipelineResult compile_circuit_scd(const Circuit& c, const Scd& s, int output,
                                   const CompilerOptions& opts) {
  TransformResult tr = transform_scd(c, s, opts.in_gate_mode);
  // original gates keep their ids in the rewrite
  PipelineResult res = compile_circuit(tr.fstar, output, tr.td, opts);
  res.stats.transform = tr.stats;
  return res;
}

PipelineResult compile_circuit_cw(const Circuit& c, const CliqueDecomposition& cd, int output,
                                  const CompilerOptions& opts) {
  TransformResult tr = transform(c, cd, opts.in_gate_mode);
  PipelineResult res = compile_circuit(tr.fstar, output, tr.td, opts);
  res.stats.transform = tr.stats;
  return res;
}

}  // namespace kc
