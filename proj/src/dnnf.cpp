#include "kc/dnnf.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "kc/cnf.hpp"

namespace kc {

std::string DnnfReport::to_string() const {
  if (ok()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    s += v;
    s += '\n';
  }
  return s;
}

namespace {

struct VarSets {
  int words = 0;
  std::vector<uint64_t> bits;  // size() * words

  const uint64_t* of(int node) const { return bits.data() + (size_t)node * words; }
  uint64_t* of(int node) { return bits.data() + (size_t)node * words; }
};

VarSets var_sets(const Dnnf& d) {
  VarSets vs;
  vs.words = (int)(d.vars.size() + 63) / 64;
  vs.bits.assign((size_t)d.size() * vs.words, 0);
  for (int i = 0; i < d.size(); i++) {
    const DnnfNode& nd = d.nodes[i];
    if (nd.kind == DnnfNode::Kind::Lit) {
      int v = lit_var(nd.lit);
      vs.of(i)[v / 64] |= 1ull << (v % 64);
    } else {
      for (int ch : nd.children) {
        if (ch < 0 || ch >= i)
          fail(Errc::invalid_input, "dnnf: children must precede parents");
        for (int w = 0; w < vs.words; w++) vs.of(i)[w] |= vs.of(ch)[w];
      }
    }
  }
  return vs;
}

}  // namespace

DnnfReport check_decomposable(const Dnnf& d) {
  DnnfReport r;
  if (d.root < 0 || d.root >= d.size()) {
    r.violations.push_back("missing root");
    return r;
  }
  for (int i = 0; i < d.size(); i++) {
    const DnnfNode& nd = d.nodes[i];
    for (int ch : nd.children)
      if (ch < 0 || ch >= i) {
        r.violations.push_back("node " + std::to_string(i) + ": bad child order");
        return r;
      }
    if (nd.kind == DnnfNode::Kind::Lit &&
        (lit_var(nd.lit) < 0 || lit_var(nd.lit) >= (int)d.vars.size()))
      r.violations.push_back("node " + std::to_string(i) + ": literal out of range");
  }
  if (!r.ok()) return r;
  VarSets vs = var_sets(d);
  for (int i = 0; i < d.size(); i++) {
    const DnnfNode& nd = d.nodes[i];
    if (nd.kind != DnnfNode::Kind::And || nd.children.size() < 2) continue;
    for (size_t a = 0; a + 1 < nd.children.size(); a++)
      for (size_t b = a + 1; b < nd.children.size(); b++) {
        for (int w = 0; w < vs.words; w++) {
          uint64_t inter = vs.of(nd.children[a])[w] & vs.of(nd.children[b])[w];
          if (inter) {
            int v = w * 64 + std::countr_zero(inter);
            r.violations.push_back("And node " + std::to_string(i) +
                                   ": children share variable " + d.vars[v]);
            goto next_pair;
          }
        }
      next_pair:;
      }
  }
  return r;
}

Dnnf forget(const Dnnf& d, const std::vector<std::string>& keep) {
  Dnnf out = d;
  std::vector<char> keep_var(d.vars.size(), 0);
  for (const auto& k : keep)
    for (size_t i = 0; i < d.vars.size(); i++)
      if (d.vars[i] == k) keep_var[i] = 1;
  for (auto& nd : out.nodes)
    if (nd.kind == DnnfNode::Kind::Lit && !keep_var[lit_var(nd.lit)]) {
      nd.kind = DnnfNode::Kind::True;
      nd.lit = 0;
    }
  return out;
}

bool is_satisfiable(const Dnnf& d) {
  DnnfReport r = check_decomposable(d);
  if (!r.ok())
    fail(Errc::refusal, "is_satisfiable: input is not decomposable:\n" + r.to_string());
  std::vector<char> sat(d.size());
  for (int i = 0; i < d.size(); i++) {
    const DnnfNode& nd = d.nodes[i];
    switch (nd.kind) {
      case DnnfNode::Kind::Lit:
      case DnnfNode::Kind::True: sat[i] = 1; break;
      case DnnfNode::Kind::False: sat[i] = 0; break;
      case DnnfNode::Kind::And: {
        char v = 1;
        for (int ch : nd.children) v = v && sat[ch];
        sat[i] = v;
        break;
      }
      case DnnfNode::Kind::Or: {
        char v = 0;
        for (int ch : nd.children) v = v || sat[ch];
        sat[i] = v;
        break;
      }
    }
  }
  return sat[d.root];
}

ModelSet models_dnnf(const Dnnf& d, const std::vector<std::string>& vars, OracleLimits lim) {
  if ((int)vars.size() > lim.max_vars)
    fail(Errc::refusal, "oracle limit exceeded: " + std::to_string(vars.size()) +
                            " variables > " + std::to_string(lim.max_vars));
  if (d.root < 0) fail(Errc::invalid_input, "models_dnnf: missing root");
  // map dnnf literal vars onto positions in `vars`
  std::vector<int> pos(d.vars.size(), -1);
  for (size_t i = 0; i < d.vars.size(); i++)
    for (size_t j = 0; j < vars.size(); j++)
      if (vars[j] == d.vars[i]) pos[i] = (int)j;
  for (const auto& nd : d.nodes)
    if (nd.kind == DnnfNode::Kind::Lit && pos[lit_var(nd.lit)] < 0)
      fail(Errc::invalid_input,
           "models_dnnf: variable " + d.vars[lit_var(nd.lit)] + " not in enumeration set");
  ModelSet out;
  out.vars = vars;
  std::vector<char> val(d.size());
  uint32_t total = vars.size() >= 31 ? 0 : 1u << vars.size();
  for (uint32_t a = 0; a < total; a++) {
    for (int i = 0; i < d.size(); i++) {
      const DnnfNode& nd = d.nodes[i];
      switch (nd.kind) {
        case DnnfNode::Kind::Lit:
          val[i] = (a >> pos[lit_var(nd.lit)] & 1u) == (unsigned)lit_positive(nd.lit);
          break;
        case DnnfNode::Kind::True: val[i] = 1; break;
        case DnnfNode::Kind::False: val[i] = 0; break;
        case DnnfNode::Kind::And: {
          char v = 1;
          for (int ch : nd.children) v = v && val[ch];
          val[i] = v;
          break;
        }
        case DnnfNode::Kind::Or: {
          char v = 0;
          for (int ch : nd.children) v = v || val[ch];
          val[i] = v;
          break;
        }
      }
    }
    if (val[d.root]) out.masks.push_back(a);
  }
  return out;
}

Dnnf simplify(const Dnnf& d) {
  if (d.root < 0) fail(Errc::invalid_input, "simplify: missing root");
  for (int i = 0; i < d.size(); i++)
    for (int ch : d.nodes[i].children)
      if (ch < 0 || ch >= i) fail(Errc::invalid_input, "simplify: children must precede parents");
  Dnnf out;
  out.vars = d.vars;
  std::map<std::tuple<int, int, std::vector<int>>, int> cons;  // (kind, lit, children)
  auto emit = [&](DnnfNode::Kind k, int lit, std::vector<int> children) {
    auto key = std::make_tuple((int)k, lit, children);
    auto it = cons.find(key);
    if (it != cons.end()) return it->second;
    int id = out.size();
    out.nodes.push_back(DnnfNode{k, lit, std::move(children)});
    cons.emplace(std::move(key), id);
    return id;
  };
  std::vector<int> map(d.size(), -1);
  // rebuild only what the root reaches
  std::vector<int> stack{d.root};
  std::vector<char> visiting(d.size(), 0);
  while (!stack.empty()) {
    int n = stack.back();
    if (map[n] >= 0) {
      stack.pop_back();
      continue;
    }
    const DnnfNode& nd = d.nodes[n];
    if (!visiting[n]) {
      visiting[n] = 1;
      for (int ch : nd.children)
        if (map[ch] < 0) stack.push_back(ch);
      continue;
    }
    stack.pop_back();
    switch (nd.kind) {
      case DnnfNode::Kind::Lit: map[n] = emit(DnnfNode::Kind::Lit, nd.lit, {}); break;
      case DnnfNode::Kind::True: map[n] = emit(DnnfNode::Kind::True, 0, {}); break;
      case DnnfNode::Kind::False: map[n] = emit(DnnfNode::Kind::False, 0, {}); break;
      case DnnfNode::Kind::And:
      case DnnfNode::Kind::Or: {
        bool is_and = nd.kind == DnnfNode::Kind::And;
        std::vector<int> ch;
        bool absorbed = false;
        for (int c : nd.children) {
          const DnnfNode& cn = out.nodes[map[c]];
          if (cn.kind == (is_and ? DnnfNode::Kind::True : DnnfNode::Kind::False)) continue;
          if (cn.kind == (is_and ? DnnfNode::Kind::False : DnnfNode::Kind::True)) {
            absorbed = true;
            break;
          }
          ch.push_back(map[c]);
        }
        std::sort(ch.begin(), ch.end());
        ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
        if (absorbed)
          map[n] = emit(is_and ? DnnfNode::Kind::False : DnnfNode::Kind::True, 0, {});
        else if (ch.empty())
          map[n] = emit(is_and ? DnnfNode::Kind::True : DnnfNode::Kind::False, 0, {});
        else if (ch.size() == 1)
          map[n] = ch[0];
        else
          map[n] = emit(nd.kind, 0, std::move(ch));
        break;
      }
    }
  }
  out.root = map[d.root];
  if (out.root != out.size() - 1) {
    // root collapsed onto an earlier node; sweep what it cannot reach
    std::vector<char> live(out.size(), 0);
    live[out.root] = 1;
    for (int i = out.root; i >= 0; i--)
      if (live[i])
        for (int ch : out.nodes[i].children) live[ch] = 1;
    Dnnf swept;
    swept.vars = out.vars;
    std::vector<int> remap(out.size(), -1);
    for (int i = 0; i <= out.root; i++) {
      if (!live[i]) continue;
      remap[i] = swept.size();
      DnnfNode nd = out.nodes[i];
      for (int& ch : nd.children) ch = remap[ch];
      swept.nodes.push_back(std::move(nd));
    }
    swept.root = remap[out.root];
    return swept;
  }
  return out;
}

// ---- .nnf format ----

Dnnf parse_nnf(std::istream& in) {
  Dnnf d;
  std::string line;
  int n = -1, e = -1, v = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w) || w == "c") continue;
    if (w == "nnf") {
      if (!(ls >> n >> e >> v) || n < 0 || e < 0 || v < 0)
        fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad header");
      for (int i = 0; i < v; i++) d.vars.push_back("x" + std::to_string(i + 1));
      continue;
    }
    if (n < 0) fail(Errc::parse, "nnf: node before header");
    DnnfNode nd;
    if (w == "L") {
      int lit;
      if (!(ls >> lit) || lit == 0 || std::abs(lit) > v)
        fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad literal");
      nd.kind = DnnfNode::Kind::Lit;
      nd.lit = lit;
    } else if (w == "A") {
      int k;
      if (!(ls >> k) || k < 0) fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad A");
      nd.kind = k == 0 ? DnnfNode::Kind::True : DnnfNode::Kind::And;
      for (int i = 0; i < k; i++) {
        int ch;
        if (!(ls >> ch) || ch < 0 || ch >= (int)d.nodes.size())
          fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad child");
        nd.children.push_back(ch);
      }
    } else if (w == "O") {
      int j, k;
      if (!(ls >> j >> k) || k < 0)
        fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad O");
      nd.kind = k == 0 ? DnnfNode::Kind::False : DnnfNode::Kind::Or;
      for (int i = 0; i < k; i++) {
        int ch;
        if (!(ls >> ch) || ch < 0 || ch >= (int)d.nodes.size())
          fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": bad child");
        nd.children.push_back(ch);
      }
    } else {
      fail(Errc::parse, "nnf line " + std::to_string(lineno) + ": unknown node '" + w + "'");
    }
    d.nodes.push_back(std::move(nd));
  }
  if ((int)d.nodes.size() != n) fail(Errc::parse, "nnf: node count mismatch");
  d.root = n - 1;
  if (n == 0) fail(Errc::parse, "nnf: empty");
  return d;
}

Dnnf load_nnf(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open nnf file: " + path);
  return parse_nnf(in);
}

void write_nnf(std::ostream& out, const Dnnf& d) {
  if (d.root != d.size() - 1) fail(Errc::invalid_input, "write_nnf: root must be the last node");
  int edges = 0;
  for (const auto& nd : d.nodes) edges += (int)nd.children.size();
  out << "nnf " << d.size() << ' ' << edges << ' ' << d.vars.size() << "\n";
  for (const auto& nd : d.nodes) {
    switch (nd.kind) {
      case DnnfNode::Kind::Lit: out << "L " << nd.lit << "\n"; break;
      case DnnfNode::Kind::True: out << "A 0\n"; break;
      case DnnfNode::Kind::False: out << "O 0 0\n"; break;
      case DnnfNode::Kind::And: {
        out << "A " << nd.children.size();
        for (int ch : nd.children) out << ' ' << ch;
        out << "\n";
        break;
      }
      case DnnfNode::Kind::Or: {
        out << "O 0 " << nd.children.size();
        for (int ch : nd.children) out << ' ' << ch;
        out << "\n";
        break;
      }
    }
  }
}

std::string nnf_to_string(const Dnnf& d) {
  std::ostringstream out;
  write_nnf(out, d);
  return out.str();
}

}  // namespace kc
