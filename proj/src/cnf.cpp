#include "kc/cnf.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace kc {

std::optional<Clause> try_make_clause(std::vector<int> lits) {
  std::sort(lits.begin(), lits.end(),
            [](int a, int b) { return lit_var(a) != lit_var(b) ? lit_var(a) < lit_var(b) : a < b; });
  std::vector<int> out;
  for (int l : lits) {
    if (!out.empty() && out.back() == l) continue;
    if (!out.empty() && lit_var(out.back()) == lit_var(l)) return std::nullopt;  // tautology
    out.push_back(l);
  }
  return Clause{std::move(out)};
}

Clause make_clause(std::vector<int> lits) {
  auto cl = try_make_clause(std::move(lits));
  if (!cl) fail(Errc::invalid_input, "tautological clause");
  return *cl;
}

bool clause_satisfied(const Clause& cl, uint32_t assignment) {
  for (int l : cl.lits) {
    bool v = assignment >> lit_var(l) & 1u;
    if (v == lit_positive(l)) return true;
  }
  return false;
}

ModelSet cnf_models(const Cnf& f, OracleLimits lim) {
  int nv = f.var_count();
  if (nv > lim.max_vars)
    fail(Errc::refusal, "oracle limit exceeded: " + std::to_string(nv) + " variables > " +
                            std::to_string(lim.max_vars));
  ModelSet out;
  out.vars = f.variables;
  // per-clause literal masks make each check two ands
  std::vector<uint32_t> pos(f.clause_count(), 0), neg(f.clause_count(), 0);
  for (int i = 0; i < f.clause_count(); i++)
    for (int l : f.clauses[i].lits)
      (lit_positive(l) ? pos[i] : neg[i]) |= 1u << lit_var(l);
  uint32_t total = nv >= 31 ? 0 : 1u << nv;
  for (uint32_t a = 0; a < total; a++) {
    bool ok = true;
    for (int i = 0; i < f.clause_count() && ok; i++)
      ok = ((a & pos[i]) | (~a & neg[i])) != 0;
    if (ok) out.masks.push_back(a);
  }
  return out;
}

IncidenceGraph incidence_graph(const Cnf& f) {
  IncidenceGraph ig;
  ig.nv = f.var_count();
  ig.nc = f.clause_count();
  ig.g.n = ig.nv + ig.nc;
  ig.g.directed = false;
  for (int i = 0; i < f.clause_count(); i++)
    for (int l : f.clauses[i].lits) ig.g.add_edge(lit_var(l), ig.nv + i);
  ig.g.dedupe();
  return ig;
}

Cnf parse_dimacs(std::istream& in) {
  Cnf f;
  int nv = -1, nc = -1;
  std::vector<int> cur;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w) || w == "c") continue;
    if (w == "p") {
      std::string cnf_word;
      if (!(ls >> cnf_word >> nv >> nc) || cnf_word != "cnf" || nv < 0 || nc < 0)
        fail(Errc::parse, "dimacs line " + std::to_string(lineno) + ": bad header");
      for (int i = 0; i < nv; i++) f.variables.push_back("x" + std::to_string(i + 1));
      continue;
    }
    if (nv < 0) fail(Errc::parse, "dimacs: clause before header");
    std::istringstream body(line);
    int l;
    while (body >> l) {
      if (l == 0) {
        auto cl = try_make_clause(cur);
        if (!cl) fail(Errc::parse, "dimacs line " + std::to_string(lineno) + ": tautological clause");
        f.clauses.push_back(std::move(*cl));
        cur.clear();
      } else {
        if (std::abs(l) > nv)
          fail(Errc::parse, "dimacs line " + std::to_string(lineno) + ": literal out of range");
        cur.push_back(l);
      }
    }
  }
  if (!cur.empty()) fail(Errc::parse, "dimacs: unterminated clause");
  if (f.clause_count() != nc) fail(Errc::parse, "dimacs: clause count mismatch");
  return f;
}

Cnf load_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open cnf file: " + path);
  return parse_dimacs(in);
}

void write_dimacs(std::ostream& out, const Cnf& f) {
  out << "p cnf " << f.var_count() << ' ' << f.clause_count() << "\n";
  for (const auto& cl : f.clauses) {
    for (int l : cl.lits) out << l << ' ';
    out << "0\n";
  }
}

std::string dimacs_to_string(const Cnf& f) {
  std::ostringstream out;
  write_dimacs(out, f);
  return out.str();
}

}  // namespace kc
