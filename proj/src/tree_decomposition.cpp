#include "kc/tree_decomposition.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kc/circuit.hpp"

namespace kc {

void Graph::dedupe() {
  for (auto& e : edges)
    if (!directed && e.first > e.second) std::swap(e.first, e.second);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

Graph circuit_dag(const Circuit& c) {
  Graph g;
  g.n = c.size();
  g.directed = true;
  g.edges = circuit_arcs(c);
  return g;
}

int TreeDecomposition::add_node(std::vector<int> bag, int parent) {
  std::sort(bag.begin(), bag.end());
  bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
  int id = size();
  nodes.push_back(Node{std::move(bag), parent, {}});
  if (parent >= 0) nodes[parent].children.push_back(id);
  return id;
}

int TreeDecomposition::width() const {
  int w = -1;
  for (const auto& nd : nodes) w = std::max(w, (int)nd.bag.size() - 1);
  return w;
}

void TreeDecomposition::sort_bags() {
  for (auto& nd : nodes) {
    std::sort(nd.bag.begin(), nd.bag.end());
    nd.bag.erase(std::unique(nd.bag.begin(), nd.bag.end()), nd.bag.end());
  }
}

std::string TdReport::to_string() const {
  if (ok()) return "ok";
  std::string s;
  for (const auto& v : violations) {
    s += v;
    s += '\n';
  }
  return s;
}

namespace {

bool bag_has(const std::vector<int>& bag, int v) {
  return std::binary_search(bag.begin(), bag.end(), v);
}

// occurrence nodes of v form a connected subtree?
bool occurrences_connected(const TreeDecomposition& td, int v, int& count_out) {
  int first = -1, count = 0;
  for (int i = 0; i < td.size(); i++)
    if (bag_has(td.nodes[i].bag, v)) {
      count++;
      if (first == -1) first = i;
    }
  count_out = count;
  if (count <= 1) return true;
  // BFS within occurrence nodes
  std::vector<char> seen(td.size(), 0);
  std::vector<int> stack{first};
  seen[first] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    reached++;
    auto visit = [&](int u) {
      if (u >= 0 && !seen[u] && bag_has(td.nodes[u].bag, v)) {
        seen[u] = 1;
        stack.push_back(u);
      }
    };
    visit(td.nodes[t].parent);
    for (int ch : td.nodes[t].children) visit(ch);
  }
  return reached == count;
}

}  // namespace

TdReport validate_tree_decomposition(const TreeDecomposition& td, const Graph& g) {
  TdReport r;
  if (td.nodes.empty()) {
    if (g.n > 0) r.violations.push_back("empty decomposition for non-empty graph");
    return r;
  }
  // tree structure sanity
  for (int i = 0; i < td.size(); i++) {
    const auto& nd = td.nodes[i];
    if (!std::is_sorted(nd.bag.begin(), nd.bag.end()))
      r.violations.push_back("bag " + std::to_string(i) + " not sorted");
    for (int ch : nd.children)
      if (ch < 0 || ch >= td.size() || td.nodes[ch].parent != i)
        r.violations.push_back("broken child link at node " + std::to_string(i));
  }
  {
    // all nodes reachable from root exactly once
    std::vector<char> seen(td.size(), 0);
    std::vector<int> stack{td.root};
    int cnt = 0;
    if (td.root >= 0 && td.root < td.size()) {
      seen[td.root] = 1;
      while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        cnt++;
        for (int ch : td.nodes[t].children)
          if (ch >= 0 && ch < td.size() && !seen[ch]) {
            seen[ch] = 1;
            stack.push_back(ch);
          }
      }
    }
    if (cnt != td.size()) r.violations.push_back("decomposition tree is not connected");
  }
  if (!r.ok()) return r;

  std::vector<char> covered(g.n, 0);
  for (const auto& nd : td.nodes)
    for (int v : nd.bag)
      if (v >= 0 && v < g.n) covered[v] = 1;
  for (int v = 0; v < g.n; v++)
    if (!covered[v]) r.violations.push_back("vertex " + std::to_string(v) + " in no bag");
  for (auto [u, v] : g.edges) {
    bool ok = false;
    for (const auto& nd : td.nodes)
      if (bag_has(nd.bag, u) && bag_has(nd.bag, v)) {
        ok = true;
        break;
      }
    if (!ok)
      r.violations.push_back("edge {" + std::to_string(u) + "," + std::to_string(v) +
                             "} uncovered");
  }
  for (int v = 0; v < g.n; v++) {
    int cnt;
    if (!occurrences_connected(td, v, cnt))
      r.violations.push_back("occurrences of vertex " + std::to_string(v) + " disconnected");
  }
  return r;
}

TreeDecomposition minimize_tree_decomposition(const TreeDecomposition& td, const Graph& g) {
  if (!validate_tree_decomposition(td, g).ok())
    fail(Errc::invalid_input, "minimize: input decomposition invalid");
  TreeDecomposition out = td;
  // occurrence counts per vertex; edge witness counts
  std::vector<int> occ(g.n, 0);
  for (const auto& nd : out.nodes)
    for (int v : nd.bag)
      if (v >= 0 && v < g.n) occ[v]++;

  std::vector<std::vector<std::pair<int, int>>> adj(g.n);  // v -> (neighbor, edge idx)
  std::vector<int> witness(g.edges.size(), 0);
  for (size_t e = 0; e < g.edges.size(); e++) {
    auto [u, v] = g.edges[e];
    adj[u].emplace_back(v, (int)e);
    if (u != v) adj[v].emplace_back(u, (int)e);
  }
  for (const auto& nd : out.nodes)
    for (size_t e = 0; e < g.edges.size(); e++)
      if (bag_has(nd.bag, g.edges[e].first) && bag_has(nd.bag, g.edges[e].second)) witness[e]++;

  auto removable = [&](int t, int v) {
    if (v < 0 || v >= g.n) return true;  // foreign element, always strip
    if (occ[v] == 1) return false;       // union property
    // an incident edge witnessed only in this bag pins v here
    for (auto [u, e] : adj[v])
      if (bag_has(out.nodes[t].bag, u) && witness[e] <= 1) return false;
    // connectedness: t must be a leaf of v's occurrence subtree
    int deg = 0;
    auto count = [&](int u) {
      if (u >= 0 && bag_has(out.nodes[u].bag, v)) deg++;
    };
    count(out.nodes[t].parent);
    for (int ch : out.nodes[t].children) count(ch);
    return deg <= 1;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < out.size(); t++) {
      auto& bag = out.nodes[t].bag;
      for (size_t i = 0; i < bag.size();) {
        int v = bag[i];
        if (removable(t, v)) {
          bag.erase(bag.begin() + i);
          if (v >= 0 && v < g.n) {
            occ[v]--;
            for (auto [u, e] : adj[v])
              if (bag_has(bag, u)) witness[e]--;
          }
          changed = true;
        } else {
          i++;
        }
      }
    }
  }
  return out;
}

TreeDecomposition binarize_tree_decomposition(const TreeDecomposition& td, bool pad_unary) {
  TreeDecomposition out;
  if (td.nodes.empty()) return out;
  out.root = 0;
  // copy top-down, splitting nodes with >2 children into chains
  struct Item {
    int src;
    int dst_parent;
  };
  std::vector<Item> stack{{td.root, -1}};
  while (!stack.empty()) {
    auto [src, dst_parent] = stack.back();
    stack.pop_back();
    int dst = out.add_node(td.nodes[src].bag, dst_parent);
    const auto& ch = td.nodes[src].children;
    if (ch.size() <= 2) {
      for (int c : ch) stack.push_back({c, dst});
    } else {
      stack.push_back({ch[0], dst});
      int hang = dst;
      for (size_t i = 1; i + 1 < ch.size(); i++) {
        int link = out.add_node(td.nodes[src].bag, hang);
        stack.push_back({ch[i], link});
        hang = link;
      }
      stack.push_back({ch.back(), hang});
    }
  }
  if (pad_unary) {
    int n = out.size();
    for (int t = 0; t < n; t++)
      if (out.nodes[t].children.size() == 1) out.add_node({}, t);
  }
  return out;
}

TreeDecomposition reroot(const TreeDecomposition& td, int new_root) {
  if (new_root < 0 || new_root >= td.size()) fail(Errc::invalid_input, "reroot: bad node id");
  TreeDecomposition out = td;
  // flip parent pointers along the path to the old root
  std::vector<int> path;
  for (int t = new_root; t != -1; t = td.nodes[t].parent) path.push_back(t);
  for (size_t i = 0; i + 1 < path.size(); i++) {
    int child = path[i], parent = path[i + 1];
    auto& pc = out.nodes[parent].children;
    pc.erase(std::remove(pc.begin(), pc.end(), child), pc.end());
    out.nodes[child].children.push_back(parent);
    out.nodes[parent].parent = child;
  }
  out.nodes[new_root].parent = -1;
  out.root = new_root;
  return out;
}

TreeDecomposition substitute_bags(const TreeDecomposition& td,
                                  const std::vector<std::vector<int>>& map) {
  TreeDecomposition out = td;
  for (auto& nd : out.nodes) {
    std::vector<int> bag;
    for (int v : nd.bag) {
      if (v >= 0 && v < (int)map.size())
        bag.insert(bag.end(), map[v].begin(), map[v].end());
      else
        bag.push_back(v);
    }
    std::sort(bag.begin(), bag.end());
    bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
    nd.bag = std::move(bag);
  }
  return out;
}

// ---- PACE format ----

TreeDecomposition parse_td(std::istream& in) {
  TreeDecomposition td;
  std::string line;
  int nb = -1;
  std::vector<std::vector<int>> bags;
  std::vector<std::pair<int, int>> tree_edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    std::istringstream ls(line);
    std::string w;
    if (!(ls >> w) || w == "c") continue;
    if (w == "s") {
      std::string td_word;
      int maxbag, nvert;
      if (!(ls >> td_word >> nb >> maxbag >> nvert) || td_word != "td")
        fail(Errc::parse, "td line " + std::to_string(lineno) + ": bad header");
      bags.assign(nb, {});
    } else if (w == "b") {
      int id;
      if (!(ls >> id) || nb < 0 || id < 1 || id > nb)
        fail(Errc::parse, "td line " + std::to_string(lineno) + ": bad bag id");
      int v;
      while (ls >> v) bags[id - 1].push_back(v - 1);
    } else {
      int a = 0, b = 0;
      std::istringstream es(line);
      if (!(es >> a >> b) || nb < 0 || a < 1 || a > nb || b < 1 || b > nb)
        fail(Errc::parse, "td line " + std::to_string(lineno) + ": bad edge");
      tree_edges.emplace_back(a - 1, b - 1);
    }
  }
  if (nb < 0) fail(Errc::parse, "td: missing header");
  td.nodes.resize(nb);
  for (int i = 0; i < nb; i++) {
    td.nodes[i].bag = bags[i];
    std::sort(td.nodes[i].bag.begin(), td.nodes[i].bag.end());
    td.nodes[i].bag.erase(std::unique(td.nodes[i].bag.begin(), td.nodes[i].bag.end()),
                          td.nodes[i].bag.end());
  }
  // orient from node 0
  std::vector<std::vector<int>> adj(nb);
  for (auto [a, b] : tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  td.root = 0;
  std::vector<char> seen(nb, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int cnt = 0;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    cnt++;
    for (int u : adj[t])
      if (!seen[u]) {
        seen[u] = 1;
        td.nodes[u].parent = t;
        td.nodes[t].children.push_back(u);
        stack.push_back(u);
      }
  }
  if (cnt != nb) fail(Errc::parse, "td: bag tree not connected");
  return td;
}

TreeDecomposition load_td(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open td file: " + path);
  return parse_td(in);
}

void write_td(std::ostream& out, const TreeDecomposition& td, int n_vertices) {
  int maxbag = 0;
  for (const auto& nd : td.nodes) maxbag = std::max(maxbag, (int)nd.bag.size());
  out << "s td " << td.size() << ' ' << maxbag << ' ' << n_vertices << "\n";
  for (int i = 0; i < td.size(); i++) {
    out << "b " << i + 1;
    for (int v : td.nodes[i].bag) out << ' ' << v + 1;
    out << "\n";
  }
  for (int i = 0; i < td.size(); i++)
    for (int ch : td.nodes[i].children) out << i + 1 << ' ' << ch + 1 << "\n";
}

std::string td_to_string(const TreeDecomposition& td, int n_vertices) {
  std::ostringstream out;
  write_td(out, td, n_vertices);
  return out.str();
}

}  // namespace kc
