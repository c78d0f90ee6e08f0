#include "tap/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace tap {

ParseError::ParseError(int line, int column, const std::string& what)
    : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

RootedTree RootedTree::from_edges(int n, NodeId root,
                                  std::span<const std::pair<NodeId, NodeId>> parent_child) {
  if (n <= 0) throw Error("tree needs at least one node");
  if (root < 0 || root >= n) throw Error("root id out of range");
  if (static_cast<int>(parent_child.size()) > n - 1) throw Error("tree edges contain a cycle");
  if (static_cast<int>(parent_child.size()) < n - 1) throw Error("tree edges are disconnected");
  RootedTree t;
  t.root_ = root;
  t.parent_.assign(n, kNoNode);
  t.children_.assign(n, {});
  // Accept either orientation in the input and orient from the root.
  std::vector<std::vector<NodeId>> adj(n);
  for (auto [a, b] : parent_child) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw Error("edge endpoint out of range");
    if (a == b) throw Error("self-loop tree edge at node " + std::to_string(a));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  t.depth_.assign(n, -1);
  t.parent_[root] = root;
  t.depth_[root] = 0;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    t.preorder_.push_back(x);
    for (auto it = adj[x].rbegin(); it != adj[x].rend(); ++it) {
      NodeId y = *it;
      if (y == t.parent_[x] && x != root) continue;
      if (t.depth_[y] != -1) throw Error("tree edges contain a cycle");
      t.parent_[y] = x;
      t.depth_[y] = t.depth_[x] + 1;
      t.children_[x].push_back(y);
      stack.push_back(y);
    }
  }
  if (static_cast<int>(t.preorder_.size()) != n) throw Error("tree edges are disconnected");
  for (auto& ch : t.children_) std::sort(ch.begin(), ch.end());
  // Recompute preorder with sorted children so the ordering is canonical.
  t.preorder_.clear();
  t.tin_.assign(n, 0);
  t.tout_.assign(n, 0);
  int clock = 0;
  std::vector<std::pair<NodeId, std::size_t>> frames{{root, 0}};
  t.tin_[root] = clock++;
  t.preorder_.push_back(root);
  while (!frames.empty()) {
    auto& [x, i] = frames.back();
    if (i < t.children_[x].size()) {
      NodeId y = t.children_[x][i++];
      t.tin_[y] = clock++;
      t.preorder_.push_back(y);
      frames.emplace_back(y, 0);
    } else {
      t.tout_[x] = clock - 1;
      frames.pop_back();
    }
  }
  return t;
}

std::vector<NodeId> RootedTree::leaves() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v)
    if (is_leaf(v)) out.push_back(v);
  return out;
}

NodeId RootedTree::lca(NodeId u, NodeId v) const {
  while (depth_[u] > depth_[v]) u = parent_[u];
  while (depth_[v] > depth_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

std::vector<NodeId> RootedTree::path(NodeId u, NodeId v) const {
  std::vector<NodeId> up;
  std::vector<NodeId> down;
  while (depth_[u] > depth_[v]) {
    up.push_back(u);
    u = parent_[u];
  }
  while (depth_[v] > depth_[u]) {
    down.push_back(v);
    v = parent_[v];
  }
  while (u != v) {
    up.push_back(u);
    down.push_back(v);
    u = parent_[u];
    v = parent_[v];
  }
  up.push_back(u);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

Instance::Instance(RootedTree tree, std::vector<Link> links)
    : tree_(std::move(tree)), links_(std::move(links)) {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    Link& l = links_[i];
    l.id = static_cast<LinkId>(i);
    if (!tree_.valid(l.u) || !tree_.valid(l.v)) {
      throw Error("link " + std::to_string(i) + " has an unknown endpoint");
    }
    if (l.u == l.v) throw Error("self-loop link at node " + std::to_string(l.u));
    if (l.is_shadow() && (l.shadow_of < 0 || l.shadow_of >= static_cast<LinkId>(links_.size()))) {
      throw Error("shadow link " + std::to_string(i) + " has an unknown origin");
    }
    by_pair_.emplace(pair_key(l.u, l.v), l.id);
  }
}

std::vector<NodeId> Instance::link_path(LinkId id) const {
  const Link& l = link(id);
  return tree_.path(l.u, l.v);
}

std::optional<LinkId> Instance::find_link(NodeId u, NodeId v) const {
  auto it = by_pair_.find(pair_key(u, v));
  if (it == by_pair_.end()) return std::nullopt;
  return it->second;
}

LinkId Instance::original_of(LinkId id) const {
  while (links_.at(id).is_shadow()) id = links_[id].shadow_of;
  return id;
}

int Instance::original_link_count() const {
  return static_cast<int>(std::count_if(links_.begin(), links_.end(),
                                        [](const Link& l) { return !l.is_shadow(); }));
}

Instance build_instance(int n, NodeId root, std::span<const std::pair<NodeId, NodeId>> edges,
                        std::span<const std::pair<NodeId, NodeId>> links) {
  RootedTree tree = RootedTree::from_edges(n, root, edges);
  std::vector<Link> out;
  std::unordered_set<std::uint64_t> seen;
  for (auto [u, v] : links) {
    if (!tree.valid(u) || !tree.valid(v)) {
      throw Error("link (" + std::to_string(u) + "," + std::to_string(v) +
                  ") has an unknown endpoint");
    }
    if (u == v) throw Error("self-loop link at node " + std::to_string(u));
    if (!seen.insert(pair_key(u, v)).second) continue;
    out.push_back(Link{static_cast<LinkId>(out.size()), u, v, kNoLink});
  }
  return Instance(std::move(tree), std::move(out));
}

Instance build_instance(std::span<const std::pair<NodeId, NodeId>> edges, NodeId root,
                        std::span<const std::pair<NodeId, NodeId>> links) {
  NodeId hi = root;
  for (auto [a, b] : edges) hi = std::max({hi, a, b});
  return build_instance(hi + 1, root, edges, links);
}

Instance shadow_complete(const Instance& instance) {
  std::vector<Link> links(instance.links().begin(), instance.links().end());
  std::unordered_set<std::uint64_t> seen;
  for (const Link& l : links) seen.insert(pair_key(l.u, l.v));
  const int originals = instance.link_count();
  for (LinkId id = 0; id < originals; ++id) {
    if (instance.link(id).is_shadow()) continue;
    const auto path = instance.link_path(id);
    const int k = static_cast<int>(path.size());
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        if (i == 0 && j == k - 1) continue;
        if (!seen.insert(pair_key(path[i], path[j])).second) continue;
        links.push_back(Link{static_cast<LinkId>(links.size()), path[i], path[j], id});
      }
    }
  }
  return Instance(instance.tree(), std::move(links));
}

FeasibilityReport check_feasibility(const Instance& instance, const Solution& solution) {
  const RootedTree& t = instance.tree();
  FeasibilityReport rep;
  rep.witness.assign(t.size(), kNoLink);
  for (LinkId id : solution.links) {
    if (!instance.valid_link(id)) throw Error("invalid link id " + std::to_string(id));
    const Link& l = instance.link(id);
    NodeId top = t.lca(l.u, l.v);
    for (NodeId x : {l.u, l.v}) {
      for (; x != top; x = t.parent(x)) {
        if (rep.witness[x] == kNoLink) rep.witness[x] = id;
      }
    }
  }
  for (NodeId v = 0; v < t.size(); ++v) {
    if (v != t.root() && rep.witness[v] == kNoLink) rep.uncovered.push_back(v);
  }
  rep.feasible = rep.uncovered.empty();
  return rep;
}

bool is_feasible(const Instance& instance, const Solution& solution) {
  return check_feasibility(instance, solution).feasible;
}

bool instance_feasible(const Instance& instance) {
  Solution all;
  all.links.resize(instance.link_count());
  std::iota(all.links.begin(), all.links.end(), 0);
  return is_feasible(instance, all);
}

std::string serialize(const Instance& instance) {
  const RootedTree& t = instance.tree();
  std::ostringstream out;
  out << "tap 1\n";
  out << "nodes " << t.size() << " root " << t.root() << "\n";
  for (NodeId v : t.preorder()) {
    if (v != t.root()) out << "edge " << t.parent(v) << " " << v << "\n";
  }
  for (const Link& l : instance.links()) {
    if (l.is_shadow()) {
      out << "shadow " << l.u << " " << l.v << " " << l.shadow_of << "\n";
    } else {
      out << "link " << l.u << " " << l.v << "\n";
    }
  }
  return out.str();
}

namespace {

struct LineReader {
  std::string_view line;
  int line_no;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= line.size();
  }
  std::string_view word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (start == pos) throw ParseError(line_no, static_cast<int>(start) + 1, "unexpected end of line");
    return line.substr(start, pos - start);
  }
  void expect(std::string_view kw) {
    skip_ws();
    std::size_t col = pos;
    if (word() != kw) {
      throw ParseError(line_no, static_cast<int>(col) + 1, "expected '" + std::string(kw) + "'");
    }
  }
  int integer() {
    skip_ws();
    std::size_t col = pos;
    std::string_view w = word();
    int value = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      throw ParseError(line_no, static_cast<int>(col) + 1,
                       "expected an integer, got '" + std::string(w) + "'");
    }
    return value;
  }
  void finish() {
    skip_ws();
    if (pos < line.size()) {
      throw ParseError(line_no, static_cast<int>(pos) + 1, "trailing characters");
    }
  }
};

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    LineReader r{line, line_no};
    if (!r.at_end()) fn(r);
    if (end == text.size()) break;
    start = end + 1;
  }
}

}  // namespace

Instance parse_instance(std::string_view text) {
  bool header = false;
  int n = -1;
  NodeId root = kNoNode;
  int last_line = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Link> links;
  for_each_line(text, [&](LineReader& r) {
    last_line = r.line_no;
    std::size_t col = r.pos;
    std::string_view kw = r.word();
    if (!header) {
      if (kw != "tap") throw ParseError(r.line_no, static_cast<int>(col) + 1, "missing 'tap 1' header");
      if (r.integer() != 1) throw ParseError(r.line_no, 5, "unsupported format version");
      r.finish();
      header = true;
      return;
    }
    if (kw == "nodes") {
      if (n != -1) throw ParseError(r.line_no, static_cast<int>(col) + 1, "duplicate 'nodes' line");
      n = r.integer();
      r.expect("root");
      root = r.integer();
      if (n <= 0 || root < 0 || root >= n) {
        throw ParseError(r.line_no, 1, "bad node count or root");
      }
    } else if (n == -1) {
      throw ParseError(r.line_no, static_cast<int>(col) + 1, "'nodes' line must come first");
    } else if (kw == "edge") {
      NodeId p = r.integer();
      NodeId c = r.integer();
      edges.emplace_back(p, c);
    } else if (kw == "link") {
      NodeId u = r.integer();
      NodeId v = r.integer();
      links.push_back(Link{static_cast<LinkId>(links.size()), u, v, kNoLink});
    } else if (kw == "shadow") {
      NodeId u = r.integer();
      NodeId v = r.integer();
      LinkId origin = r.integer();
      links.push_back(Link{static_cast<LinkId>(links.size()), u, v, origin});
    } else {
      throw ParseError(r.line_no, static_cast<int>(col) + 1, "unknown keyword '" + std::string(kw) + "'");
    }
    r.finish();
  });
  if (!header) throw ParseError(1, 1, "missing 'tap 1' header");
  if (n == -1) throw ParseError(last_line + 1, 1, "missing 'nodes' line");
  RootedTree tree;
  try {
    tree = RootedTree::from_edges(n, root, edges);
  } catch (const Error& e) {
    throw ParseError(last_line, 1, e.what());
  }
  // Parent/child orientation in the file must agree with the root.
  for (auto [p, c] : edges) {
    if (tree.parent(c) != p) throw ParseError(last_line, 1, "edge orientation disagrees with root");
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<Link> kept;
  std::vector<LinkId> remap(links.size(), kNoLink);
  for (const Link& l : links) {
    if (!tree.valid(l.u) || !tree.valid(l.v)) throw ParseError(last_line, 1, "link endpoint out of range");
    if (l.u == l.v) throw ParseError(last_line, 1, "self-loop link");
    auto key = pair_key(l.u, l.v);
    if (!seen.insert(key).second) continue;
    remap[l.id] = static_cast<LinkId>(kept.size());
    kept.push_back(l);
  }
  for (Link& l : kept) {
    if (!l.is_shadow()) continue;
    if (l.shadow_of < 0 || l.shadow_of >= static_cast<LinkId>(links.size()) ||
        remap[l.shadow_of] == kNoLink) {
      throw ParseError(last_line, 1, "shadow origin out of range");
    }
    l.shadow_of = remap[l.shadow_of];
  }
  return Instance(std::move(tree), std::move(kept));
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

Instance canonicalize(const Instance& instance) {
  std::vector<LinkId> order(instance.link_count());
  std::iota(order.begin(), order.end(), 0);
  auto norm = [&](LinkId id) {
    const Link& l = instance.link(id);
    return std::tuple(l.is_shadow(), std::min(l.u, l.v), std::max(l.u, l.v));
  };
  std::sort(order.begin(), order.end(), [&](LinkId a, LinkId b) { return norm(a) < norm(b); });
  std::vector<LinkId> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<LinkId>(i);
  std::vector<Link> links;
  for (LinkId id : order) {
    Link l = instance.link(id);
    if (l.u > l.v) std::swap(l.u, l.v);
    if (l.is_shadow()) l.shadow_of = pos[l.shadow_of];
    links.push_back(l);
  }
  return Instance(instance.tree(), std::move(links));
}

std::string serialize_solution(const Instance& instance, const Solution& solution) {
  std::ostringstream out;
  std::vector<LinkId> ids = solution.links;
  std::sort(ids.begin(), ids.end());
  out << "sol " << ids.size() << "\n";
  for (LinkId id : ids) {
    const Link& l = instance.link(id);
    out << "use " << l.u << " " << l.v << "\n";
  }
  return out.str();
}

Solution parse_solution(const Instance& instance, std::string_view text) {
  Solution sol;
  int declared = -1;
  for_each_line(text, [&](LineReader& r) {
    std::size_t col = r.pos;
    std::string_view kw = r.word();
    if (kw == "sol") {
      if (declared != -1) throw ParseError(r.line_no, static_cast<int>(col) + 1, "duplicate 'sol' line");
      declared = r.integer();
    } else if (kw == "use") {
      if (declared == -1) throw ParseError(r.line_no, static_cast<int>(col) + 1, "'sol' line must come first");
      NodeId u = r.integer();
      NodeId v = r.integer();
      auto id = instance.find_link(u, v);
      if (!id) {
        throw ParseError(r.line_no, static_cast<int>(col) + 1,
                         "no link " + std::to_string(u) + "-" + std::to_string(v) + " in instance");
      }
      sol.links.push_back(*id);
    } else {
      throw ParseError(r.line_no, static_cast<int>(col) + 1, "unknown keyword '" + std::string(kw) + "'");
    }
    r.finish();
  });
  if (declared == -1) throw ParseError(1, 1, "missing 'sol' line");
  if (declared != static_cast<int>(sol.links.size())) {
    throw ParseError(1, 1, "declared " + std::to_string(declared) + " links, found " +
                               std::to_string(sol.links.size()));
  }
  return sol;
}

bool operator==(const Instance& a, const Instance& b) {
  if (a.node_count() != b.node_count() || a.link_count() != b.link_count()) return false;
  if (a.tree().root() != b.tree().root()) return false;
  for (NodeId v = 0; v < a.node_count(); ++v) {
    if (a.tree().parent(v) != b.tree().parent(v)) return false;
  }
  for (LinkId id = 0; id < a.link_count(); ++id) {
    const Link& x = a.link(id);
    const Link& y = b.link(id);
    if (pair_key(x.u, x.v) != pair_key(y.u, y.v) || x.shadow_of != y.shadow_of) return false;
  }
  return true;
}

}  // namespace tap
