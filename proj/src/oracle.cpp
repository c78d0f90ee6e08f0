#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "tap/solver.hpp"

namespace tap {

const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::optimal: return "optimal";
    case OracleStatus::infeasible: return "infeasible";
    case OracleStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct EdgeIndex {
  std::vector<int> of_child;  // node -> edge index, -1 for the root
  std::vector<bool> leaf_edge;
  int count = 0;
  int words = 0;

  explicit EdgeIndex(const RootedTree& t) {
    of_child.assign(t.size(), -1);
    for (NodeId x : t.preorder()) {
      if (x == t.root()) continue;
      of_child[x] = count++;
      leaf_edge.push_back(t.is_leaf(x));
    }
    words = (count + 63) / 64;
  }
};

struct Candidate {
  LinkId id = kNoLink;
  std::vector<NodeId> path;
  Bits bits;
};

void set_bit(Bits& b, int i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }
bool test_bit(const Bits& b, int i) { return b[i >> 6] >> (i & 63) & 1; }
bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

int path_edge(const RootedTree& t, const EdgeIndex& ex, NodeId x, NodeId y) {
  return ex.of_child[t.depth(x) > t.depth(y) ? x : y];
}

// Candidate links after deduplication (and shadow pruning when asked).
std::vector<Candidate> candidates(const Instance& inst, const EdgeIndex& ex, bool prune) {
  const RootedTree& t = inst.tree();
  std::vector<Candidate> all;
  for (const Link& l : inst.links()) {
    Candidate c;
    c.id = l.id;
    c.path = t.path(l.u, l.v);
    c.bits.assign(ex.words, 0);
    for (std::size_t i = 0; i + 1 < c.path.size(); ++i)
      set_bit(c.bits, path_edge(t, ex, c.path[i], c.path[i + 1]));
    all.push_back(std::move(c));
  }
  std::map<Bits, int> first;
  std::vector<Candidate> unique;
  for (auto& c : all) {
    if (first.emplace(c.bits, c.id).second) unique.push_back(std::move(c));
  }
  if (!prune) return unique;
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    bool inside = false;
    for (std::size_t j = 0; j < unique.size() && !inside; ++j)
      if (i != j && subset_of(unique[i].bits, unique[j].bits)) inside = true;
    if (!inside) out.push_back(unique[i]);
  }
  return out;
}

class Search {
 public:
  Search(const EdgeIndex& ex, const std::vector<Candidate>& cands, long long budget)
      : ex_(ex), cands_(cands), budget_(budget) {
    by_edge_.assign(ex.count, {});
    for (int i = 0; i < static_cast<int>(cands.size()); ++i)
      for (int e = 0; e < ex.count; ++e)
        if (test_bit(cands[i].bits, e)) by_edge_[e].push_back(i);
  }

  bool coverable() const {
    return std::none_of(by_edge_.begin(), by_edge_.end(), [](const auto& v) { return v.empty(); });
  }

  // Smallest cover size, or -1 when the node budget ran out.
  int minimum(std::vector<int>& chosen) {
    Bits covered(ex_.words, 0);
    for (int k = lower_bound(covered); k <= static_cast<int>(cands_.size()); ++k) {
      chosen.clear();
      if (dfs(covered, k, chosen)) return k;
      if (exhausted_) return -1;
    }
    return -1;
  }

  // Every cover of exactly k candidates, as sorted index lists.
  bool all_of_size(int k, std::set<std::vector<int>>& out, std::size_t limit) {
    Bits covered(ex_.words, 0);
    std::vector<int> chosen;
    enumerate(covered, k, chosen, out, limit);
    return !exhausted_;
  }

  long long nodes() const { return nodes_; }
  bool exhausted() const { return exhausted_; }

 private:
  int lower_bound(const Bits& covered) const {
    int open = 0;
    for (int e = 0; e < ex_.count; ++e)
      if (ex_.leaf_edge[e] && !test_bit(covered, e)) ++open;
    return (open + 1) / 2;
  }

  int pick_edge(const Bits& covered, bool first) const {
    int best = -1;
    for (int e = 0; e < ex_.count; ++e) {
      if (test_bit(covered, e)) continue;
      if (first) return e;
      if (best == -1 || by_edge_[e].size() < by_edge_[best].size()) best = e;
    }
    return best;
  }

  bool dfs(const Bits& covered, int left, std::vector<int>& chosen) {
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return false;
    }
    int e = pick_edge(covered, false);
    if (e == -1) return true;
    if (left == 0 || lower_bound(covered) > left) return false;
    for (int i : by_edge_[e]) {
      Bits next = covered;
      for (int w = 0; w < ex_.words; ++w) next[w] |= cands_[i].bits[w];
      chosen.push_back(i);
      if (dfs(next, left - 1, chosen)) return true;
      chosen.pop_back();
      if (exhausted_) return false;
    }
    return false;
  }

  void enumerate(const Bits& covered, int left, std::vector<int>& chosen,
                 std::set<std::vector<int>>& out, std::size_t limit) {
    if (exhausted_ || out.size() >= limit) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    int e = pick_edge(covered, true);
    if (e == -1) {
      if (left == 0) {
        std::vector<int> s = chosen;
        std::sort(s.begin(), s.end());
        out.insert(s);
      }
      return;
    }
    if (left == 0 || lower_bound(covered) > left) return;
    for (int i : by_edge_[e]) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      Bits next = covered;
      for (int w = 0; w < ex_.words; ++w) next[w] |= cands_[i].bits[w];
      chosen.push_back(i);
      enumerate(next, left - 1, chosen, out, limit);
      chosen.pop_back();
    }
  }

  const EdgeIndex& ex_;
  const std::vector<Candidate>& cands_;
  long long budget_;
  std::vector<std::vector<int>> by_edge_;
  long long nodes_ = 0;
  bool exhausted_ = false;
};

// Interval [lo, hi] of path positions: nodes path[lo..hi], edges lo..hi-1.
struct Interval {
  int lo = 0;
  int hi = 0;
};

std::vector<int> edge_counts(const RootedTree& t, const EdgeIndex& ex,
                             const std::vector<const Candidate*>& g,
                             const std::vector<Interval>& iv) {
  std::vector<int> count(ex.count, 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int p = iv[i].lo; p < iv[i].hi; ++p)
      ++count[path_edge(t, ex, g[i]->path[p], g[i]->path[p + 1])];
  return count;
}

std::vector<LinkUse> to_uses(const std::vector<const Candidate*>& g, const std::vector<Interval>& iv) {
  std::vector<LinkUse> f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    NodeId a = g[i]->path[iv[i].lo];
    NodeId b = g[i]->path[iv[i].hi];
    f.push_back(LinkUse{g[i]->id, std::min(a, b), std::max(a, b)});
  }
  std::sort(f.begin(), f.end(), [](const LinkUse& x, const LinkUse& y) {
    return std::pair{x.u, x.v} < std::pair{y.u, y.v};
  });
  return f;
}

// Shrinks link ends while the end edge stays covered by another link.
std::vector<LinkUse> shrink(const RootedTree& t, const EdgeIndex& ex,
                            const std::vector<const Candidate*>& g) {
  std::vector<Interval> iv;
  for (const Candidate* c : g) iv.push_back(Interval{0, static_cast<int>(c->path.size()) - 1});
  std::vector<int> count = edge_counts(t, ex, g, iv);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto& p = g[i]->path;
      while (iv[i].hi - iv[i].lo > 1) {
        int e = path_edge(t, ex, p[iv[i].lo], p[iv[i].lo + 1]);
        if (count[e] < 2) break;
        --count[e];
        ++iv[i].lo;
        changed = true;
      }
      while (iv[i].hi - iv[i].lo > 1) {
        int e = path_edge(t, ex, p[iv[i].hi - 1], p[iv[i].hi]);
        if (count[e] < 2) break;
        --count[e];
        --iv[i].hi;
        changed = true;
      }
    }
  }
  return to_uses(g, iv);
}

}  // namespace

std::vector<int> degrees(const Instance& instance, const std::vector<LinkUse>& f) {
  std::vector<int> deg(instance.node_count(), 0);
  for (const LinkUse& u : f) {
    ++deg[u.u];
    ++deg[u.v];
  }
  return deg;
}

OracleResult exact_opt(const Instance& instance, const OracleOptions& options) {
  OracleResult r;
  const RootedTree& t = instance.tree();
  EdgeIndex ex(t);
  if (ex.count == 0) {
    r.status = OracleStatus::optimal;
    r.value = 0;
    r.degree.assign(instance.node_count(), 0);
    return r;
  }
  std::vector<Candidate> cands = candidates(instance, ex, options.prune_shadows);
  r.candidate_links = static_cast<int>(cands.size());
  Search search(ex, cands, options.node_budget);
  if (!search.coverable()) {
    r.status = OracleStatus::infeasible;
    return r;
  }
  if (r.candidate_links > options.max_links) {
    r.status = OracleStatus::budget_exceeded;
    return r;
  }
  std::vector<int> chosen;
  int k = search.minimum(chosen);
  r.nodes = search.nodes();
  if (k < 0) {
    r.status = OracleStatus::budget_exceeded;
    return r;
  }
  r.status = OracleStatus::optimal;
  r.value = k;
  std::vector<const Candidate*> g;
  for (int i : chosen) {
    g.push_back(&cands[i]);
    r.solution.links.push_back(cands[i].id);
  }
  std::sort(r.solution.links.begin(), r.solution.links.end());
  r.shadow_minimal = shrink(t, ex, g);
  r.degree = degrees(instance, r.shadow_minimal);
  return r;
}

OptimaList enumerate_shadow_minimal_optima(const Instance& instance, int limit,
                                           const OracleOptions& options) {
  OptimaList out;
  OracleResult best = exact_opt(instance, options);
  out.status = best.status;
  out.value = best.value;
  if (best.status != OracleStatus::optimal) return out;
  if (best.value == 0) {
    out.optima.push_back({});
    return out;
  }
  const RootedTree& t = instance.tree();
  EdgeIndex ex(t);
  std::vector<Candidate> cands = candidates(instance, ex, true);
  Search search(ex, cands, options.node_budget);
  std::set<std::vector<int>> covers;
  const std::size_t cover_limit = 100000;
  if (!search.all_of_size(best.value, covers, cover_limit) || covers.size() >= cover_limit) {
    out.truncated = true;
  }

  std::set<std::vector<std::pair<NodeId, NodeId>>> seen;
  long long budget = options.node_budget;
  for (const auto& idx : covers) {
    std::vector<const Candidate*> g;
    for (int i : idx) g.push_back(&cands[i]);
    // Edges covered by exactly one link of g must stay in that link.
    std::vector<Interval> full;
    for (const Candidate* c : g) full.push_back(Interval{0, static_cast<int>(c->path.size()) - 1});
    std::vector<int> count = edge_counts(t, ex, g, full);
    std::vector<Interval> forced;
    bool redundant = false;
    for (const Candidate* c : g) {
      int lo = -1;
      int hi = -1;
      for (int p = 0; p + 1 < static_cast<int>(c->path.size()); ++p) {
        if (count[path_edge(t, ex, c->path[p], c->path[p + 1])] == 1) {
          if (lo == -1) lo = p;
          hi = p + 1;
        }
      }
      if (lo == -1) redundant = true;
      forced.push_back(Interval{lo, hi});
    }
    if (redundant) continue;
    std::vector<Interval> iv(g.size());
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (out.truncated && static_cast<int>(out.optima.size()) >= limit) return;
      if (--budget < 0) {
        out.truncated = true;
        return;
      }
      if (i == g.size()) {
        std::vector<int> cnt = edge_counts(t, ex, g, iv);
        for (int c : cnt)
          if (c == 0) return;
        for (std::size_t j = 0; j < g.size(); ++j) {
          auto& p = g[j]->path;
          if (cnt[path_edge(t, ex, p[iv[j].lo], p[iv[j].lo + 1])] != 1) return;
          if (cnt[path_edge(t, ex, p[iv[j].hi - 1], p[iv[j].hi])] != 1) return;
        }
        std::vector<LinkUse> f = to_uses(g, iv);
        std::vector<std::pair<NodeId, NodeId>> key;
        for (const LinkUse& u : f) key.emplace_back(u.u, u.v);
        if (seen.insert(key).second) {
          if (static_cast<int>(out.optima.size()) >= limit) {
            out.truncated = true;
            return;
          }
          out.optima.push_back(std::move(f));
        }
        return;
      }
      for (int lo = 0; lo <= forced[i].lo; ++lo) {
        for (int hi = forced[i].hi; hi < static_cast<int>(g[i]->path.size()); ++hi) {
          iv[i] = Interval{lo, hi};
          self(self, i + 1);
        }
      }
    };
    rec(rec, 0);
    if (out.truncated && static_cast<int>(out.optima.size()) >= limit) break;
  }
  return out;
}

std::optional<std::vector<LinkUse>> exact_subcover(const TreeView& view, NodeId v, int link_budget) {
  const ContractionState& state = view.state();
  auto nodes = view.subtree(v);
  std::unordered_map<NodeId, int> local;
  for (NodeId x : nodes) local.emplace(x, static_cast<int>(local.size()));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId x : nodes)
    if (x != v) edges.emplace_back(local[view.parent(x)], local[x]);
  RootedTree tree = RootedTree::from_edges(static_cast<int>(nodes.size()), 0, edges);
  std::vector<Link> links;
  std::vector<LinkUse> uses;
  std::set<std::pair<int, int>> pairs;
  for (NodeId x : nodes) {
    for (int idx : view.incident(x)) {
      const CurrentLink& cl = view.links()[idx];
      const Link& l = view.base().link(cl.id);
      NodeId y = cl.other(x);
      LinkUse use;
      int a = local[x];
      int b;
      if (view.in_subtree(v, y)) {
        if (x > y) continue;  // seen from the other end
        b = local[y];
        use = LinkUse{cl.id, l.u, l.v};
      } else {
        if (x == v) continue;
        b = 0;
        NodeId inside = state.rep(l.u) == x ? l.u : l.v;
        use = LinkUse{cl.id, inside, v};
      }
      if (!pairs.insert(std::minmax(a, b)).second) continue;
      links.push_back(Link{static_cast<LinkId>(links.size()), a, b, kNoLink});
      uses.push_back(use);
    }
  }
  Instance small(std::move(tree), std::move(links));
  OracleOptions opt;
  opt.max_links = link_budget;
  opt.node_budget = 2'000'000;
  OracleResult r = exact_opt(small, opt);
  if (r.status != OracleStatus::optimal) return std::nullopt;
  std::vector<LinkUse> out;
  for (LinkId id : r.solution.links) out.push_back(uses[id]);
  return out;
}

Solution baseline_two_approx(const Instance& instance) {
  const RootedTree& t = instance.tree();
  const int n = t.size();
  // Vertical pieces: bottom endpoint, top endpoint, original link.
  struct Piece {
    NodeId bottom;
    NodeId top;
    LinkId origin;
  };
  std::vector<std::vector<int>> at(n);
  std::vector<Piece> pieces;
  for (const Link& l : instance.links()) {
    NodeId x = t.lca(l.u, l.v);
    for (NodeId e : {l.u, l.v}) {
      if (e == x) continue;
      at[e].push_back(static_cast<int>(pieces.size()));
      pieces.push_back(Piece{e, x, l.id});
    }
  }
  // best[c]: piece with bottom in T_c reaching highest; ties by link id.
  std::vector<int> best(n, -1);
  auto better = [&](int a, int b) {
    if (b == -1) return true;
    if (t.depth(pieces[a].top) != t.depth(pieces[b].top))
      return t.depth(pieces[a].top) < t.depth(pieces[b].top);
    return pieces[a].origin < pieces[b].origin;
  };
  const auto& order = t.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId x = *it;
    for (int p : at[x])
      if (better(p, best[x])) best[x] = p;
    for (NodeId c : t.children(x))
      if (best[c] != -1 && better(best[c], best[x])) best[x] = best[c];
  }
  std::vector<NodeId> by_depth(order.begin(), order.end());
  std::stable_sort(by_depth.begin(), by_depth.end(),
                   [&](NodeId a, NodeId b) { return t.depth(a) > t.depth(b); });
  std::vector<bool> covered(n, false);
  std::set<LinkId> chosen;
  for (NodeId c : by_depth) {
    if (c == t.root() || covered[c]) continue;
    int p = best[c];
    if (p == -1 || t.depth(pieces[p].top) >= t.depth(c)) {
      throw InfeasibleError("edge above node " + std::to_string(c) + " cannot be covered");
    }
    chosen.insert(pieces[p].origin);
    for (NodeId x = pieces[p].bottom; x != pieces[p].top; x = t.parent(x)) covered[x] = true;
  }
  Solution s;
  s.links.assign(chosen.begin(), chosen.end());
  return s;
}

}  // namespace tap
