#include "tap/matching.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tap {

int WeightedGraph::add_vertex(NodeId tree_node) {
  node.push_back(tree_node);
  return vertex_count++;
}

int WeightedGraph::add_edge(int u, int v, long long w, LinkUse link) {
  if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count || u == v) {
    throw Error("bad edge endpoints");
  }
  edges.push_back(WeightedEdge{u, v, w, link});
  return static_cast<int>(edges.size()) - 1;
}

EdgeCoverResult min_weight_edge_cover(const WeightedGraph& graph) {
  const int n = graph.vertex_count;
  std::vector<int> cheapest(n, -1);
  for (int k = 0; k < static_cast<int>(graph.edges.size()); ++k) {
    const WeightedEdge& e = graph.edges[k];
    for (int x : {e.u, e.v}) {
      if (cheapest[x] == -1 || e.w < graph.edges[cheapest[x]].w) cheapest[x] = k;
    }
  }
  std::vector<long long> c(n, 0);
  for (int v = 0; v < n; ++v) {
    if (v == graph.aux) continue;
    if (cheapest[v] == -1) {
      NodeId t = v < static_cast<int>(graph.node.size()) ? graph.node[v] : kNoNode;
      throw InfeasibleError("vertex " + std::to_string(v) +
                            (t != kNoNode ? " (node " + std::to_string(t) + ")" : "") +
                            " has no incident edge");
    }
    c[v] = graph.edges[cheapest[v]].w;
  }
  WeightedGraph gains;
  gains.vertex_count = n;
  std::vector<int> back;
  for (int k = 0; k < static_cast<int>(graph.edges.size()); ++k) {
    const WeightedEdge& e = graph.edges[k];
    long long g = c[e.u] + c[e.v] - e.w;
    if (g > 0) {
      gains.edges.push_back(WeightedEdge{e.u, e.v, g, {}});
      back.push_back(k);
    }
  }
  MatchingResult mm = max_weight_matching(gains);
  EdgeCoverResult r;
  std::vector<bool> covered(n, false);
  for (int gk : mm.edges) {
    int k = back[gk];
    const WeightedEdge& e = graph.edges[k];
    r.edges.push_back(k);
    covered[e.u] = covered[e.v] = true;
    if (e.u != graph.aux && e.v != graph.aux) r.matched.push_back(k);
  }
  for (int v = 0; v < n; ++v) {
    if (v == graph.aux || covered[v]) continue;
    r.edges.push_back(cheapest[v]);
    const WeightedEdge& e = graph.edges[cheapest[v]];
    covered[e.u] = covered[e.v] = true;
  }
  std::sort(r.edges.begin(), r.edges.end());
  r.edges.erase(std::unique(r.edges.begin(), r.edges.end()), r.edges.end());
  for (int k : r.edges) r.weight += graph.edges[k].w;
  std::sort(r.matched.begin(), r.matched.end());
  std::vector<bool> in_matching(n, false);
  for (int k : r.matched) {
    in_matching[graph.edges[k].u] = in_matching[graph.edges[k].v] = true;
  }
  for (int v = 0; v < n; ++v)
    if (v != graph.aux && !in_matching[v]) r.unmatched.push_back(v);
  if (!graph.node.empty()) {
    for (int k : r.matched) r.pairs.push_back(graph.edges[k].link);
    for (int v : r.unmatched) r.unmatched_nodes.push_back(graph.node[v]);
  }
  return r;
}

WeightedGraph leaf_cover_graph(const TreeView& view, const GoldenTicketMap& gt) {
  WeightedGraph g;
  const Instance& base = view.base();
  for (NodeId leaf : view.leaves()) g.add_vertex(leaf);
  g.aux = g.add_vertex(kNoNode);
  // x_L edges first so that ties in the cover prefer them.
  for (NodeId leaf : view.leaves()) {
    const auto& inc = view.incident(leaf);
    if (inc.empty()) continue;
    LinkId best = kNoLink;
    for (int idx : inc) best = best == kNoLink ? view.links()[idx].id : std::min(best, view.links()[idx].id);
    const Link& l = base.link(best);
    g.add_edge(view.leaf_index(leaf), g.aux, 3, LinkUse{best, l.u, l.v});
  }
  std::map<std::pair<NodeId, NodeId>, LinkId> cheapest;
  for (const CurrentLink& cl : view.links()) {
    if (!view.is_leaf(cl.u) || !view.is_leaf(cl.v)) continue;
    // A usable matching stays off compound leaves; they use their x_L edge.
    if (view.is_compound(cl.u) || view.is_compound(cl.v)) continue;
    auto key = std::minmax(cl.u, cl.v);
    auto [it, fresh] = cheapest.emplace(key, cl.id);
    if (!fresh) {
      LinkId old = it->second;
      if (gt.weight3(cl.id) < gt.weight3(old) ||
          (gt.weight3(cl.id) == gt.weight3(old) && cl.id < old)) {
        it->second = cl.id;
      }
    }
  }
  for (auto [key, id] : cheapest) {
    const Link& l = base.link(id);
    g.add_edge(view.leaf_index(key.first), view.leaf_index(key.second), gt.weight3(id),
               LinkUse{id, l.u, l.v});
  }
  return g;
}

namespace {

// Links from leaves outside T_s into T_s, as shadows ending at s. One per
// leaf, smallest link id.
std::vector<std::pair<NodeId, LinkUse>> stem_reach(const TreeView& view, NodeId s) {
  const ContractionState& state = view.state();
  std::map<NodeId, LinkUse> best;
  for (NodeId y : view.subtree(s)) {
    for (int idx : view.incident(y)) {
      const CurrentLink& cl = view.links()[idx];
      NodeId c = cl.other(y);
      if (!view.is_leaf(c) || view.in_subtree(s, c) || view.is_compound(c)) continue;
      const Link& l = view.base().link(cl.id);
      NodeId c_end = state.rep(l.u) == c ? l.u : l.v;
      auto it = best.find(c);
      if (it == best.end() || cl.id < it->second.origin) best[c] = LinkUse{cl.id, c_end, s};
    }
  }
  return {best.begin(), best.end()};
}

// Nodes that are leaves of T/uses but not current leaves.
std::vector<NodeId> new_leaves_after(const TreeView& view, const std::vector<LinkUse>& uses,
                                     ContractionState* out = nullptr) {
  ContractionState scratch = view.state();
  for (const LinkUse& u : uses) scratch.contract(u);
  std::vector<NodeId> fresh;
  for (NodeId x : scratch.current_leaves())
    if (!view.is_leaf(x)) fresh.push_back(x);
  if (out) *out = std::move(scratch);
  return fresh;
}

// Everything below the root became one leaf: the root case, not a new leaf.
bool closes_into_root(const ContractionState& after, const std::vector<NodeId>& fresh) {
  if (fresh.size() != 1) return false;
  const NodeId root = after.rep(after.root());
  return after.parent(fresh[0]) == root && after.children(root).size() == 1;
}

bool is_pair(const TreeView& view, const LinkUse& use) {
  const ContractionState& st = view.state();
  return view.is_leaf(st.rep(use.u)) && view.is_leaf(st.rep(use.v));
}

std::optional<ExtraCreditProposal> pattern_proposal(const TreeView& view,
                                                    const std::vector<LinkUse>& pairs,
                                                    const std::vector<NodeId>& unmatched,
                                                    const GoldenTicketMap& gt, const LinkUse& ab,
                                                    NodeId w) {
  const ContractionState& state = view.state();
  if (!view.is_node(w) || !view.in_subtree(w, state.rep(ab.u))) return std::nullopt;
  ContractionState scratch = state;
  scratch.contract(ab);
  TreeView sview(scratch);
  std::vector<LinkUse> b{ab};
  std::unordered_set<std::uint64_t> seen{pair_key(ab.u, ab.v)};
  for (NodeId leaf : sview.leaves_in(w)) {
    LinkId id;
    try {
      id = up_link(sview, leaf);
    } catch (const InfeasibleError&) {
      return std::nullopt;
    }
    const Link& l = view.base().link(id);
    bool u_in = view.in_subtree(w, state.rep(l.u));
    bool v_in = view.in_subtree(w, state.rep(l.v));
    LinkUse use{id, l.u, l.v};
    if (!u_in) use = LinkUse{id, l.v, w};
    if (!v_in) use = LinkUse{id, l.u, w};
    if (use.u == use.v) continue;
    if (seen.insert(pair_key(use.u, use.v)).second) b.push_back(use);
  }
  if (!covers_subtree(view, w, b)) return std::nullopt;
  int credit = 0;
  for (const LinkUse& p : pairs) {
    if (view.in_subtree(w, state.rep(p.u)) && view.in_subtree(w, state.rep(p.v)))
      credit += gt.weight3(p.origin);
  }
  for (NodeId x : unmatched)
    if (view.in_subtree(w, x)) credit += 3;
  int cost = 3 * static_cast<int>(b.size());
  if (cost + 3 > credit) return std::nullopt;
  return ExtraCreditProposal{w, b, credit, cost, std::string("pattern ") + to_string(gt.pattern[ab.origin])};
}

}  // namespace

UsableMatching stem_matching(const TreeView& view, const EdgeCoverResult& cover,
                             const GoldenTicketMap& gt, const std::vector<StemRecord>& stems) {
  const ContractionState& state = view.state();
  UsableMatching out;
  out.weight_before = cover.weight;
  out.weight_after = cover.weight;

  // Pattern trees with enough credit are contracted right away.
  std::unordered_set<NodeId> proposed_roots;
  for (const LinkUse& p : cover.pairs) {
    if (gt.value(p.origin) != 2) continue;
    NodeId w = gt.witness[p.origin];
    if (w == kNoNode || proposed_roots.count(w)) continue;
    if (auto prop = pattern_proposal(view, cover.pairs, cover.unmatched_nodes, gt, p, w)) {
      proposed_roots.insert(w);
      out.proposals.push_back(std::move(*prop));
    }
  }
  if (!out.proposals.empty()) {
    out.matching = cover.pairs;
    out.usable = is_usable(view, out.matching);
    return out;
  }

  // Pairs the node closed off at `top` with a leaf reaching into T_top. A free
  // leaf trades its x_L edge (3) for the shadow (3); a matched leaf also
  // leaves its partner on x_L. A strict pairing must reopen `top`; otherwise
  // a larger node may close, to be paired in turn as a 2-stem.
  std::unordered_set<LinkId> twin_ids;
  auto pair_with_leaf = [&](NodeId top, LinkId twin, bool strict) -> bool {
    std::unordered_map<NodeId, std::size_t> pair_at;
    std::unordered_set<NodeId> used;
    for (std::size_t i = 0; i < out.matching.size(); ++i) {
      const LinkUse& u = out.matching[i];
      NodeId a = state.rep(u.u), b = state.rep(u.v);
      if (view.is_leaf(a) && view.is_leaf(b)) {
        pair_at[a] = pair_at[b] = i;
      } else {
        used.insert(view.is_leaf(a) ? a : b);
      }
    }
    const std::size_t before = new_leaves_after(view, out.matching).size();
    auto reach = stem_reach(view, top);
    for (int pass = 0; pass < 2; ++pass) {
      for (auto& [c, use] : reach) {
        if (used.count(c)) continue;
        auto it = pair_at.find(c);
        const bool matched = it != pair_at.end();
        if (matched != (pass == 1)) continue;
        if (matched && twin_ids.count(out.matching[it->second].origin)) continue;
        std::vector<LinkUse> trial = out.matching;
        if (matched) trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(it->second));
        trial.push_back(use);
        ContractionState after = state;
        std::vector<NodeId> fresh = new_leaves_after(view, trial, &after);
        if (strict && !closes_into_root(after, fresh)) {
          if (fresh.size() >= before && before > 0) continue;
          if (std::find(fresh.begin(), fresh.end(), after.rep(top)) != fresh.end()) continue;
        }
        if (matched) out.weight_after += 6 - gt.weight3(out.matching[it->second].origin);
        out.matching = std::move(trial);
        out.stem_pairs.push_back(StemPair{top, c, twin, use});
        return true;
      }
    }
    return false;
  };

  std::unordered_map<LinkId, NodeId> stem_of;
  for (const StemRecord& r : stems)
    if (!view.is_compound(r.stem)) stem_of.emplace(r.twin, r.stem);
  std::vector<LinkUse> twins;
  std::vector<LinkUse> plain;
  for (const LinkUse& p : cover.pairs) (stem_of.count(p.origin) ? twins : plain).push_back(p);
  for (const LinkUse& t : twins) twin_ids.insert(t.origin);

  if (!twins.empty()) {
    // Joint re-solve: each activated twin ab becomes one vertex s~ that only
    // connects, at weight 3, to leaves reaching into T_s.
    WeightedGraph base_graph = leaf_cover_graph(view, gt);
    std::unordered_set<NodeId> removed;
    for (const LinkUse& t : twins) {
      removed.insert(state.rep(t.u));
      removed.insert(state.rep(t.v));
    }
    WeightedGraph g;
    std::vector<int> remap(base_graph.vertex_count, -1);
    for (int x = 0; x < base_graph.vertex_count; ++x) {
      if (x == base_graph.aux) continue;
      if (removed.count(base_graph.node[x])) continue;
      remap[x] = g.add_vertex(base_graph.node[x]);
    }
    g.aux = g.add_vertex(kNoNode);
    remap[base_graph.aux] = g.aux;
    for (const WeightedEdge& e : base_graph.edges) {
      if (remap[e.u] < 0 || remap[e.v] < 0) continue;
      g.add_edge(remap[e.u], remap[e.v], e.w, e.link);
    }
    std::vector<int> stem_vertex;
    std::unordered_map<NodeId, int> leaf_vertex;
    for (int x = 0; x < g.vertex_count; ++x)
      if (x != g.aux) leaf_vertex[g.node[x]] = x;
    long long twin_weight = 0;
    for (const LinkUse& t : twins) {
      NodeId s = stem_of.at(t.origin);
      int sv = g.add_vertex(s);
      stem_vertex.push_back(sv);
      twin_weight += gt.weight3(t.origin);
      for (auto& [c, use] : stem_reach(view, s)) {
        auto it = leaf_vertex.find(c);
        if (it != leaf_vertex.end()) g.add_edge(sv, it->second, 3, use);
      }
    }
    // Once every activated twin is contracted, a link from one twin's leaf
    // into another stem's subtree joins two new leaves.
    std::unordered_map<NodeId, int> twin_end;
    for (std::size_t i = 0; i < twins.size(); ++i) {
      twin_end[state.rep(twins[i].u)] = stem_vertex[i];
      twin_end[state.rep(twins[i].v)] = stem_vertex[i];
    }
    std::set<std::pair<int, int>> linked;
    for (std::size_t i = 0; i < twins.size(); ++i) {
      const int sv = stem_vertex[i];
      for (auto& [c, use] : stem_reach(view, g.node[sv])) {
        auto it = twin_end.find(c);
        if (it == twin_end.end() || it->second == sv) continue;
        if (!linked.insert(std::minmax(it->second, sv)).second) continue;
        g.add_edge(it->second, sv, 3, LinkUse{use.origin, g.node[it->second], g.node[sv]});
      }
    }
    bool accepted = false;
    try {
      // Ties go against extra edges at a stem, which would break deg = 1.
      WeightedGraph scaled = g;
      std::vector<bool> is_stem(g.vertex_count, false);
      for (int sv : stem_vertex) is_stem[sv] = true;
      for (WeightedEdge& e : scaled.edges) e.w = 8 * e.w + (is_stem[e.u] || is_stem[e.v] ? 1 : 0);
      EdgeCoverResult joint = min_weight_edge_cover(scaled);
      joint.weight = 0;
      for (int k : joint.edges) joint.weight += g.edges[k].w;
      std::vector<int> degree(g.vertex_count, 0);
      std::vector<bool> matched_vertex(g.vertex_count, false);
      for (int k : joint.edges) {
        ++degree[g.edges[k].u];
        ++degree[g.edges[k].v];
      }
      for (int k : joint.matched) matched_vertex[g.edges[k].u] = matched_vertex[g.edges[k].v] = true;
      // The weight may rise; callers record that against the no-increase claim.
      bool ok = true;
      for (int sv : stem_vertex) ok = ok && degree[sv] == 1 && matched_vertex[sv];
      if (ok) {
        accepted = true;
        out.joint_resolve = true;
        out.weight_after = joint.weight + twin_weight;
        std::unordered_map<NodeId, LinkId> twin_at;
        for (const LinkUse& t : twins) twin_at[stem_of.at(t.origin)] = t.origin;
        for (int k : joint.matched) {
          const WeightedEdge& e = g.edges[k];
          bool su = std::find(stem_vertex.begin(), stem_vertex.end(), e.u) != stem_vertex.end();
          bool sv = std::find(stem_vertex.begin(), stem_vertex.end(), e.v) != stem_vertex.end();
          if (su && sv) {
            out.stem_pairs.push_back(StemPair{g.node[e.v], g.node[e.u], twin_at[g.node[e.v]], e.link});
          } else if (su || sv) {
            NodeId s = su ? g.node[e.u] : g.node[e.v];
            NodeId c = su ? g.node[e.v] : g.node[e.u];
            out.stem_pairs.push_back(StemPair{s, c, twin_at[s], e.link});
          } else {
            out.matching.push_back(e.link);
          }
        }
        for (const LinkUse& t : twins) out.matching.push_back(t);
        for (const StemPair& sp : out.stem_pairs) out.matching.push_back(sp.use);
      }
    } catch (const InfeasibleError&) {
    }

    if (!accepted) {
      out.matching = plain;
      for (const LinkUse& t : twins) out.matching.push_back(t);
      for (const LinkUse& t : twins) {
        const NodeId s = stem_of.at(t.origin);
        if (!pair_with_leaf(s, t.origin, true) && !pair_with_leaf(s, t.origin, false))
          out.unresolved_twins.push_back(t.origin);
      }
    }
  } else {
    out.matching = cover.pairs;
  }

  // 2-stems: pairs that only together close off a node. The new leaf is
  // paired like an activated stem.
  {
    std::unordered_set<NodeId> stuck;
    for (;;) {
      ContractionState after = state;
      std::vector<NodeId> fresh = new_leaves_after(view, out.matching, &after);
      if (closes_into_root(after, fresh)) break;
      fresh.erase(std::remove_if(fresh.begin(), fresh.end(), [&](NodeId z) { return stuck.count(z) > 0; }),
                  fresh.end());
      if (fresh.empty()) break;
      const NodeId z = fresh.front();
      NodeId top = kNoNode;
      for (NodeId y : view.nodes())
        if (after.rep(y) == z && (top == kNoNode || view.depth(y) < view.depth(top))) top = y;
      if (!pair_with_leaf(top, kNoLink, true)) {
        stuck.insert(z);
        out.unresolved_stems.push_back(top);
      }
    }
  }

  // Merged path components: units are plain pairs and twin-with-stem-pair
  // groups. Two or more units collapsing together bank their surplus.
  ContractionState scratch = state;
  for (const LinkUse& u : out.matching) scratch.contract(u);
  std::map<NodeId, std::vector<LinkUse>> groups;
  for (const LinkUse& u : out.matching) groups[scratch.rep(u.u)].push_back(u);
  for (auto& [root, uses] : groups) {
    // A component at the root is the final contraction, not a banked one.
    if (root == view.root()) continue;
    int units = 0;
    int credit = 0;
    for (const LinkUse& u : uses) {
      if (is_pair(view, u)) {
        ++units;
        credit += gt.weight3(u.origin);
      } else {
        credit += 3;
      }
    }
    int cost = 3 * static_cast<int>(uses.size());
    if (units >= 2 && credit - cost >= 3) {
      out.proposals.push_back(ExtraCreditProposal{root, uses, credit, cost, "merged paths"});
    }
  }
  out.usable = is_usable(view, out.matching);
  return out;
}

bool is_usable(const TreeView& view, const std::vector<LinkUse>& matching) {
  const ContractionState& state = view.state();
  for (const LinkUse& u : matching) {
    if (view.is_compound(state.rep(u.u)) || view.is_compound(state.rep(u.v))) return false;
  }
  return new_leaves_after(view, matching).empty();
}

}  // namespace tap
