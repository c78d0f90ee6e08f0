#include "tap/structure.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace tap {

const char* to_string(TicketPattern p) {
  switch (p) {
    case TicketPattern::none: return "none";
    case TicketPattern::twin: return "twin";
    case TicketPattern::A: return "A";
    case TicketPattern::B: return "B";
    case TicketPattern::C: return "C";
  }
  return "none";
}

std::vector<LinkId> GoldenTicketMap::ticketed() const {
  std::vector<LinkId> out;
  for (LinkId id = 0; id < static_cast<LinkId>(gt.size()); ++id)
    if (gt[id] > 0) out.push_back(id);
  return out;
}

bool is_node_closed(const TreeView& view, NodeId v, NodeId x) {
  if (!view.is_node(x) || !view.in_subtree(v, x)) {
    throw Error("node " + std::to_string(x) + " is not in T_" + std::to_string(v));
  }
  for (int idx : view.incident(x)) {
    if (!view.in_subtree(v, view.links()[idx].other(x))) return false;
  }
  return true;
}

namespace {

// Depth of the highest lca over the links of each leaf; the leaf's own depth
// when it has no links.
std::vector<int> up_depths(const TreeView& view) {
  std::vector<int> up(view.base().node_count(), 0);
  for (NodeId leaf : view.leaves()) {
    int best = view.depth(leaf);
    for (int idx : view.incident(leaf)) {
      best = std::min(best, view.depth(view.lca(leaf, view.links()[idx].other(leaf))));
    }
    up[leaf] = best;
  }
  return up;
}

}  // namespace

std::vector<bool> leaf_closed_flags(const TreeView& view) {
  const int n = view.base().node_count();
  std::vector<int> up = up_depths(view);
  std::vector<int> lowest(n, std::numeric_limits<int>::max());
  for (NodeId leaf : view.leaves()) lowest[leaf] = up[leaf];
  const auto& order = view.nodes();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId x = *it;
    if (x != view.root()) {
      NodeId p = view.parent(x);
      lowest[p] = std::min(lowest[p], lowest[x]);
    }
  }
  std::vector<bool> closed(n, false);
  for (NodeId x : order) closed[x] = lowest[x] >= view.depth(x);
  return closed;
}

NodeId minimally_leaf_closed(const TreeView& view) {
  const int n = view.base().node_count();
  std::vector<bool> closed = leaf_closed_flags(view);
  std::vector<bool> closed_below(n, false);
  const auto& order = view.nodes();
  NodeId best = kNoNode;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId x = *it;
    if (view.is_leaf(x)) continue;
    if (closed[x] && !closed_below[x]) {
      if (best == kNoNode || view.depth(x) > view.depth(best) ||
          (view.depth(x) == view.depth(best) && x < best)) {
        best = x;
      }
    }
    if (x != view.root() && (closed[x] || closed_below[x])) closed_below[view.parent(x)] = true;
  }
  return best == kNoNode ? view.root() : best;
}

LinkId up_link(const TreeView& view, NodeId a) {
  LinkId best = kNoLink;
  int best_depth = 0;
  for (int idx : view.incident(a)) {
    const CurrentLink& cl = view.links()[idx];
    int d = view.depth(view.lca(a, cl.other(a)));
    if (best == kNoLink || d < best_depth || (d == best_depth && cl.id < best)) {
      best = cl.id;
      best_depth = d;
    }
  }
  if (best == kNoLink) throw InfeasibleError("leaf " + std::to_string(a) + " has no links");
  return best;
}

NodeId up_node(const TreeView& view, NodeId a) {
  LinkId id = up_link(view, a);
  const CurrentLink& cl = view.links()[view.link_index(id)];
  return view.lca(a, cl.other(a));
}

std::vector<StemRecord> find_stems(const TreeView& view) {
  std::vector<StemRecord> out;
  auto chain_to = [&](NodeId x, NodeId s) {
    while (view.parent(x) != s) {
      x = view.parent(x);
      if (view.children(x).size() != 1) return false;
    }
    return true;
  };
  for (const CurrentLink& cl : view.links()) {
    if (!view.is_leaf(cl.u) || !view.is_leaf(cl.v)) continue;
    NodeId s = view.lca(cl.u, cl.v);
    if (s == view.root() || view.children(s).size() != 2) continue;
    if (chain_to(cl.u, s) && chain_to(cl.v, s)) out.push_back(StemRecord{s, cl.id, false});
  }
  std::sort(out.begin(), out.end(), [](const StemRecord& x, const StemRecord& y) {
    return x.stem != y.stem ? x.stem < y.stem : x.twin < y.twin;
  });
  return out;
}

GoldenTicketMap uniform_tickets(const Instance& instance, int value) {
  GoldenTicketMap g;
  g.gt.assign(instance.link_count(), value);
  g.witness.assign(instance.link_count(), kNoNode);
  g.pattern.assign(instance.link_count(), value > 0 ? TicketPattern::twin : TicketPattern::none);
  return g;
}

GoldenTicketMap golden_tickets(const TreeView& view, const std::vector<StemRecord>& stems) {
  const Instance& base = view.base();
  GoldenTicketMap g = uniform_tickets(base, 0);
  std::vector<int> up = up_depths(view);
  std::unordered_map<LinkId, NodeId> stem_of;
  for (const StemRecord& r : stems) stem_of.emplace(r.twin, r.stem);

  // Leaves with a link to another leaf other than the given pair.
  auto leaf_neighbours = [&](NodeId x) {
    std::vector<NodeId> out;
    for (int idx : view.incident(x)) {
      NodeId y = view.links()[idx].other(x);
      if (view.is_leaf(y)) out.push_back(y);
    }
    return out;
  };

  for (const CurrentLink& cl : view.links()) {
    NodeId a = cl.u;
    NodeId b = cl.v;
    if (!view.is_leaf(a) || !view.is_leaf(b)) continue;
    if (view.is_compound(a) || view.is_compound(b)) continue;
    bool twin = false;
    if (auto it = stem_of.find(cl.id); it != stem_of.end() && !view.is_compound(it->second)) {
      twin = true;
      g.gt[cl.id] = 1;
      g.witness[cl.id] = it->second;
      g.pattern[cl.id] = TicketPattern::twin;
    }

    // Grow T_v upward from lca(a,b), tracking leaves and compound internals.
    NodeId v = view.lca(a, b);
    NodeId prev = kNoNode;
    std::vector<NodeId> others;
    bool compound_inside = false;
    NodeId found = kNoNode;
    TicketPattern found_tag = TicketPattern::none;
    while (v != view.root()) {
      auto span = view.subtree(v);
      auto skip = prev == kNoNode ? std::span<const NodeId>{} : view.subtree(prev);
      for (std::size_t i = 0; i < span.size(); ++i) {
        if (!skip.empty() && span.data() + i == skip.data()) {
          i += skip.size() - 1;
          continue;
        }
        NodeId x = span[i];
        if (view.is_leaf(x)) {
          if (x != a && x != b) others.push_back(x);
        } else if (view.is_compound(x)) {
          compound_inside = true;
        }
      }
      const int leaf_count = static_cast<int>(others.size()) + 2;
      if (compound_inside || leaf_count > kPatternLeafCap) break;
      bool all_closed = std::all_of(others.begin(), others.end(),
                                    [&](NodeId c) { return up[c] >= view.depth(v); });
      if (all_closed && leaf_count == 3) {
        found = v;
        found_tag = twin ? TicketPattern::A : TicketPattern::B;
      } else if (all_closed && leaf_count >= 4 && twin) {
        std::unordered_set<NodeId> in_others(others.begin(), others.end());
        bool independent = true;
        for (NodeId c : others) {
          for (NodeId y : leaf_neighbours(c))
            if (in_others.count(y)) independent = false;
          if (!independent) break;
        }
        if (independent) {
          found = v;
          found_tag = TicketPattern::C;
        }
      }
      if (!twin && leaf_count > 3) break;
      prev = v;
      v = view.parent(v);
    }
    if (found != kNoNode) {
      g.gt[cl.id] = 2;
      g.witness[cl.id] = found;
      g.pattern[cl.id] = found_tag;
    }
  }

  // Relabel every witness to the largest witness containing it so that
  // distinct witness subtrees are disjoint.
  std::unordered_set<NodeId> roots;
  for (LinkId id = 0; id < base.link_count(); ++id)
    if (g.gt[id] > 0) roots.insert(g.witness[id]);
  std::unordered_map<NodeId, NodeId> top;
  for (NodeId w : roots) {
    NodeId best = w;
    for (NodeId x = w; x != view.root(); x = view.parent(x))
      if (roots.count(x)) best = x;
    top[w] = best;
  }
  for (LinkId id = 0; id < base.link_count(); ++id)
    if (g.gt[id] > 0) g.witness[id] = top[g.witness[id]];
  return g;
}

SemiClosedTree semi_closed_subtree(const TreeView& view, const std::vector<LinkUse>& matching,
                                   const std::vector<StemRecord>& stems) {
  const ContractionState& state = view.state();
  ContractionState scratch = state;
  for (const LinkUse& use : matching) scratch.contract(use);
  TreeView sview(scratch);
  SemiClosedTree t;
  t.root = minimally_leaf_closed(sview);
  t.leaves = view.leaves_in(t.root);
  std::unordered_set<NodeId> matched_leaves;
  for (const LinkUse& use : matching) {
    NodeId x = state.rep(use.u);
    if (!view.in_subtree(t.root, x)) continue;
    t.matched.push_back(use);
    matched_leaves.insert(x);
    matched_leaves.insert(state.rep(use.v));
  }
  for (NodeId leaf : t.leaves)
    if (!matched_leaves.count(leaf)) t.unmatched.push_back(leaf);
  std::unordered_set<LinkId> in_matching;
  for (const LinkUse& use : matching) in_matching.insert(use.origin);
  for (StemRecord r : stems) {
    if (!view.in_subtree(t.root, r.stem)) continue;
    r.activated = in_matching.count(r.twin) > 0;
    t.stems.push_back(r);
  }
  t.basic = t.matched;
  std::unordered_set<std::uint64_t> seen;
  for (NodeId leaf : sview.leaves_in(t.root)) {
    if (!view.is_leaf(leaf)) t.new_leaves.push_back(leaf);
    LinkId id = up_link(sview, leaf);
    const Link& l = view.base().link(id);
    if (seen.insert(pair_key(l.u, l.v)).second) t.basic.push_back(LinkUse{id, l.u, l.v});
  }
  return t;
}

bool covers_subtree(const TreeView& view, NodeId v, const std::vector<LinkUse>& uses) {
  const ContractionState& state = view.state();
  std::vector<char> covered(view.base().node_count(), 0);
  for (const LinkUse& use : uses) {
    NodeId x = state.rep(use.u);
    NodeId y = state.rep(use.v);
    NodeId top = view.lca(x, y);
    for (; x != top; x = view.parent(x)) covered[x] = 1;
    for (; y != top; y = view.parent(y)) covered[y] = 1;
  }
  for (NodeId x : view.subtree(v))
    if (x != v && !covered[x]) return false;
  return true;
}

}  // namespace tap
