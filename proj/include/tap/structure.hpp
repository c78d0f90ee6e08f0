#pragma once

#include <vector>

#include "tap/contraction.hpp"

namespace tap {

struct StemRecord {
  NodeId stem = kNoNode;
  LinkId twin = kNoLink;
  bool activated = false;
};

enum class TicketPattern { none, twin, A, B, C };

const char* to_string(TicketPattern p);

// Golden tickets per base link id. Weights are in thirds: 4 + gt.
struct GoldenTicketMap {
  std::vector<int> gt;
  std::vector<NodeId> witness;
  std::vector<TicketPattern> pattern;

  int value(LinkId id) const { return gt[id]; }
  int weight3(LinkId id) const { return 4 + gt[id]; }
  // Links with gt > 0, ascending id.
  std::vector<LinkId> ticketed() const;
};

// Semi-closed tree T_v with respect to a matching on the leaves.
struct SemiClosedTree {
  NodeId root = kNoNode;
  std::vector<NodeId> leaves;
  std::vector<LinkUse> matched;
  std::vector<NodeId> unmatched;
  std::vector<StemRecord> stems;
  // Leaves of T_v/M that are not leaves of T (stems left by unusable pairs).
  std::vector<NodeId> new_leaves;
  // B(T_v): M_v plus up-links, taken in T/M, of the leaves of T_v/M.
  std::vector<LinkUse> basic;
};

// Every current link at x ends inside T_v. Throws if x is outside T_v.
bool is_node_closed(const TreeView& view, NodeId v, NodeId x);

// T_v is leaf-closed: no leaf of T_v has a link leaving T_v.
std::vector<bool> leaf_closed_flags(const TreeView& view);

// Deepest minimally leaf-closed subtree root; ties by smallest id. Leaves are
// never returned on their own unless the tree is a single node.
NodeId minimally_leaf_closed(const TreeView& view);

// Incident link of leaf a whose lca with a is closest to the root; ties by
// smallest link id. Throws InfeasibleError when a has no links.
LinkId up_link(const TreeView& view, NodeId a);
NodeId up_node(const TreeView& view, NodeId a);

// Leaf-to-leaf links whose single contraction turns their lca into a leaf.
std::vector<StemRecord> find_stems(const TreeView& view);

// Largest leaf count of T_v examined for the 4+ leaf pattern.
inline constexpr int kPatternLeafCap = 32;

GoldenTicketMap golden_tickets(const TreeView& view, const std::vector<StemRecord>& stems);
// Every link gets the same value; used as a negative control.
GoldenTicketMap uniform_tickets(const Instance& instance, int value);

// Contracts `matching` in a scratch copy, finds the minimally leaf-closed
// subtree there and reports it in the current view.
SemiClosedTree semi_closed_subtree(const TreeView& view, const std::vector<LinkUse>& matching,
                                   const std::vector<StemRecord>& stems = {});

// Current-tree edges (child endpoints) of T_v covered by the given uses.
bool covers_subtree(const TreeView& view, NodeId v, const std::vector<LinkUse>& uses);

}  // namespace tap
