#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tap/instance.hpp"

namespace tap {

// A link as it currently appears: representatives of both endpoints.
struct CurrentLink {
  LinkId id = kNoLink;
  NodeId u = kNoNode;
  NodeId v = kNoNode;

  NodeId other(NodeId x) const { return x == u ? v : u; }
};

// A chosen link, possibly used through one of its shadows. Endpoints are
// base-tree node ids; their current representatives lie on the current path
// of `origin`.
struct LinkUse {
  LinkId origin = kNoLink;
  NodeId u = kNoNode;
  NodeId v = kNoNode;

  friend bool operator==(const LinkUse&, const LinkUse&) = default;
};

// The evolving tree under link contractions. Each current node is a
// representative: the topmost base node of a connected set of base nodes.
// Representatives of compound nodes therefore keep the id of the lca the
// contracted path collapsed into.
class ContractionState {
 public:
  explicit ContractionState(const Instance& base);

  const Instance& base() const { return *base_; }

  NodeId rep(NodeId x) const;
  bool is_rep(NodeId x) const { return dsu_[x] == x; }
  NodeId root() const { return base_->tree().root(); }
  NodeId parent(NodeId r) const;
  const std::vector<NodeId>& children(NodeId r) const { return children_[r]; }
  bool is_leaf(NodeId r) const { return r != root() && children_[r].empty(); }
  bool is_compound(NodeId r) const { return size_[r] > 1; }
  int set_size(NodeId r) const { return size_[r]; }
  int node_count() const { return node_count_; }
  int edge_count() const { return node_count_ - 1; }

  std::vector<NodeId> nodes() const;
  std::vector<NodeId> current_leaves() const;

  // x in T_v of the current tree (both given as representatives).
  bool in_subtree(NodeId v, NodeId x) const { return base_->tree().is_ancestor(v, x); }
  NodeId lca(NodeId a, NodeId b) const;
  // Representatives from rep(a) to rep(b).
  std::vector<NodeId> path(NodeId a, NodeId b) const;

  // nullopt when both endpoints share a representative. Throws on unknown id.
  std::optional<CurrentLink> current_link(LinkId id) const;
  std::vector<CurrentLink> current_links() const;

  // Collapses the current path between rep(a) and rep(b) into its lca.
  // Returns the resulting representative.
  NodeId contract_path(NodeId a, NodeId b);
  NodeId contract(const LinkUse& use);
  // Contracts the given links in order; overlapping paths end up in one
  // compound node. Returns the representative holding the last link, or
  // kNoNode for an empty list. Throws if a link is unknown or already
  // contracted away before the call.
  NodeId contract_links(std::span<const LinkId> ids);

  // Maps chosen current links to base link ids. Throws for unknown ids and
  // for links that were contracted away.
  Solution lift_solution(std::span<const LinkId> ids) const;

  const std::vector<LinkUse>& history() const { return history_; }

 private:
  const Instance* base_;
  mutable std::vector<NodeId> dsu_;
  std::vector<int> size_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<LinkUse> history_;
  int node_count_;
};

// Immutable snapshot of a ContractionState with per-node indexes: current
// depth, preorder intervals, leaves and the incident current links.
class TreeView {
 public:
  explicit TreeView(const ContractionState& state);

  const ContractionState& state() const { return *state_; }
  const Instance& base() const { return state_->base(); }

  NodeId root() const { return state_->root(); }
  NodeId parent(NodeId r) const { return parent_[r]; }
  const std::vector<NodeId>& children(NodeId r) const { return state_->children(r); }
  int depth(NodeId r) const { return depth_[r]; }
  bool is_node(NodeId x) const { return x >= 0 && x < static_cast<int>(parent_.size()) && parent_[x] != kNoNode; }
  bool is_leaf(NodeId r) const { return leaf_index_[r] >= 0; }
  bool is_compound(NodeId r) const { return state_->is_compound(r); }
  int leaf_index(NodeId r) const { return leaf_index_[r]; }
  const std::vector<NodeId>& nodes() const { return preorder_; }
  const std::vector<NodeId>& leaves() const { return leaves_; }
  int node_count() const { return static_cast<int>(preorder_.size()); }

  bool in_subtree(NodeId v, NodeId x) const { return tin_[v] <= tin_[x] && tin_[x] <= tout_[v]; }
  NodeId lca(NodeId a, NodeId b) const;
  std::vector<NodeId> path(NodeId a, NodeId b) const;
  // Current-tree nodes of T_v in preorder.
  std::span<const NodeId> subtree(NodeId v) const;
  std::vector<NodeId> leaves_in(NodeId v) const;

  const std::vector<CurrentLink>& links() const { return links_; }
  // Indexes into links() of links incident to r.
  const std::vector<int>& incident(NodeId r) const { return incident_[r]; }
  // Index into links() for a base link id, or -1 when contracted away.
  int link_index(LinkId id) const { return link_index_[id]; }

 private:
  const ContractionState* state_;
  std::vector<NodeId> parent_;
  std::vector<int> depth_;
  std::vector<int> tin_;
  std::vector<int> tout_;
  std::vector<NodeId> preorder_;
  std::vector<NodeId> leaves_;
  std::vector<int> leaf_index_;
  std::vector<CurrentLink> links_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> link_index_;
};

}  // namespace tap
