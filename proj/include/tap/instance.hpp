#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tap {

using NodeId = int;
using LinkId = int;

inline constexpr NodeId kNoNode = -1;
inline constexpr LinkId kNoLink = -1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Some tree edge cannot be covered by any available link.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Rooted tree over dense node ids 0..n-1. Edges are identified by their
// child endpoint: edge `c` is (c, parent(c)).
class RootedTree {
 public:
  RootedTree() = default;

  // Throws Error on cycles, disconnected input, unknown ids or a node with
  // two parents.
  static RootedTree from_edges(int n, NodeId root,
                               std::span<const std::pair<NodeId, NodeId>> parent_child);

  int size() const { return static_cast<int>(parent_.size()); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_[v]; }
  int depth(NodeId v) const { return depth_[v]; }
  std::span<const NodeId> children(NodeId v) const { return children_[v]; }
  const std::vector<NodeId>& preorder() const { return preorder_; }

  bool valid(NodeId v) const { return v >= 0 && v < size(); }
  bool is_leaf(NodeId v) const { return v != root_ && children_[v].empty(); }
  std::vector<NodeId> leaves() const;

  // True iff `a` is an ancestor of `d` or a == d.
  bool is_ancestor(NodeId a, NodeId d) const {
    return tin_[a] <= tin_[d] && tout_[d] <= tout_[a];
  }

  // Upward walk with depth equalization.
  NodeId lca(NodeId u, NodeId v) const;

  // Node sequence u ... lca ... v.
  std::vector<NodeId> path(NodeId u, NodeId v) const;

 private:
  NodeId root_ = kNoNode;
  std::vector<NodeId> parent_;
  std::vector<int> depth_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> preorder_;
  std::vector<int> tin_;
  std::vector<int> tout_;
};

struct Link {
  LinkId id = kNoLink;
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  // For shadows: the link whose path strictly contains this one.
  LinkId shadow_of = kNoLink;

  bool is_shadow() const { return shadow_of != kNoLink; }
};

struct Solution {
  std::vector<LinkId> links;

  std::size_t size() const { return links.size(); }
};

class Instance {
 public:
  Instance() = default;
  Instance(RootedTree tree, std::vector<Link> links);

  const RootedTree& tree() const { return tree_; }
  int node_count() const { return tree_.size(); }
  int link_count() const { return static_cast<int>(links_.size()); }
  std::span<const Link> links() const { return links_; }
  const Link& link(LinkId id) const { return links_.at(id); }
  bool valid_link(LinkId id) const { return id >= 0 && id < link_count(); }

  NodeId lca(NodeId u, NodeId v) const { return tree_.lca(u, v); }
  std::vector<NodeId> link_path(LinkId id) const;

  std::optional<LinkId> find_link(NodeId u, NodeId v) const;

  // Follows shadow provenance back to a link that is not a shadow.
  LinkId original_of(LinkId id) const;

  int original_link_count() const;

 private:
  RootedTree tree_;
  std::vector<Link> links_;
  std::unordered_map<std::uint64_t, LinkId> by_pair_;
};

std::uint64_t pair_key(NodeId u, NodeId v);

// Edges are (parent, child). Parallel original links are merged; self loops
// and unknown ids throw Error.
Instance build_instance(int n, NodeId root,
                        std::span<const std::pair<NodeId, NodeId>> edges,
                        std::span<const std::pair<NodeId, NodeId>> links);

// Node count inferred as 1 + max id mentioned.
Instance build_instance(std::span<const std::pair<NodeId, NodeId>> edges, NodeId root,
                        std::span<const std::pair<NodeId, NodeId>> links);

// Adds every link whose path is a strict subpath of an original link's path.
// Deduplicated by endpoint pair; idempotent.
Instance shadow_complete(const Instance& instance);

struct FeasibilityReport {
  bool feasible = false;
  // witness[c] = a chosen link covering edge (c, parent(c)); kNoLink for the
  // root and for uncovered edges.
  std::vector<LinkId> witness;
  std::vector<NodeId> uncovered;
};

FeasibilityReport check_feasibility(const Instance& instance, const Solution& solution);
bool is_feasible(const Instance& instance, const Solution& solution);

// True iff taking every link covers the tree.
bool instance_feasible(const Instance& instance);

std::string serialize(const Instance& instance);
Instance parse_instance(std::string_view text);
Instance read_instance_file(const std::string& path);

// Links sorted by normalized endpoint pair, shadows after originals.
Instance canonicalize(const Instance& instance);

std::string serialize_solution(const Instance& instance, const Solution& solution);
Solution parse_solution(const Instance& instance, std::string_view text);

bool operator==(const Instance& a, const Instance& b);

}  // namespace tap
