#pragma once

#include <string>
#include <vector>

#include "tap/contraction.hpp"
#include "tap/structure.hpp"

namespace tap {

struct WeightedEdge {
  int u = -1;
  int v = -1;
  long long w = 0;
  // The link realizing the edge when the graph comes from a tree view.
  LinkUse link;
};

// Undirected graph on vertices 0..vertex_count-1. `aux`, when set, names a
// vertex that an edge cover does not have to cover (the x_L node).
struct WeightedGraph {
  int vertex_count = 0;
  int aux = -1;
  std::vector<NodeId> node;
  std::vector<WeightedEdge> edges;

  int add_vertex(NodeId tree_node = kNoNode);
  int add_edge(int u, int v, long long w, LinkUse link = {});
};

struct MatchingResult {
  std::vector<int> edges;  // edge indices, ascending
  long long weight = 0;
};

// Maximum-weight (not necessarily maximum-cardinality) matching in a general
// graph. Edges with weight <= 0 are never useful and are ignored.
MatchingResult max_weight_matching(const WeightedGraph& graph);

struct EdgeCoverResult {
  std::vector<int> edges;  // chosen edge indices, ascending
  long long weight = 0;
  // Chosen non-aux edges that form the matching part of the cover.
  std::vector<int> matched;
  // Non-aux vertices not covered by a matched edge.
  std::vector<int> unmatched;

  // Tree-level views, filled when the graph carries node ids.
  std::vector<LinkUse> pairs;
  std::vector<NodeId> unmatched_nodes;
};

// Minimum-weight edge cover of all non-aux vertices (Gallai reduction to a
// maximum-weight matching). Throws InfeasibleError on an isolated vertex.
EdgeCoverResult min_weight_edge_cover(const WeightedGraph& graph);

// Vertices: current leaves in view order, then x_L. Links between original
// leaves weigh 4 + gt thirds (parallel ones collapse to the cheapest); every leaf
// with a link gets an x_L edge of weight 3, since any link of a leaf has a
// shadow ending at an internal node.
WeightedGraph leaf_cover_graph(const TreeView& view, const GoldenTicketMap& gt);

struct StemPair {
  NodeId stem = kNoNode;
  NodeId leaf = kNoNode;
  LinkId twin = kNoLink;  // none for a node closed off by several pairs
  LinkUse use;  // shadow from the leaf to the stem
};

// A set of links to contract immediately as an extra-credit step.
struct ExtraCreditProposal {
  NodeId root = kNoNode;
  std::vector<LinkUse> links;
  int credit3 = 0;
  int cost3 = 0;
  std::string reason;
};

struct UsableMatching {
  std::vector<LinkUse> matching;  // M~: leaf pairs, twins and stem pairs
  std::vector<StemPair> stem_pairs;
  std::vector<LinkId> unresolved_twins;
  // Tops of nodes closed off by several pairs that found no partner.
  std::vector<NodeId> unresolved_stems;
  long long weight_before = 0;
  long long weight_after = 0;
  bool joint_resolve = false;
  bool usable = false;
  std::vector<ExtraCreditProposal> proposals;
};

// Refines the leaf cover into a usable matching: pattern trees and merged
// path components become extra-credit proposals; activated twins get their
// stem paired with a leaf.
UsableMatching stem_matching(const TreeView& view, const EdgeCoverResult& cover,
                             const GoldenTicketMap& gt, const std::vector<StemRecord>& stems);

// T/M~ has no new leaves and M~ touches no compound node.
bool is_usable(const TreeView& view, const std::vector<LinkUse>& matching);

}  // namespace tap
