#pragma once

// Small hand-built instances shared by the unit tests.

#include <utility>
#include <vector>

#include "tap/instance.hpp"

namespace tap::fixtures {

// Node names of the two-subtree example used throughout the tests.
enum TwoStems : NodeId { r = 0, s = 1, a = 2, b = 3, v = 4, x = 5, w = 6, u = 7, c = 8, d = 9 };

inline Instance two_stems() {
  std::vector<std::pair<NodeId, NodeId>> edges{{r, s}, {s, a}, {s, b}, {r, v}, {v, x},
                                               {x, w}, {x, u}, {u, c}, {u, d}};
  std::vector<std::pair<NodeId, NodeId>> links{{a, b}, {c, d}, {c, w}, {a, w}, {x, s}, {d, v}};
  return build_instance(10, r, edges, links);
}

inline Instance single_edge() {
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}};
  std::vector<std::pair<NodeId, NodeId>> links{{1, 0}};
  return build_instance(2, 0, edges, links);
}

// Three-leaf tree with no stem: v -> {a, t -> {b, c}}, link ab, c closed at v,
// t linked to the root p above v.
inline Instance three_leaf_gadget() {
  // p=0 v=1 a=2 t=3 b=4 c=5
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}};
  std::vector<std::pair<NodeId, NodeId>> links{{2, 4}, {5, 1}, {3, 0}};
  return build_instance(6, 0, edges, links);
}

inline LinkId link_between(const Instance& in, NodeId p, NodeId q) {
  auto id = in.find_link(p, q);
  return id ? *id : kNoLink;
}

}  // namespace tap::fixtures
