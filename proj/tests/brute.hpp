#pragma once

// Exhaustive reference solvers for small graphs, used only by tests.

#include <algorithm>
#include <limits>
#include <vector>

#include "tap/matching.hpp"

namespace tap::brute {

inline long long max_matching_weight(const WeightedGraph& g) {
  const int n = g.vertex_count;
  std::vector<std::vector<std::pair<int, long long>>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  std::vector<bool> used(n, false);
  // Lowest free vertex is either left single or matched to a free neighbour.
  auto rec = [&](auto&& self, int from) -> long long {
    int v = from;
    while (v < n && used[v]) ++v;
    if (v >= n) return 0;
    used[v] = true;
    long long best = self(self, v + 1);
    for (auto [u, w] : adj[v]) {
      if (used[u]) continue;
      used[u] = true;
      best = std::max(best, w + self(self, v + 1));
      used[u] = false;
    }
    used[v] = false;
    return best;
  };
  return rec(rec, 0);
}

// Minimum edge cover of the non-aux vertices by subset enumeration over
// edges; -1 when no cover exists. Intended for at most ~20 edges.
inline long long min_edge_cover_weight(const WeightedGraph& g) {
  const int m = static_cast<int>(g.edges.size());
  long long best = -1;
  std::vector<int> need;
  for (int v = 0; v < g.vertex_count; ++v)
    if (v != g.aux) need.push_back(v);
  for (long long mask = 0; mask < (1LL << m); ++mask) {
    std::vector<bool> cov(g.vertex_count, false);
    long long w = 0;
    for (int k = 0; k < m; ++k) {
      if (mask >> k & 1) {
        cov[g.edges[k].u] = cov[g.edges[k].v] = true;
        w += g.edges[k].w;
      }
    }
    bool ok = std::all_of(need.begin(), need.end(), [&](int v) { return cov[v]; });
    if (ok && (best < 0 || w < best)) best = w;
  }
  return best;
}

// DP over vertex subsets: cheapest cover of `need` where each edge adds its
// endpoints. Handles larger edge counts than the subset enumeration.
inline long long min_edge_cover_dp(const WeightedGraph& g) {
  const int n = g.vertex_count;
  const long long inf = std::numeric_limits<long long>::max() / 4;
  unsigned full = 0;
  for (int v = 0; v < n; ++v)
    if (v != g.aux) full |= 1u << v;
  std::vector<long long> dp(1u << n, inf);
  dp[0] = 0;
  for (unsigned s = 0; s < (1u << n); ++s) {
    if (dp[s] == inf) continue;
    for (const auto& e : g.edges) {
      unsigned t = s | (1u << e.u) | (1u << e.v);
      dp[t] = std::min(dp[t], dp[s] + e.w);
    }
  }
  long long best = inf;
  for (unsigned s = 0; s < (1u << n); ++s)
    if ((s & full) == full) best = std::min(best, dp[s]);
  return best == inf ? -1 : best;
}

}  // namespace tap::brute
