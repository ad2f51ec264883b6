#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "crscore/errors.hpp"

namespace crscore {

/// Smallest k <= limit with every probability an integer multiple of 1/k
/// (within 1e-7 absolute), or nullopt. Uniform-over-samples distributions
/// always have one bounded by the sample count.
inline std::optional<std::int64_t> common_denominator(const std::vector<double>& probs,
                                                      std::int64_t limit = 2'000'000) {
  if (probs.empty()) return std::nullopt;
  for (std::int64_t k = 1; k <= limit; ++k) {
    const double first = probs.front() * static_cast<double>(k);
    if (std::abs(first - std::round(first)) > 1e-7) continue;
    bool ok = true;
    for (double p : probs) {
      const double scaled = p * static_cast<double>(k);
      if (std::abs(scaled - std::round(scaled)) > 1e-7) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return std::nullopt;
}

/// Exact transportation problem: min sum f_ij c_ij with row sums = supplies
/// and column sums = demands (both integer, equal totals). Successive
/// shortest augmenting paths with node potentials.
inline double min_cost_transport(const std::vector<std::int64_t>& supplies,
                                 const std::vector<std::int64_t>& demands,
                                 const std::vector<std::vector<double>>& cost) {
  const int n1 = static_cast<int>(supplies.size());
  const int n2 = static_cast<int>(demands.size());
  if (n1 == 0 || n2 == 0) throw EmptyInput("transportation needs atoms on both sides");
  if (static_cast<int>(cost.size()) != n1) throw DimensionMismatch("cost matrix rows");
  std::int64_t total_supply = 0, total_demand = 0;
  for (auto s : supplies) total_supply += s;
  for (auto d : demands) total_demand += d;
  if (total_supply != total_demand) throw InvalidDistribution("supplies and demands must balance");

  std::vector<std::int64_t> supply = supplies;
  std::vector<std::int64_t> demand = demands;
  std::vector<std::vector<std::int64_t>> flow(n1, std::vector<std::int64_t>(n2, 0));
  std::vector<double> pot_src(n1, 0.0), pot_snk(n2, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  const int nodes = n1 + n2;  // 0..n1-1 sources, n1..n1+n2-1 sinks

  std::int64_t remaining = total_supply;
  while (remaining > 0) {
    std::vector<double> dist(nodes, inf);
    std::vector<int> parent(nodes, -1);
    std::vector<char> done(nodes, 0);
    for (int i = 0; i < n1; ++i)
      if (supply[i] > 0) dist[i] = 0.0;

    for (int iter = 0; iter < nodes; ++iter) {
      int u = -1;
      for (int v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] < inf && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      if (u < n1) {
        for (int j = 0; j < n2; ++j) {
          const double rc = cost[u][j] + pot_src[u] - pot_snk[j];
          if (dist[u] + rc < dist[n1 + j] - 1e-15) {
            dist[n1 + j] = dist[u] + rc;
            parent[n1 + j] = u;
          }
        }
      } else {
        const int j = u - n1;
        for (int i = 0; i < n1; ++i) {
          if (flow[i][j] <= 0) continue;
          const double rc = -cost[i][j] + pot_snk[j] - pot_src[i];
          if (dist[u] + rc < dist[i] - 1e-15) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }

    int sink = -1;
    for (int j = 0; j < n2; ++j)
      if (demand[j] > 0 && dist[n1 + j] < inf && (sink < 0 || dist[n1 + j] < dist[n1 + sink])) sink = j;
    if (sink < 0) throw Error("transportation network disconnected");

    // bottleneck along the alternating path
    std::int64_t push = demand[sink];
    for (int v = n1 + sink; parent[v] >= 0; v = parent[v]) {
      const int p = parent[v];
      if (v >= n1) {
        // forward arc p -> v has unbounded capacity
      } else {
        push = std::min(push, flow[v][p - n1]);
      }
      if (p < n1 && parent[p] < 0) push = std::min(push, supply[p]);
    }

    for (int v = n1 + sink; parent[v] >= 0; v = parent[v]) {
      const int p = parent[v];
      if (v >= n1)
        flow[p][v - n1] += push;
      else
        flow[v][p - n1] -= push;
      if (p < n1 && parent[p] < 0) supply[p] -= push;
    }
    demand[sink] -= push;
    remaining -= push;

    for (int v = 0; v < nodes; ++v) {
      if (dist[v] == inf) continue;
      if (v < n1)
        pot_src[v] += dist[v];
      else
        pot_snk[v - n1] += dist[v];
    }
  }

  double total = 0.0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (flow[i][j] > 0) total += static_cast<double>(flow[i][j]) * cost[i][j];
  return total / static_cast<double>(total_supply);
}

}  // namespace crscore
