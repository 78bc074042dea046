#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gscore/metrics.hpp"

namespace gscore {

enum class PoolMode { z_full_league, g_equilibrium };

inline PoolMode parse_pool_mode(std::string_view s) {
  if (s == "z") return PoolMode::z_full_league;
  if (s == "equilibrium") return PoolMode::g_equilibrium;
  throw Error("unknown pool mode '" + std::string(s) + "' (expected z or equilibrium)");
}

inline std::string_view to_string(PoolMode m) {
  return m == PoolMode::z_full_league ? "z" : "equilibrium";
}

struct PoolSelection {
  std::vector<std::string> pool_ids;  // ranked order
  PoolMode mode = PoolMode::z_full_league;
  int iterations_used = 0;
  bool converged = false;
};

namespace detail {

inline void require_q_size(std::span<const PlayerHistory> players, std::size_t q_size) {
  if (q_size == 0) throw Error("pool size must be positive");
  if (q_size > players.size()) {
    throw Error("pool size " + std::to_string(q_size) + " exceeds " +
                std::to_string(players.size()) + " eligible players");
  }
}

inline std::vector<std::size_t> top_indices(std::span<const ValueScore> scores, std::size_t count) {
  auto order = rank_order(scores);
  order.resize(count);
  return order;
}

inline std::vector<PlayerHistory> subset(std::span<const PlayerHistory> players,
                                         std::span<const std::size_t> indices) {
  std::vector<PlayerHistory> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(players[i]);
  return out;
}

inline std::set<std::string> id_set(std::span<const PlayerHistory> players,
                                    std::span<const std::size_t> indices) {
  std::set<std::string> out;
  for (std::size_t i : indices) out.insert(players[i].player_id);
  return out;
}

}  // namespace detail

// Top `q_size` players by Z-score, with aggregates taken over every
// eligible player.
inline PoolSelection select_q_by_z(std::span<const PlayerHistory> players, std::size_t q_size) {
  detail::require_q_size(players, q_size);
  const auto agg = compute_aggregates(players, 1);
  const auto scores = score_players(players, agg, MetricKind::z);
  PoolSelection out;
  out.mode = PoolMode::z_full_league;
  out.iterations_used = 1;
  out.converged = true;
  for (std::size_t i : detail::top_indices(scores, q_size)) out.pool_ids.push_back(players[i].player_id);
  return out;
}

// Re-derives Q from G-scores computed against the previous Q until the set
// stops changing. A revisited set means the iteration cycles; it stops
// with converged = false and keeps the better of the last two sets.
inline PoolSelection select_q_equilibrium(std::span<const PlayerHistory> players,
                                          std::size_t q_size, int roster_size,
                                          KappaMode mode = KappaMode::exact, int max_iters = 100) {
  detail::require_q_size(players, q_size);
  if (max_iters < 1) throw Error("max_iters must be at least 1");

  const auto initial = select_q_by_z(players, q_size);
  std::vector<std::size_t> current;
  for (const auto& id : initial.pool_ids) {
    auto it = std::find_if(players.begin(), players.end(),
                           [&](const PlayerHistory& h) { return h.player_id == id; });
    current.push_back(static_cast<std::size_t>(it - players.begin()));
  }

  std::vector<std::set<std::string>> history{detail::id_set(players, current)};
  PoolSelection out;
  out.mode = PoolMode::g_equilibrium;

  for (int iter = 1; iter <= max_iters; ++iter) {
    const auto members = detail::subset(players, current);
    const auto agg = compute_aggregates(members, roster_size);
    const auto scores = score_players(players, agg, MetricKind::g, mode);
    auto next = detail::top_indices(scores, q_size);
    auto next_set = detail::id_set(players, next);
    out.iterations_used = iter;

    if (next_set == history.back()) {
      out.converged = true;
      current = std::move(next);
      break;
    }
    if (std::find(history.begin(), history.end(), next_set) != history.end()) {
      // Cycle: compare the last two sets under the same (latest) aggregates.
      auto total = [&](std::span<const std::size_t> idx) {
        double sum = 0.0;
        for (std::size_t i : idx) sum += scores[i].total;
        return sum;
      };
      if (total(next) > total(current)) current = std::move(next);
      out.converged = false;
      break;
    }
    history.push_back(std::move(next_set));
    current = std::move(next);
  }

  for (std::size_t i : current) out.pool_ids.push_back(players[i].player_id);
  return out;
}

inline PoolSelection select_pool(std::span<const PlayerHistory> players, std::size_t q_size,
                                 PoolMode pool_mode, int roster_size,
                                 KappaMode mode = KappaMode::exact, int max_iters = 100) {
  return pool_mode == PoolMode::z_full_league
             ? select_q_by_z(players, q_size)
             : select_q_equilibrium(players, q_size, roster_size, mode, max_iters);
}

// Histories of the selected pool, in selection order.
inline std::vector<PlayerHistory> pool_members(std::span<const PlayerHistory> players,
                                               const PoolSelection& selection) {
  std::vector<PlayerHistory> out;
  out.reserve(selection.pool_ids.size());
  for (const auto& id : selection.pool_ids) {
    auto it = std::find_if(players.begin(), players.end(),
                           [&](const PlayerHistory& h) { return h.player_id == id; });
    if (it == players.end()) throw Error("pool member '" + id + "' not in player set");
    out.push_back(*it);
  }
  return out;
}

}  // namespace gscore
