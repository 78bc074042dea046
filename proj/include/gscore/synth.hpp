#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gscore/ingest.hpp"
#include "gscore/rng.hpp"

namespace gscore {

// Generator for basketball-like weekly game logs. Players differ in
// overall quality and in a guard-to-big archetype; weekly lines are built
// game by game (shots, makes, counting stats), so categories co-move with
// minutes and games played the way box scores do.
struct SynthConfig {
  int players = 420;
  int weeks = 24;
  std::uint64_t seed = 2023;
};

namespace detail {

struct SynthPlayer {
  double minutes = 0.0;  // per-game minutes scale in [0, 1]
  double reb = 0.0, ast = 0.0, stl = 0.0, blk = 0.0, tov = 0.0;  // per full game
  double fga = 0.0, fg_pct = 0.0, three_share = 0.0;
  double fta = 0.0, ft_pct = 0.0;
  double injury_rate = 0.0;
};

inline SynthPlayer draw_player(Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SynthPlayer p;
  // Right-skewed quality: a few stars well above the rest.
  const double q0 = z(rng);
  const double quality = q0 + 0.2 * (q0 * q0 - 1.0);
  const double size = std::clamp(0.5 + 0.28 * z(rng), 0.0, 1.0);
  auto noise = [&](double sd) { return std::exp(sd * z(rng)); };

  p.minutes = std::clamp(0.62 + 0.17 * quality + 0.05 * z(rng), 0.25, 1.0);
  const double pts36 = std::max(7.0, (16.0 + 3.0 * quality) * noise(0.15));
  p.reb = std::max(2.0, (5.0 + 5.5 * size + 0.6 * quality) * noise(0.22));
  p.ast = std::max(0.8, (4.8 - 1.5 * size + 0.6 * quality) * noise(0.45));
  p.stl = std::max(0.3, (1.2 - 0.2 * size + 0.08 * quality) * noise(0.18));
  p.blk = std::max(0.05, (0.35 + 1.1 * size * size + 0.05 * quality) * noise(0.45));
  const double tpm36 = std::max(0.05, (2.2 - 1.0 * size) * noise(0.55));
  p.tov = (0.085 * pts36 + 0.2 * p.ast) * noise(0.12);

  p.ft_pct = std::clamp(0.78 - 0.07 * size + 0.07 * z(rng), 0.45, 0.93);
  p.fta = pts36 * 0.24 * noise(0.35);
  p.fg_pct = std::clamp(0.45 + 0.05 * size - 0.012 * (tpm36 - 1.3) + 0.035 * z(rng), 0.36, 0.68);
  const double ftm36 = p.fta * p.ft_pct;
  // points = 2 * fgm + threes + ftm
  const double fgm36 = std::max(1.0, (pts36 - ftm36 - tpm36) / 2.0);
  p.fga = fgm36 / p.fg_pct;
  p.three_share = std::clamp(tpm36 / fgm36, 0.0, 0.9);
  p.injury_rate = std::clamp(0.03 + 0.12 * u01(rng) * u01(rng) * 2.0, 0.02, 0.3);
  return p;
}

// Gamma-Poisson draw: overdispersed count with the given mean.
inline double overdispersed(Rng& rng, double mean, double shape) {
  if (mean <= 0.0) return 0.0;
  std::gamma_distribution<double> g(shape, mean / shape);
  std::poisson_distribution<int> pois(g(rng));
  return pois(rng);
}

}  // namespace detail

inline std::vector<PlayerHistory> generate_league(const SynthConfig& config) {
  Rng rng = make_rng(config.seed, {0});
  std::discrete_distribution<int> games_in_week({0.0, 0.0, 0.08, 0.40, 0.45, 0.07});
  std::vector<int> schedule;
  for (int w = 0; w < config.weeks; ++w) schedule.push_back(games_in_week(rng));

  std::vector<PlayerHistory> out;
  out.reserve(static_cast<std::size_t>(config.players));
  for (int i = 0; i < config.players; ++i) {
    Rng prng = make_rng(config.seed, {1, static_cast<std::uint64_t>(i)});
    const auto p = detail::draw_player(prng);
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution plays(0.93);
    std::bernoulli_distribution hurt(p.injury_rate);

    PlayerHistory h;
    h.player_id = "p" + std::to_string(i + 1);
    bool injured_run = false;
    for (int w = 0; w < config.weeks; ++w) {
      PlayerWeek week;
      week.player_id = h.player_id;
      week.week = w;
      // Injuries tend to span consecutive weeks.
      injured_run = injured_run ? std::bernoulli_distribution(0.55)(prng) : hurt(prng);
      week.injured = injured_run;
      if (!week.injured) {
        StatLine& line = week.line;
        for (int g = 0; g < schedule[w]; ++g) {
          if (!plays(prng)) continue;
          const double load = p.minutes * std::clamp(1.0 + 0.17 * z(prng), 0.3, 1.6);
          const double fga = detail::overdispersed(prng, p.fga * load, 20.0);
          const double fgm = std::binomial_distribution<int>(static_cast<int>(fga), p.fg_pct)(prng);
          const double tpm = std::binomial_distribution<int>(static_cast<int>(fgm), p.three_share)(prng);
          const double fta = detail::overdispersed(prng, p.fta * load, 4.0);
          const double ftm = std::binomial_distribution<int>(static_cast<int>(fta), p.ft_pct)(prng);
          line.count(Category::points) += 2.0 * fgm + tpm + ftm;
          line.count(Category::threes) += tpm;
          line.count(Category::rebounds) += detail::overdispersed(prng, p.reb * load, 12.0);
          line.count(Category::assists) += detail::overdispersed(prng, p.ast * load, 10.0);
          line.count(Category::steals) += detail::overdispersed(prng, p.stl * load, 30.0);
          line.count(Category::blocks) += detail::overdispersed(prng, p.blk * load, 6.0);
          line.count(Category::turnovers) += detail::overdispersed(prng, p.tov * load, 12.0);
          line.shooting(Category::field_goal).made += fgm;
          line.shooting(Category::field_goal).attempted += fga;
          line.shooting(Category::free_throw).made += ftm;
          line.shooting(Category::free_throw).attempted += fta;
        }
      }
      h.weeks.push_back(std::move(week));
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace gscore
