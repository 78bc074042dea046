#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "gscore/categories.hpp"
#include "gscore/ingest.hpp"
#include "gscore/metrics.hpp"
#include "gscore/pool.hpp"
#include "gscore/rng.hpp"

namespace gscore {

struct DraftConfig {
  int num_teams = 12;
  int roster_size = 13;
  int seat_under_test = 0;
  MetricKind metric_under_test = MetricKind::g;
  MetricKind field_metric = MetricKind::z;

  void validate(std::size_t pool_size) const {
    if (num_teams < 2) throw Error("need at least two teams");
    if (roster_size < 1) throw Error("roster size must be at least 1");
    if (seat_under_test < 0 || seat_under_test >= num_teams) throw Error("seat out of range");
    if (static_cast<std::size_t>(num_teams) * static_cast<std::size_t>(roster_size) > pool_size) {
      throw Error("league needs " + std::to_string(num_teams * roster_size) +
                  " players but only " + std::to_string(pool_size) + " are eligible");
    }
  }
};

// Seat on the clock for each overall pick: forward on even rounds,
// reversed on odd rounds.
inline std::vector<int> snake_order(int num_teams, int rounds) {
  if (num_teams < 1 || rounds < 1) throw Error("snake_order needs at least one team and round");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(num_teams) * rounds);
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < num_teams; ++i) order.push_back(r % 2 == 0 ? i : num_teams - 1 - i);
  }
  return order;
}

// Player indices in preference order.
using Ranking = std::vector<std::size_t>;
using Roster = std::vector<std::size_t>;

// Each seat takes its best-ranked available player in snake order.
inline std::vector<Roster> run_draft(int num_teams, int roster_size,
                                     std::span<const Ranking> rankings) {
  if (rankings.size() != static_cast<std::size_t>(num_teams)) {
    throw Error("need one ranking per seat");
  }
  std::size_t universe = 0;
  for (const auto& r : rankings) {
    for (std::size_t p : r) universe = std::max(universe, p + 1);
  }
  std::vector<char> taken(universe, 0);
  std::vector<std::size_t> cursor(rankings.size(), 0);
  std::vector<Roster> teams(static_cast<std::size_t>(num_teams));
  for (int seat : snake_order(num_teams, roster_size)) {
    const auto& list = rankings[seat];
    auto& pos = cursor[seat];
    while (pos < list.size() && taken[list[pos]]) ++pos;
    if (pos == list.size()) {
      throw Error("ranking for seat " + std::to_string(seat) + " exhausted");
    }
    taken[list[pos]] = 1;
    teams[seat].push_back(list[pos]);
  }
  return teams;
}

inline std::vector<Roster> run_draft(const DraftConfig& config, std::span<const Ranking> rankings) {
  return run_draft(config.num_teams, config.roster_size, rankings);
}

namespace detail {

inline std::vector<const PlayerWeek*> healthy_weeks(const PlayerHistory& h) {
  std::vector<const PlayerWeek*> out;
  for (const auto& w : h.weeks) {
    if (!w.injured) out.push_back(&w);
  }
  if (out.empty()) throw Error("player '" + h.player_id + "' has no healthy weeks");
  return out;
}

}  // namespace detail

// Uniform draws with replacement from the player's healthy weeks.
inline std::vector<PlayerWeek> sample_season(const PlayerHistory& history, int weeks, Rng& rng) {
  const auto healthy = detail::healthy_weeks(history);
  std::uniform_int_distribution<std::size_t> pick(0, healthy.size() - 1);
  std::vector<PlayerWeek> out;
  out.reserve(static_cast<std::size_t>(weeks));
  for (int i = 0; i < weeks; ++i) out.push_back(*healthy[pick(rng)]);
  return out;
}

using TeamWeek = StatLine;

inline TeamWeek aggregate_team_week(std::span<const StatLine> lines) {
  TeamWeek total;
  for (const auto& l : lines) total += l;
  return total;
}

inline TeamWeek aggregate_team_week(std::span<const PlayerWeek> weeks) {
  TeamWeek total;
  for (const auto& w : weeks) total += w.line;
  return total;
}

enum class Outcome : std::uint8_t { win, loss, tie };

using CategoryOutcomes = std::array<Outcome, kCategoryCount>;

namespace detail {

// Sign of (a - b) on the "higher is better" scale.
inline int compare_rates(const Shots& a, const Shots& b) {
  if (a.attempted > 0.0 && b.attempted > 0.0) {
    const double lhs = a.made * b.attempted;
    const double rhs = b.made * a.attempted;
    return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
  }
  // A team without attempts ties a team with no makes and loses to any
  // positive rate.
  if (a.attempted > 0.0) return a.made > 0.0 ? 1 : 0;
  if (b.attempted > 0.0) return b.made > 0.0 ? -1 : 0;
  return 0;
}

inline int compare_category(const StatLine& a, const StatLine& b, Category c) {
  if (is_percentage(c)) return compare_rates(a.shooting(c), b.shooting(c));
  const double x = a.count(c);
  const double y = b.count(c);
  const int sign = x > y ? 1 : (x < y ? -1 : 0);
  return lower_is_better(c) ? -sign : sign;
}

}  // namespace detail

// Outcome of each category from team a's point of view.
inline CategoryOutcomes score_matchup(const TeamWeek& a, const TeamWeek& b) {
  CategoryOutcomes out{};
  for (Category c : kAllCategories) {
    const int s = detail::compare_category(a, b, c);
    out[index(c)] = s > 0 ? Outcome::win : (s < 0 ? Outcome::loss : Outcome::tie);
  }
  return out;
}

enum class ScheduleMode { round_robin };

using WeekPairings = std::vector<std::pair<int, int>>;

// Circle-method round robin repeated until `weeks` weeks are filled.
inline std::vector<WeekPairings> round_robin_schedule(int num_teams, int weeks) {
  if (num_teams < 2 || num_teams % 2 != 0) throw Error("schedule needs an even number of teams");
  std::vector<int> ring(static_cast<std::size_t>(num_teams));
  std::iota(ring.begin(), ring.end(), 0);
  std::vector<WeekPairings> rounds;
  for (int r = 0; r < num_teams - 1; ++r) {
    WeekPairings week;
    for (int i = 0; i < num_teams / 2; ++i) week.emplace_back(ring[i], ring[num_teams - 1 - i]);
    rounds.push_back(std::move(week));
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  std::vector<WeekPairings> schedule;
  for (int w = 0; w < weeks; ++w) schedule.push_back(rounds[w % rounds.size()]);
  return schedule;
}

enum class ScoringFormat { each_category, most_categories };

inline ScoringFormat parse_format(std::string_view s) {
  if (s == "each") return ScoringFormat::each_category;
  if (s == "most") return ScoringFormat::most_categories;
  throw Error("unknown format '" + std::string(s) + "' (expected each or most)");
}

inline std::string_view to_string(ScoringFormat f) {
  return f == ScoringFormat::each_category ? "each" : "most";
}

struct TeamRecord {
  int wins = 0;  // categories
  int losses = 0;
  int ties = 0;
  int weeks_won = 0;
  int weeks_lost = 0;
  int weeks_tied = 0;
  std::uint64_t tiebreak = 0;  // coin flip: higher key wins

  int category_margin() const { return wins - losses; }
  // Week-ties count as half a win.
  double week_points() const { return weeks_won + 0.5 * weeks_tied; }
};

// Team indices, champion first.
inline std::vector<int> standings(std::span<const TeamRecord> records, ScoringFormat format) {
  std::vector<int> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](int i, int j) {
    const auto& a = records[i];
    const auto& b = records[j];
    if (format == ScoringFormat::each_category) {
      if (a.category_margin() != b.category_margin()) return a.category_margin() > b.category_margin();
      if (a.wins != b.wins) return a.wins > b.wins;
      if (a.losses != b.losses) return a.losses < b.losses;
    } else {
      if (a.week_points() != b.week_points()) return a.week_points() > b.week_points();
      if (a.category_margin() != b.category_margin()) return a.category_margin() > b.category_margin();
    }
    if (a.tiebreak != b.tiebreak) return a.tiebreak > b.tiebreak;
    return i < j;
  };
  std::sort(order.begin(), order.end(), better);
  return order;
}

struct TeamSeason {
  std::vector<CategoryOutcomes> weekly;
  std::vector<int> opponents;
  TeamRecord record;
};

struct SeasonResult {
  std::vector<TeamSeason> teams;

  std::vector<TeamRecord> records() const {
    std::vector<TeamRecord> out;
    for (const auto& t : teams) out.push_back(t.record);
    return out;
  }
  std::vector<int> standings(ScoringFormat format) const {
    const auto r = records();
    return gscore::standings(r, format);
  }
  int champion(ScoringFormat format) const { return standings(format).front(); }
};

// Records one week's head-to-head result for both teams.
inline void record_matchup(TeamSeason& a, TeamSeason& b, int a_index, int b_index,
                           const TeamWeek& a_week, const TeamWeek& b_week) {
  const auto outcomes = score_matchup(a_week, b_week);
  CategoryOutcomes mirrored{};
  int a_wins = 0;
  int b_wins = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    switch (outcomes[c]) {
      case Outcome::win:
        mirrored[c] = Outcome::loss;
        ++a_wins;
        break;
      case Outcome::loss:
        mirrored[c] = Outcome::win;
        ++b_wins;
        break;
      case Outcome::tie:
        mirrored[c] = Outcome::tie;
        break;
    }
  }
  const int ties = static_cast<int>(kCategoryCount) - a_wins - b_wins;
  a.record.wins += a_wins;
  a.record.losses += b_wins;
  a.record.ties += ties;
  b.record.wins += b_wins;
  b.record.losses += a_wins;
  b.record.ties += ties;
  if (a_wins > b_wins) {
    ++a.record.weeks_won;
    ++b.record.weeks_lost;
  } else if (b_wins > a_wins) {
    ++b.record.weeks_won;
    ++a.record.weeks_lost;
  } else {
    ++a.record.weeks_tied;
    ++b.record.weeks_tied;
  }
  a.weekly.push_back(outcomes);
  a.opponents.push_back(b_index);
  b.weekly.push_back(mirrored);
  b.opponents.push_back(a_index);
}

using SeasonRoster = std::vector<const PlayerHistory*>;

// Samples every rostered player's weeks, then plays the schedule.
// Draw order is team by team, player by player, week by week; the
// tie-break keys are drawn last.
inline SeasonResult play_season(std::span<const SeasonRoster> teams, int weeks, ScheduleMode,
                                Rng& rng) {
  const int num_teams = static_cast<int>(teams.size());
  if (num_teams % 2 != 0) throw Error("play_season needs an even number of teams");
  if (weeks < 1) throw Error("season needs at least one week");
  const auto schedule = round_robin_schedule(num_teams, weeks);

  std::vector<std::vector<TeamWeek>> team_weeks(teams.size(),
                                                std::vector<TeamWeek>(static_cast<std::size_t>(weeks)));
  for (std::size_t t = 0; t < teams.size(); ++t) {
    for (const PlayerHistory* player : teams[t]) {
      const auto healthy = detail::healthy_weeks(*player);
      std::uniform_int_distribution<std::size_t> pick(0, healthy.size() - 1);
      for (int w = 0; w < weeks; ++w) team_weeks[t][w] += healthy[pick(rng)]->line;
    }
  }

  SeasonResult result;
  result.teams.resize(teams.size());
  for (int w = 0; w < weeks; ++w) {
    for (const auto& [a, b] : schedule[w]) {
      record_matchup(result.teams[a], result.teams[b], a, b, team_weeks[a][w], team_weeks[b][w]);
    }
  }
  for (auto& t : result.teams) t.record.tiebreak = rng();
  return result;
}

struct RotisserieResult {
  std::vector<std::array<double, kCategoryCount>> ranks;  // 1 = best; unscored categories are 0
  std::vector<double> totals;
  std::vector<int> order;  // lowest total first
};

// Ranks season totals per category; tied teams share the mean of the
// positions they span.
inline RotisserieResult rotisserie_standings(std::span<const TeamWeek> season_totals,
                                             std::span<const Category> categories = kAllCategories) {
  const std::size_t n = season_totals.size();
  RotisserieResult out;
  out.ranks.assign(n, {});
  out.totals.assign(n, 0.0);
  for (Category c : categories) {
    for (std::size_t i = 0; i < n; ++i) {
      int better = 0;
      int tied = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const int s = detail::compare_category(season_totals[j], season_totals[i], c);
        if (s > 0) ++better;
        if (s == 0) ++tied;
      }
      const double rank = 1.0 + better + 0.5 * tied;
      out.ranks[i][index(c)] = rank;
      out.totals[i] += rank;
    }
  }
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return out.totals[a] < out.totals[b]; });
  return out;
}

// Eligible players plus the static Z and G rankings every drafter uses.
struct League {
  std::vector<PlayerHistory> players;
  LeagueAggregates aggregates;
  PoolSelection pool;
  std::vector<ValueScore> z_scores;
  std::vector<ValueScore> g_scores;
  Ranking z_ranking;
  Ranking g_ranking;

  const Ranking& ranking(MetricKind m) const { return m == MetricKind::z ? z_ranking : g_ranking; }
};

inline League prepare_league(std::vector<PlayerHistory> players, int num_teams, int roster_size,
                             KappaMode kappa_mode = KappaMode::one,
                             PoolMode pool_mode = PoolMode::z_full_league) {
  League league;
  league.players = std::move(players);
  const auto q_size = static_cast<std::size_t>(num_teams) * static_cast<std::size_t>(roster_size);
  league.pool = select_pool(league.players, q_size, pool_mode, roster_size, kappa_mode);
  const auto members = pool_members(league.players, league.pool);
  league.aggregates = compute_aggregates(members, roster_size);
  league.z_scores = score_players(league.players, league.aggregates, MetricKind::z);
  league.g_scores = score_players(league.players, league.aggregates, MetricKind::g, kappa_mode);
  league.z_ranking = rank_order(league.z_scores);
  league.g_ranking = rank_order(league.g_scores);
  return league;
}

// Seat under test uses its metric; all other seats use the field metric.
inline std::vector<Roster> draft_for(const League& league, const DraftConfig& config) {
  config.validate(league.players.size());
  std::vector<Ranking> rankings;
  for (int s = 0; s < config.num_teams; ++s) {
    rankings.push_back(league.ranking(s == config.seat_under_test ? config.metric_under_test
                                                                  : config.field_metric));
  }
  return run_draft(config, rankings);
}

struct ExperimentResult {
  int seat = 0;
  int n_seasons = 0;
  int wins = 0;
  double win_rate = 0.0;
  double std_error = 0.0;
};

inline double binomial_std_error(double p, int n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0;
}

// Plays `n_seasons` independent seasons from one draft. Season s uses the
// stream derive_seed(base_seed, {seat, s}), so results do not depend on
// the thread count.
inline ExperimentResult run_experiment(const League& league, const DraftConfig& config,
                                       int n_seasons, ScoringFormat format,
                                       std::uint64_t base_seed, int weeks = 20,
                                       unsigned threads = 1) {
  if (n_seasons < 1) throw Error("n_seasons must be at least 1");
  const auto rosters = draft_for(league, config);
  std::vector<SeasonRoster> teams;
  for (const auto& r : rosters) {
    SeasonRoster t;
    for (std::size_t i : r) t.push_back(&league.players[i]);
    teams.push_back(std::move(t));
  }

  std::atomic<int> wins{0};
  auto work = [&](int begin, int end) {
    int local = 0;
    for (int s = begin; s < end; ++s) {
      Rng rng = make_rng(base_seed, {static_cast<std::uint64_t>(config.seat_under_test),
                                     static_cast<std::uint64_t>(s)});
      const auto season = play_season(teams, weeks, ScheduleMode::round_robin, rng);
      if (season.champion(format) == config.seat_under_test) ++local;
    }
    wins += local;
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_seasons)));
  if (threads == 1) {
    work(0, n_seasons);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (n_seasons + static_cast<int>(threads) - 1) / static_cast<int>(threads);
    for (int b = 0; b < n_seasons; b += chunk) pool.emplace_back(work, b, std::min(n_seasons, b + chunk));
  }

  ExperimentResult out;
  out.seat = config.seat_under_test;
  out.n_seasons = n_seasons;
  out.wins = wins.load();
  out.win_rate = static_cast<double>(out.wins) / n_seasons;
  out.std_error = binomial_std_error(out.win_rate, n_seasons);
  return out;
}

}  // namespace gscore
