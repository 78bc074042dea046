#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gscore/categories.hpp"
#include "gscore/ingest.hpp"

namespace gscore {

// A pool or player whose statistics make a score undefined (zero
// denominator, no attempts at all).
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what, std::vector<Category> categories = {})
      : Error(what), categories_(std::move(categories)) {}
  const std::vector<Category>& categories() const { return categories_; }

 private:
  std::vector<Category> categories_;
};

struct CountingProfile {
  double mean = 0.0;  // weekly mean
  double sd = 0.0;    // week-to-week population standard deviation
};

// Attempts and makes are kept as weekly means; the success rate is their
// ratio and is only meaningful when attempts_mean > 0.
struct PercentageProfile {
  double attempts_mean = 0.0;
  double made_mean = 0.0;
  double sd = 0.0;  // std of the volume-weighted weekly deviation

  double rate() const { return attempts_mean > 0.0 ? made_mean / attempts_mean : 0.0; }
};

struct PlayerProfile {
  std::string player_id;
  std::array<CountingProfile, kCountingCount> counting{};
  std::array<PercentageProfile, kPercentageCount> percentage{};
};

// Pool-level constants for one category. For counting categories `mean`,
// `between_sd` and `tau` are the weekly mean, the player-to-player standard
// deviation of means and the RMS of week-to-week deviations. For
// percentage categories `mean` is the composite success rate, `attempts_mean`
// the average weekly attempts, and `between_sd`/`tau` are measured on the
// volume-weighted scale (attempts / attempts_mean) * (rate - mean).
struct CategoryAggregate {
  double mean = 0.0;
  double between_sd = 0.0;
  double tau = 0.0;
  double attempts_mean = 0.0;
};

struct LeagueAggregates {
  std::vector<std::string> pool_ids;
  int roster_size = 13;
  std::array<CategoryAggregate, kCategoryCount> categories{};

  const CategoryAggregate& operator[](Category c) const { return categories[index(c)]; }
  CategoryAggregate& operator[](Category c) { return categories[index(c)]; }
  static constexpr int category_count() { return static_cast<int>(kCategoryCount); }
};

enum class KappaMode { exact, fixed_1_04, one };

inline KappaMode parse_kappa_mode(std::string_view s) {
  if (s == "exact") return KappaMode::exact;
  if (s == "1.04") return KappaMode::fixed_1_04;
  if (s == "1") return KappaMode::one;
  throw Error("unknown kappa mode '" + std::string(s) + "' (expected exact, 1.04 or 1)");
}

inline std::string_view to_string(KappaMode m) {
  switch (m) {
    case KappaMode::exact: return "exact";
    case KappaMode::fixed_1_04: return "1.04";
    case KappaMode::one: return "1";
  }
  return "exact";
}

struct Ratio {
  long long numerator;
  long long denominator;
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// 2N / (2N - 1) as an exact fraction.
inline Ratio kappa_ratio(int roster_size) {
  if (roster_size < 1) throw Error("roster size must be at least 1");
  return {2LL * roster_size, 2LL * roster_size - 1};
}

inline double kappa(int roster_size) {
  const Ratio r = kappa_ratio(roster_size);
  return static_cast<double>(r.numerator) / static_cast<double>(r.denominator);
}

inline double kappa(KappaMode mode, int roster_size) {
  switch (mode) {
    case KappaMode::exact: return kappa(roster_size);
    case KappaMode::fixed_1_04: return 1.04;
    case KappaMode::one: return 1.0;
  }
  return kappa(roster_size);
}

namespace detail {

// Population mean and standard deviation (divide by n).
struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Range>
MeanSd population_moments(const Range& values) {
  MeanSd out;
  const auto n = static_cast<double>(std::size(values));
  if (n == 0.0) return out;
  for (double v : values) out.mean += v;
  out.mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / n);
  return out;
}

template <typename Range>
double root_mean_square(const Range& values) {
  const auto n = static_cast<double>(std::size(values));
  if (n == 0.0) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += v * v;
  return std::sqrt(ss / n);
}

inline void require_pool(std::span<const PlayerHistory> pool) {
  if (pool.empty()) throw DegenerateError("empty player pool");
  for (const auto& h : pool) {
    if (h.weeks.empty()) throw DegenerateError("player '" + h.player_id + "' has no weeks");
  }
}

}  // namespace detail

inline CountingProfile counting_profile(const PlayerHistory& h, Category c) {
  if (h.weeks.empty()) throw DegenerateError("player '" + h.player_id + "' has no weeks");
  std::vector<double> values;
  values.reserve(h.weeks.size());
  for (const auto& w : h.weeks) values.push_back(w.line.count(c));
  const auto m = detail::population_moments(values);
  return {m.mean, m.sd};
}

// `pool_attempts_mean` and `pool_rate` scale the weekly deviation series, so
// the profile depends on the reference pool.
inline PercentageProfile percentage_profile(const PlayerHistory& h, Category c,
                                            double pool_attempts_mean, double pool_rate) {
  if (h.weeks.empty()) throw DegenerateError("player '" + h.player_id + "' has no weeks");
  PercentageProfile out;
  std::vector<double> deviations;
  deviations.reserve(h.weeks.size());
  for (const auto& w : h.weeks) {
    const Shots& s = w.line.shooting(c);
    out.attempts_mean += s.attempted;
    out.made_mean += s.made;
    // (attempts / pool attempts) * (rate - pool rate); zero when attempts are zero.
    deviations.push_back((s.made - s.attempted * pool_rate) / pool_attempts_mean);
  }
  const auto n = static_cast<double>(h.weeks.size());
  out.attempts_mean /= n;
  out.made_mean /= n;
  out.sd = detail::population_moments(deviations).sd;
  return out;
}

struct CountingMoments {
  std::vector<CountingProfile> players;
  double mean = 0.0;
  double between_sd = 0.0;
  double tau = 0.0;
};

inline CountingMoments counting_moments(std::span<const PlayerHistory> pool, Category c) {
  if (is_percentage(c)) throw Error("counting_moments called on a percentage category");
  detail::require_pool(pool);
  CountingMoments out;
  out.players.reserve(pool.size());
  std::vector<double> means;
  std::vector<double> sds;
  for (const auto& h : pool) {
    out.players.push_back(counting_profile(h, c));
    means.push_back(out.players.back().mean);
    sds.push_back(out.players.back().sd);
  }
  const auto m = detail::population_moments(means);
  out.mean = m.mean;
  out.between_sd = m.sd;
  out.tau = detail::root_mean_square(sds);
  return out;
}

struct PercentageMoments {
  std::vector<PercentageProfile> players;
  double attempts_mean = 0.0;
  double rate = 0.0;
  double between_sd = 0.0;
  double tau = 0.0;
};

inline PercentageMoments percentage_moments(std::span<const PlayerHistory> pool, Category c) {
  if (!is_percentage(c)) throw Error("percentage_moments called on a counting category");
  detail::require_pool(pool);

  double attempts_sum = 0.0;
  double made_sum = 0.0;
  for (const auto& h : pool) {
    double a = 0.0;
    double m = 0.0;
    for (const auto& w : h.weeks) {
      a += w.line.shooting(c).attempted;
      m += w.line.shooting(c).made;
    }
    const auto n = static_cast<double>(h.weeks.size());
    attempts_sum += a / n;
    made_sum += m / n;
  }
  if (attempts_sum <= 0.0) {
    throw DegenerateError("no attempts in category " + std::string(short_name(c)), {c});
  }

  PercentageMoments out;
  out.attempts_mean = attempts_sum / static_cast<double>(pool.size());
  // Attempt-weighted mean of per-player rates, i.e. total makes over total attempts.
  out.rate = made_sum / attempts_sum;

  std::vector<double> weighted_deviation;
  std::vector<double> sds;
  for (const auto& h : pool) {
    out.players.push_back(percentage_profile(h, c, out.attempts_mean, out.rate));
    const auto& p = out.players.back();
    weighted_deviation.push_back((p.made_mean - p.attempts_mean * out.rate) / out.attempts_mean);
    sds.push_back(p.sd);
  }
  out.between_sd = detail::population_moments(weighted_deviation).sd;
  out.tau = detail::root_mean_square(sds);
  return out;
}

inline LeagueAggregates compute_aggregates(std::span<const PlayerHistory> pool, int roster_size) {
  if (roster_size < 1) throw Error("roster size must be at least 1");
  LeagueAggregates agg;
  agg.roster_size = roster_size;
  agg.pool_ids.reserve(pool.size());
  for (const auto& h : pool) agg.pool_ids.push_back(h.player_id);
  for (Category c : kCountingCategories) {
    const auto m = counting_moments(pool, c);
    agg[c] = {m.mean, m.between_sd, m.tau, 0.0};
  }
  for (Category c : kPercentageCategories) {
    const auto m = percentage_moments(pool, c);
    agg[c] = {m.rate, m.between_sd, m.tau, m.attempts_mean};
  }
  return agg;
}

inline PlayerProfile make_profile(const PlayerHistory& h, const LeagueAggregates& agg) {
  PlayerProfile p;
  p.player_id = h.player_id;
  for (Category c : kCountingCategories) p.counting[index(c)] = counting_profile(h, c);
  for (Category c : kPercentageCategories) {
    p.percentage[percentage_index(c)] =
        percentage_profile(h, c, agg[c].attempts_mean, agg[c].mean);
  }
  return p;
}

struct ValueScore {
  std::string player_id;
  MetricKind kind = MetricKind::g;
  std::array<double, kCategoryCount> per_category{};
  double total = 0.0;

  double operator[](Category c) const { return per_category[index(c)]; }
};

namespace detail {

// Numerator of the per-category score: positive means better than average.
inline double score_numerator(const PlayerProfile& p, const LeagueAggregates& agg, Category c) {
  const auto& a = agg[c];
  if (is_percentage(c)) {
    const auto& pp = p.percentage[percentage_index(c)];
    return (pp.made_mean - pp.attempts_mean * a.mean) / a.attempts_mean;
  }
  const double diff = p.counting[index(c)].mean - a.mean;
  return lower_is_better(c) ? -diff : diff;
}

inline ValueScore score(const PlayerProfile& p, const LeagueAggregates& agg, double kappa_value,
                        MetricKind kind) {
  ValueScore out;
  out.player_id = p.player_id;
  out.kind = kind;
  std::vector<Category> degenerate;
  for (Category c : kAllCategories) {
    const auto& a = agg[c];
    const double tau_term = kind == MetricKind::g ? kappa_value * a.tau * a.tau : 0.0;
    const double denominator = std::sqrt(a.between_sd * a.between_sd + tau_term);
    if (!(denominator > 0.0) || (is_percentage(c) && !(a.attempts_mean > 0.0))) {
      degenerate.push_back(c);
      continue;
    }
    out.per_category[index(c)] = score_numerator(p, agg, c) / denominator;
  }
  if (!degenerate.empty()) {
    std::string names;
    for (Category c : degenerate) {
      if (!names.empty()) names += ", ";
      names += short_name(c);
    }
    throw DegenerateError("zero denominator in categories: " + names, std::move(degenerate));
  }
  for (double v : out.per_category) out.total += v;
  return out;
}

}  // namespace detail

inline ValueScore g_score(const PlayerProfile& p, const LeagueAggregates& agg,
                          KappaMode mode = KappaMode::exact) {
  return detail::score(p, agg, kappa(mode, agg.roster_size), MetricKind::g);
}

// G-score with every week-to-week term removed.
inline ValueScore z_score(const PlayerProfile& p, const LeagueAggregates& agg) {
  return detail::score(p, agg, 0.0, MetricKind::z);
}

inline ValueScore value_score(const PlayerProfile& p, const LeagueAggregates& agg, MetricKind kind,
                              KappaMode mode = KappaMode::exact) {
  return kind == MetricKind::z ? z_score(p, agg) : g_score(p, agg, mode);
}

// Slope of the linearised win probability per unit of score.
inline double win_probability_slope(int roster_size) {
  if (roster_size < 1) throw Error("roster size must be at least 1");
  return 1.0 / std::sqrt(std::numbers::pi * (roster_size - 0.5));
}

// First-order approximation before clamping; can leave [0, 1].
inline double win_probability_linear(double category_score, int roster_size) {
  return 0.5 * (1.0 + win_probability_slope(roster_size) * category_score);
}

inline double win_probability_counting(double category_score, int roster_size) {
  return std::clamp(win_probability_linear(category_score, roster_size), 0.0, 1.0);
}

struct DifferentialMoments {
  double mean = 0.0;      // E[team B rate - team A rate]
  double variance = 0.0;  // Var[team B rate - team A rate]
  double win_probability = 0.5;
  bool clamped = false;
};

// Moments of the percentage differential between a random team B and a
// team A that holds player `p` plus N - 1 random players.
inline DifferentialMoments percentage_differential_moments(const PlayerProfile& p,
                                                           const LeagueAggregates& agg,
                                                           Category c, int roster_size,
                                                           KappaMode mode = KappaMode::exact) {
  if (!is_percentage(c)) throw Error("percentage_differential_moments needs a percentage category");
  if (roster_size < 1) throw Error("roster size must be at least 1");
  const auto& a = agg[c];
  if (!(a.attempts_mean > 0.0)) throw DegenerateError("pool has no attempts", {c});
  const double n = roster_size;
  const double sigma2 = a.between_sd * a.between_sd;
  const double tau2 = a.tau * a.tau;

  DifferentialMoments out;
  out.variance = ((2.0 * n - 1.0) * sigma2 + 2.0 * n * tau2) / (n * n);
  if (!(out.variance > 0.0)) throw DegenerateError("zero-variance percentage differential", {c});

  const double numerator = detail::score_numerator(p, agg, c);
  out.mean = -numerator / n;
  const double k = kappa(mode, roster_size);
  const double g = numerator / std::sqrt(sigma2 + k * tau2);
  const double linear = win_probability_linear(g, roster_size);
  out.win_probability = std::clamp(linear, 0.0, 1.0);
  out.clamped = out.win_probability != linear;
  return out;
}

struct ExpectedCategories {
  double value = 0.0;     // expected categories won against a random opponent
  double marginal = 0.0;  // value above the |C| / 2 baseline
};

inline ExpectedCategories expected_categories_won(double total_score, int roster_size,
                                                  int category_count) {
  if (category_count < 1) throw Error("category count must be at least 1");
  ExpectedCategories out;
  out.marginal = 0.5 * win_probability_slope(roster_size) * total_score;
  out.value = 0.5 * category_count + out.marginal;
  return out;
}

inline ExpectedCategories expected_categories_won(const ValueScore& score, int roster_size,
                                                  int category_count) {
  return expected_categories_won(score.total, roster_size, category_count);
}

// Scores every player against one set of aggregates.
inline std::vector<ValueScore> score_players(std::span<const PlayerHistory> players,
                                             const LeagueAggregates& agg, MetricKind kind,
                                             KappaMode mode = KappaMode::exact) {
  std::vector<ValueScore> out;
  out.reserve(players.size());
  for (const auto& h : players) out.push_back(value_score(make_profile(h, agg), agg, kind, mode));
  return out;
}

// Indices ordered by total descending, ties broken by ascending player id.
inline std::vector<std::size_t> rank_order(std::span<const ValueScore> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].total != scores[b].total) return scores[a].total > scores[b].total;
    return scores[a].player_id < scores[b].player_id;
  });
  return order;
}

}  // namespace gscore
