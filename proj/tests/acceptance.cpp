// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gscore/metrics.hpp"
#include "gscore/report.hpp"
#include "gscore/sim.hpp"
#include "gscore/synth.hpp"
#include "oracles.hpp"
#include "scoring_examples.hpp"
#include "support.hpp"

using namespace gscore;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.ok) ++failures;
  std::printf("%s  %s:%s (%.2fs)\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.str().c_str(), secs);
  std::fflush(stdout);
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

void scoring_fixtures(Check& c) {
  using namespace examples;
  // Aggregation and category outcomes.
  const auto a = aggregate_team_week(std::span<const StatLine>(team_a_lines()));
  const auto b = aggregate_team_week(std::span<const StatLine>(team_b_lines()));
  c.expect(a.count(Category::points) == 58 && a.count(Category::turnovers) == 5, "team A counting totals");
  c.expect(a.shooting(Category::free_throw) == Shots{11, 17}, "team A FT 11/17");
  c.expect(b.count(Category::points) == 40 && b.count(Category::turnovers) == 3, "team B counting totals");
  c.expect(b.shooting(Category::free_throw) == Shots{9, 13}, "team B FT rows sum to 9/13");
  const auto o = score_matchup(a, b);
  c.expect(o[index(Category::points)] == Outcome::win, "A wins points");
  c.expect(o[index(Category::turnovers)] == Outcome::loss, "A loses turnovers");
  c.expect(o[index(Category::free_throw)] == Outcome::loss, "A loses FT% (64.7 vs 69.2)");
  c.detail << " agg A 58/5/11-17, B 40/3/9-13 (printed 9/14 is inconsistent with its rows);";

  // Rotisserie order B, A, C, D.
  const auto roto = rotisserie_standings(rotisserie_totals(), kRotisserieCategories);
  c.expect(roto.totals == std::vector<double>{7, 5, 8, 10}, "rotisserie rank sums");
  c.expect(roto.order == std::vector<int>{1, 0, 2, 3}, "rotisserie order B,A,C,D");
  c.detail << " roto BACD;";

  // Season standings under both formats.
  const auto season = scripted_season();
  const std::vector<std::pair<int, int>> cats{{10, 17}, {11, 16}, {17, 10}, {16, 11}};
  const std::vector<std::pair<int, int>> weeks{{1, 2}, {0, 3}, {2, 1}, {3, 0}};
  for (int t = 0; t < 4; ++t) {
    const auto& r = season.teams[t].record;
    c.expect(r.wins == cats[t].first && r.losses == cats[t].second, "each-category totals");
    c.expect(r.weeks_won == weeks[t].first && r.weeks_lost == weeks[t].second, "most-categories totals");
  }
  c.expect(season.standings(ScoringFormat::each_category) == std::vector<int>{2, 3, 1, 0}, "each order C,D,B,A");
  c.expect(season.standings(ScoringFormat::most_categories) == std::vector<int>{3, 2, 0, 1}, "most order D,C,A,B");
  c.detail << " each CDBA, most DCAB;";

  // Snake positions for six teams, four rounds.
  const auto order = snake_order(6, 4);
  std::vector<std::vector<int>> picks(6);
  for (std::size_t i = 0; i < order.size(); ++i) picks[order[i]].push_back(static_cast<int>(i) + 1);
  c.expect(picks[0] == std::vector<int>{1, 12, 13, 24}, "seat 1 picks");
  c.expect(picks[5] == std::vector<int>{6, 7, 18, 19}, "seat 6 picks");
  for (int s = 0; s < 6; ++s) {
    c.expect(picks[s] == std::vector<int>{s + 1, 12 - s, 13 + s, 24 - s}, "snake row");
  }
  c.detail << " snake 6x4 ok";
}

void kappa_values(Check& c) {
  const auto k13 = kappa_ratio(13);
  const auto k12 = kappa_ratio(12);
  c.expect(k13 == Ratio{26, 25}, "kappa(13) == 26/25");
  c.expect(k12 == Ratio{24, 23}, "kappa(12) == 24/23");
  c.expect(kappa(13) == 26.0 / 25.0, "kappa(13) double");
  c.detail << " kappa(13)=" << k13.numerator << "/" << k13.denominator << "=" << kappa(13)
           << ", kappa(12)=" << k12.numerator << "/" << k12.denominator;
}

void standard_error(Check& c) {
  const double se = binomial_std_error(0.5, 1000);
  c.expect(std::abs(se - std::sqrt(0.25 / 1000.0)) < 1e-15, "sqrt(p(1-p)/n)");
  c.expect(std::abs(se - 0.0158) < 5e-5, "approx 0.0158");
  // And as reported by an experiment run.
  ExperimentReport r;
  r.rows.push_back({0, MetricKind::g, MetricKind::z, ScoringFormat::each_category, 1000, 500});
  c.expect(std::abs(r.aggregate().std_error - se) < 1e-15, "reported SE");
  c.detail << " se(0.5, 1000)=" << se;
}

void counting_oracle(Check& c) {
  constexpr int kN = 13;
  constexpr long kSamples = 1'000'000;
  const auto pool = oracle::normal_counting_pool(11, 156, 40, 30.0, 4.0, 6.0);
  const auto agg = compute_aggregates(pool, kN);
  const auto g = score_players(pool, agg, MetricKind::g);

  // Ten (player, category) cases with |G| <= 0.5, cycling through categories.
  struct Case {
    std::size_t player;
    Category category;
    double predicted = 0.0;
    double observed = 0.0;
  };
  std::vector<Case> cases;
  std::size_t next = 0;
  for (std::size_t k = 0; cases.size() < 10 && k < 10 * pool.size(); ++k) {
    const Category cat = kCountingCategories[cases.size() % kCountingCategories.size()];
    const std::size_t i = next++ % pool.size();
    const double gp = g[i][cat];
    if (std::abs(gp) > 0.5 || std::abs(gp) < 0.1) continue;
    cases.push_back({i, cat, win_probability_counting(gp, kN)});
  }
  c.expect(cases.size() == 10, "ten eligible cases");

  std::vector<std::jthread> workers;
  const unsigned n_workers = worker_count();
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t k = w; k < cases.size(); k += n_workers) {
        auto& cs = cases[k];
        cs.observed = oracle::counting_win_rate(pool, cs.player, cs.category, kN, kSamples, 1000 + k).win_rate;
      }
    });
  }
  workers.clear();

  double worst = 0.0;
  for (const auto& cs : cases) worst = std::max(worst, std::abs(cs.observed - cs.predicted));
  c.expect(worst <= 0.02, "max |empirical - closed form| <= 0.02");
  c.detail << " " << cases.size() << " cases x 1e6 matchups, max abs diff " << worst;
}

void percentage_oracle(Check& c) {
  constexpr int kN = 13;
  const auto pool = oracle::shooting_pool(5, 156, 40);
  const auto agg = compute_aggregates(pool, kN);
  const auto d = percentage_differential_moments(make_profile(pool.back(), agg), agg, Category::field_goal, kN);
  const auto e = oracle::percentage_differential(pool, pool.size() - 1, Category::field_goal, kN, 1'000'000, 9);
  const double mean_err = std::abs(e.mean / d.mean - 1.0);
  const double var_err = std::abs(e.variance / d.variance - 1.0);
  c.expect(mean_err <= 0.02, "D_mu within 2%");
  c.expect(var_err <= 0.02, "D_sigma2 within 2%");
  c.detail << " D_mu rel err " << mean_err << ", D_sigma2 rel err " << var_err;
}

void z_equals_g_on_constant_lines(Check& c) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto pool = fixtures::random_pool(seed, 20, 5);
    for (auto& h : pool) {
      for (auto& w : h.weeks) w.line = h.weeks.front().line;
    }
    const auto agg = compute_aggregates(pool, 13);
    for (const auto& h : pool) {
      const auto p = make_profile(h, agg);
      const auto z = z_score(p, agg);
      for (KappaMode mode : {KappaMode::exact, KappaMode::fixed_1_04, KappaMode::one}) {
        const auto gs = g_score(p, agg, mode);
        for (Category cat : kAllCategories) worst = std::max(worst, rel_diff(z[cat], gs[cat]));
        worst = std::max(worst, rel_diff(z.total, gs.total));
      }
    }
  }
  c.expect(worst <= 1e-9, "max relative difference <= 1e-9");
  c.detail << " 100 constant pools, max rel diff " << worst;
}

void invariant_suites(Check& c) {
  Rng rng = make_rng(1234);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  std::uniform_real_distribution<double> shift(-5.0, 50.0);
  double worst_sum = 0.0;
  double worst_affine = 0.0;
  int rank_changes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pool = fixtures::random_pool(seed);
    const auto agg = compute_aggregates(pool, 13);
    for (MetricKind kind : {MetricKind::z, MetricKind::g}) {
      const auto scores = score_players(pool, agg, kind);
      for (Category cat : kAllCategories) {
        double sum = 0.0;
        double mag = 0.0;
        for (const auto& s : scores) {
          sum += s[cat];
          mag += std::abs(s[cat]);
        }
        worst_sum = std::max(worst_sum, std::abs(sum) / mag);
      }
    }

    auto moved = pool;
    for (Category cat : kCountingCategories) {
      const double a = scale(rng);
      const double b = shift(rng);
      for (auto& h : moved) {
        for (auto& w : h.weeks) w.line.count(cat) = a * w.line.count(cat) + b;
      }
    }
    const auto agg1 = compute_aggregates(moved, 13);
    for (MetricKind kind : {MetricKind::z, MetricKind::g}) {
      const auto before = score_players(pool, agg, kind);
      const auto after = score_players(moved, agg1, kind);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        for (Category cat : kAllCategories) worst_affine = std::max(worst_affine, rel_diff(before[i][cat], after[i][cat]));
      }
      if (rank_order(before) != rank_order(after)) ++rank_changes;
    }
  }
  c.expect(worst_sum <= 1e-9, "zero-sum");
  c.expect(worst_affine <= 1e-9, "affine invariance of scores");
  c.expect(rank_changes == 0, "affine invariance of rankings");
  c.detail << " 100 pools, zero-sum rel " << worst_sum << ", affine rel " << worst_affine << ", rank changes "
           << rank_changes;
}

const League& experiment_league() {
  static const League league =
      prepare_league(filter_eligible(generate_league({}), 10), 12, 13, KappaMode::one, PoolMode::z_full_league);
  return league;
}

ExperimentReport all_seats(MetricKind metric, MetricKind field, ScoringFormat format) {
  constexpr int kSeasons = 200;
  ExperimentReport report;
  for (int seat = 0; seat < 12; ++seat) {
    DraftConfig config;
    config.seat_under_test = seat;
    config.metric_under_test = metric;
    config.field_metric = field;
    const auto r = run_experiment(experiment_league(), config, kSeasons, format, 2023, 20, worker_count());
    report.rows.push_back({seat, metric, field, format, r.n_seasons, r.wins});
  }
  return report;
}

void describe(Check& c, const char* label, const ExperimentSummary& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " %s %.2f%% (se %.2f%%);", label, 100.0 * s.win_rate, 100.0 * s.std_error);
  c.detail << buf;
}

void experiment_direction(Check& c, ScoringFormat format) {
  constexpr double kBaseline = 1.0 / 12.0;
  const auto g_vs_z = all_seats(MetricKind::g, MetricKind::z, format).aggregate();
  const auto z_vs_g = all_seats(MetricKind::z, MetricKind::g, format).aggregate();
  c.expect(g_vs_z.win_rate >= kBaseline + 3.0 * g_vs_z.std_error, "lone G above baseline by 3 SE");
  c.expect(z_vs_g.win_rate <= kBaseline - 3.0 * z_vs_g.std_error, "lone Z below baseline by 3 SE");
  describe(c, "G vs Z field", g_vs_z);
  describe(c, "Z vs G field", z_vs_g);
}

void self_play(Check& c) {
  constexpr double kBaseline = 1.0 / 12.0;
  for (ScoringFormat format : {ScoringFormat::each_category, ScoringFormat::most_categories}) {
    const auto s = all_seats(MetricKind::g, MetricKind::g, format).aggregate();
    c.expect(std::abs(s.win_rate - kBaseline) <= 3.0 * s.std_error, "within 3 SE of 1/12");
    describe(c, format == ScoringFormat::each_category ? "each" : "most", s);
  }
}

void denominator_report(Check& c) {
  const auto row = denominator_row(Category::steals, 1.01, 4.20, 1.0);
  const double pct = 100.0 * row.ratio;
  c.expect(std::abs(pct - 44.0) <= 1.0, "ratio 44% +/- 1 point");
  DenominatorReport report;
  report.rows.push_back(row);
  const auto csv = render(report, RenderFormat::csv);
  c.expect(csv.find("stl,1.0100,4.2000,1.0050,2.2825,44.03") != std::string::npos, "rendered row");
  c.detail << " ratio " << pct << "%";
}

}  // namespace

int main() {
  run("scoring fixtures (aggregation, rotisserie, standings, snake)", scoring_fixtures);
  run("kappa exact ratios", kappa_values);
  run("binomial standard error", standard_error);
  run("closed form vs Monte Carlo: counting win probability", counting_oracle);
  run("closed form vs Monte Carlo: percentage differential moments", percentage_oracle);
  run("Z equals G on constant weekly lines", z_equals_g_on_constant_lines);
  run("zero-sum and affine invariance suites", invariant_suites);
  run("experiment direction, each category", [](Check& c) { experiment_direction(c, ScoringFormat::each_category); });
  run("experiment direction, most categories", [](Check& c) { experiment_direction(c, ScoringFormat::most_categories); });
  run("self-play calibration G vs G field", self_play);
  run("denominator report", denominator_report);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
