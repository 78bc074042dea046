// gscore command-line front end.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "gscore/pool.hpp"
#include "gscore/report.hpp"
#include "gscore/service.hpp"
#include "gscore/sim.hpp"
#include "gscore/synth.hpp"

using namespace gscore;

namespace {

struct DataArgs {
  std::string input;
  bool synthetic = false;
  std::uint64_t synth_seed = 2023;
  int min_weeks = 10;

  void add(CLI::App* cmd, bool allow_synthetic = true) {
    auto* in = cmd->add_option("--input", input, "Weekly game log CSV")->check(CLI::ExistingFile);
    cmd->add_option("--min-weeks", min_weeks, "Minimum healthy weeks for eligibility")->capture_default_str();
    if (allow_synthetic) {
      auto* syn = cmd->add_flag("--synthetic", synthetic, "Use the built-in synthetic league");
      cmd->add_option("--synth-seed", synth_seed, "Seed for --synthetic")->capture_default_str();
      in->excludes(syn);
    }
  }

  // All parsed histories, before eligibility filtering.
  std::vector<PlayerHistory> raw() const {
    if (input.empty()) {
      if (!synthetic) throw Error("no dataset: pass --input <path> or --synthetic");
      return generate_league({.seed = synth_seed});
    }
    std::ifstream in(input, std::ios::binary);
    if (!in) throw Error("cannot open " + input);
    return parse_game_log(in);
  }

  std::vector<PlayerHistory> eligible() const { return filter_eligible(raw(), min_weeks); }
};

// Writes to --out when given, otherwise stdout.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

httplib::Server* active_server = nullptr;

void stop_server(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Player valuation and draft simulation for head-to-head fantasy basketball"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a game log and summarise the eligible pool");
  DataArgs ingest_data;
  ingest_data.add(ingest, false);
  ingest->get_option("--input")->required();

  // rank
  auto* rank = app.add_subcommand("rank", "Score and rank players");
  DataArgs rank_data;
  rank_data.add(rank);
  std::string rank_metric = "g", rank_kappa = "exact", rank_pool = "z", rank_output = "csv", rank_out;
  int rank_teams = 12, rank_roster = 13;
  std::size_t rank_top = 0;
  rank->add_option("--metric", rank_metric, "z or g")->capture_default_str();
  rank->add_option("--teams", rank_teams)->capture_default_str();
  rank->add_option("--roster", rank_roster)->capture_default_str();
  rank->add_option("--kappa", rank_kappa, "exact, 1.04 or 1")->capture_default_str();
  rank->add_option("--pool-mode", rank_pool, "z or equilibrium")->capture_default_str();
  rank->add_option("--output", rank_output, "csv or md")->capture_default_str();
  rank->add_option("--top", rank_top, "Only print the first n rows (0 = all)");
  rank->add_option("--out", rank_out, "Write to a file instead of stdout");

  // pool
  auto* pool = app.add_subcommand("pool", "Select the reference pool Q");
  DataArgs pool_data;
  pool_data.add(pool);
  std::string pool_mode = "z", pool_kappa = "exact";
  std::size_t q_size = 156;
  int pool_roster = 13;
  pool->add_option("--mode", pool_mode, "z or equilibrium")->capture_default_str();
  pool->add_option("--q-size", q_size)->capture_default_str();
  pool->add_option("--roster", pool_roster, "Roster size used for kappa")->capture_default_str();
  pool->add_option("--kappa", pool_kappa)->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run draft-and-season experiments");
  DataArgs sim_data;
  sim_data.add(simulate);
  int sim_teams = 12, sim_roster = 13, sim_weeks = 20, sim_seasons = 1000;
  std::string sim_seat = "all", sim_metric = "g", sim_field = "z", sim_format = "each", sim_output = "csv",
              sim_kappa = "1", sim_pool = "z", sim_out;
  std::uint64_t sim_seed = 2023;
  unsigned sim_threads = default_threads();
  simulate->add_option("--teams", sim_teams)->capture_default_str();
  simulate->add_option("--roster", sim_roster)->capture_default_str();
  simulate->add_option("--weeks", sim_weeks)->capture_default_str();
  simulate->add_option("--seasons", sim_seasons, "Seasons per seat")->capture_default_str();
  simulate->add_option("--seat", sim_seat, "Seat index or 'all'")->capture_default_str();
  simulate->add_option("--metric", sim_metric, "Metric of the drafter under test")->capture_default_str();
  simulate->add_option("--field", sim_field, "Metric of the other drafters")->capture_default_str();
  simulate->add_option("--format", sim_format, "each or most")->capture_default_str();
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--output", sim_output, "csv or md")->capture_default_str();
  simulate->add_option("--kappa", sim_kappa, "Kappa used for G rankings")->capture_default_str();
  simulate->add_option("--pool-mode", sim_pool)->capture_default_str();
  simulate->add_option("--threads", sim_threads)->capture_default_str();
  simulate->add_option("--out", sim_out, "Write to a file instead of stdout");

  // report
  auto* report = app.add_subcommand("report", "Render result tables");
  report->require_subcommand(1);
  auto* denominators = report->add_subcommand("denominators", "Z and G denominators per category");
  DataArgs den_data;
  den_data.add(denominators);
  std::string den_kappa = "1", den_pool = "z", den_output = "md", den_out;
  int den_teams = 12, den_roster = 13;
  denominators->add_option("--teams", den_teams)->capture_default_str();
  denominators->add_option("--roster", den_roster)->capture_default_str();
  denominators->add_option("--kappa", den_kappa)->capture_default_str();
  denominators->add_option("--pool-mode", den_pool)->capture_default_str();
  denominators->add_option("--output", den_output, "csv or md")->capture_default_str();
  denominators->add_option("--out", den_out);
  auto* experiment = report->add_subcommand("experiment", "Re-render a simulate CSV");
  std::string exp_input, exp_output = "md", exp_out;
  experiment->add_option("--input", exp_input, "CSV written by simulate")->required()->check(CLI::ExistingFile);
  experiment->add_option("--output", exp_output, "csv or md")->capture_default_str();
  experiment->add_option("--out", exp_out);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the draft-room HTTP service");
  DataArgs serve_data;
  serve_data.add(serve);
  std::string bind = "127.0.0.1", serve_kappa = "exact", serve_pool = "z", serve_log;
  int port = 8080, serve_teams = 12, serve_roster = 13;
  serve->add_option("--bind", bind)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--teams", serve_teams, "Default league size")->capture_default_str();
  serve->add_option("--roster", serve_roster)->capture_default_str();
  serve->add_option("--kappa", serve_kappa)->capture_default_str();
  serve->add_option("--pool-mode", serve_pool)->capture_default_str();
  serve->add_option("--log", serve_log, "Append-only session log, replayed on start");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic weekly game log");
  SynthConfig synth_config;
  std::string synth_out;
  synth->add_option("--players", synth_config.players)->capture_default_str();
  synth->add_option("--weeks", synth_config.weeks)->capture_default_str();
  synth->add_option("--seed", synth_config.seed)->capture_default_str();
  synth->add_option("--out", synth_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto raw = ingest_data.raw();
      const auto eligible = filter_eligible(raw, ingest_data.min_weeks);
      std::size_t rows = 0, injured = 0;
      for (const auto& h : raw) {
        rows += h.weeks.size();
        for (const auto& w : h.weeks) injured += w.injured ? 1 : 0;
      }
      std::cout << "rows: " << rows << "\nplayers: " << raw.size() << "\ninjured weeks: " << injured
                << "\neligible players (>= " << ingest_data.min_weeks << " healthy weeks): " << eligible.size()
                << "\n";
      if (!eligible.empty()) {
        const auto agg = compute_aggregates(eligible, 13);
        std::cout << "\ncategory,mean,between_sd,tau\n";
        for (Category c : kAllCategories) {
          const auto& a = agg[c];
          std::cout << short_name(c) << ',' << detail::fixed(a.mean, 4) << ',' << detail::fixed(a.between_sd, 4)
                    << ',' << detail::fixed(a.tau, 4) << '\n';
        }
      }
      return 0;
    }

    if (*rank) {
      const auto metric = parse_metric(rank_metric);
      const auto kappa_mode = parse_kappa_mode(rank_kappa);
      const auto format = parse_render_format(rank_output);
      const auto players = rank_data.eligible();
      const auto q = static_cast<std::size_t>(rank_teams) * static_cast<std::size_t>(rank_roster);
      const auto selection = select_pool(players, q, parse_pool_mode(rank_pool), rank_roster, kappa_mode);
      const auto agg = compute_aggregates(pool_members(players, selection), rank_roster);
      const auto scores = score_players(players, agg, metric, kappa_mode);
      const auto order = rank_order(scores);

      std::vector<std::string> header{"rank", "player_id"};
      for (Category c : kAllCategories) header.emplace_back(short_name(c));
      header.emplace_back("total");
      std::vector<std::vector<std::string>> rows;
      const std::size_t limit = rank_top == 0 ? order.size() : std::min(rank_top, order.size());
      for (std::size_t i = 0; i < limit; ++i) {
        const auto& s = scores[order[i]];
        std::vector<std::string> row{std::to_string(i + 1), s.player_id};
        for (Category c : kAllCategories) row.push_back(detail::fixed(s[c], 3));
        row.push_back(detail::fixed(s.total, 3));
        rows.push_back(std::move(row));
      }
      emit(detail::render_table(header, rows, format), rank_out);
      return 0;
    }

    if (*pool) {
      const auto players = pool_data.eligible();
      const auto s = select_pool(players, q_size, parse_pool_mode(pool_mode), pool_roster,
                                 parse_kappa_mode(pool_kappa));
      std::cout << "# mode=" << to_string(s.mode) << " q=" << s.pool_ids.size()
                << " iterations=" << s.iterations_used << " converged=" << (s.converged ? "true" : "false")
                << '\n';
      for (const auto& id : s.pool_ids) std::cout << id << '\n';
      return 0;
    }

    if (*simulate) {
      const auto format = parse_format(sim_format);
      const auto render_format = parse_render_format(sim_output);
      DraftConfig base;
      base.num_teams = sim_teams;
      base.roster_size = sim_roster;
      base.metric_under_test = parse_metric(sim_metric);
      base.field_metric = parse_metric(sim_field);
      const auto league = prepare_league(sim_data.eligible(), sim_teams, sim_roster, parse_kappa_mode(sim_kappa),
                                         parse_pool_mode(sim_pool));
      std::vector<int> seats;
      if (sim_seat == "all") {
        for (int s = 0; s < sim_teams; ++s) seats.push_back(s);
      } else {
        seats.push_back(std::stoi(sim_seat));
      }
      ExperimentReport out;
      for (int seat : seats) {
        DraftConfig config = base;
        config.seat_under_test = seat;
        const auto r = run_experiment(league, config, sim_seasons, format, sim_seed, sim_weeks, sim_threads);
        out.rows.push_back({seat, config.metric_under_test, config.field_metric, format, r.n_seasons, r.wins});
      }
      emit(render(out, render_format), sim_out);
      return 0;
    }

    if (*denominators) {
      const auto kappa_mode = parse_kappa_mode(den_kappa);
      const auto players = den_data.eligible();
      const auto q = static_cast<std::size_t>(den_teams) * static_cast<std::size_t>(den_roster);
      const auto selection = select_pool(players, q, parse_pool_mode(den_pool), den_roster, kappa_mode);
      const auto agg = compute_aggregates(pool_members(players, selection), den_roster);
      const auto table = denominator_table(agg, kappa(kappa_mode, den_roster), std::string(to_string(selection.mode)));
      emit(render(table, parse_render_format(den_output)), den_out);
      return 0;
    }

    if (*experiment) {
      std::ifstream in(exp_input, std::ios::binary);
      emit(render(parse_experiment_csv(in), parse_render_format(exp_output)), exp_out);
      return 0;
    }

    if (*serve) {
      DraftService::Options options;
      options.default_teams = serve_teams;
      options.default_roster = serve_roster;
      options.kappa_mode = parse_kappa_mode(serve_kappa);
      options.pool_mode = parse_pool_mode(serve_pool);
      if (!serve_log.empty()) options.log_path = serve_log;
      std::unique_ptr<DraftService> service;
      if (serve_data.input.empty() && !serve_data.synthetic) {
        service = std::make_unique<DraftService>(options);
      } else {
        service = std::make_unique<DraftService>(serve_data.eligible(), options);
      }
      httplib::Server server;
      mount_routes(server, *service);
      active_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      std::cerr << "listening on " << bind << ':' << port << " (" << service->players().size() << " players)\n";
      if (!server.listen(bind, port)) throw Error("cannot listen on " + bind + ":" + std::to_string(port));
      return 0;
    }

    if (*synth) {
      std::ostringstream out;
      write_game_log(out, generate_league(synth_config));
      emit(out.str(), synth_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
