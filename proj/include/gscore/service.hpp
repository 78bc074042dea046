#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "gscore/metrics.hpp"
#include "gscore/pool.hpp"
#include "gscore/sim.hpp"

namespace gscore {

enum class ServiceErrorCode { bad_request, not_found, conflict, no_dataset };

inline std::string_view to_string(ServiceErrorCode c) {
  switch (c) {
    case ServiceErrorCode::bad_request: return "bad_request";
    case ServiceErrorCode::not_found: return "not_found";
    case ServiceErrorCode::conflict: return "conflict";
    case ServiceErrorCode::no_dataset: return "no_dataset";
  }
  return "bad_request";
}

class ServiceError : public Error {
 public:
  ServiceError(ServiceErrorCode code, const std::string& what) : Error(what), code_(code) {}
  ServiceErrorCode code() const { return code_; }
  int http_status() const {
    switch (code_) {
      case ServiceErrorCode::bad_request: return 400;
      case ServiceErrorCode::not_found: return 404;
      case ServiceErrorCode::conflict: return 409;
      case ServiceErrorCode::no_dataset: return 409;
    }
    return 400;
  }

 private:
  ServiceErrorCode code_;
};

struct SessionConfig {
  int teams = 12;
  int roster = 13;
  int my_seat = 0;
};

struct Pick {
  int overall = 0;  // 1-based
  int seat = 0;
  std::string player_id;
};

struct SessionState {
  std::string id;
  SessionConfig config;
  std::vector<Pick> picks;
  std::size_t available_count = 0;

  int total_picks() const { return config.teams * config.roster; }
  bool complete() const { return static_cast<int>(picks.size()) == total_picks(); }
};

// Draft board: one row per round, one column per seat. Cells hold the
// overall pick number and the player taken there, if any.
struct BoardCell {
  int overall = 0;
  std::optional<std::string> player_id;
};

inline std::vector<std::vector<BoardCell>> board_layout(const SessionState& s) {
  std::vector<std::vector<BoardCell>> rows(static_cast<std::size_t>(s.config.roster),
                                           std::vector<BoardCell>(static_cast<std::size_t>(s.config.teams)));
  const auto order = snake_order(s.config.teams, s.config.roster);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& cell = rows[k / s.config.teams][order[k]];
    cell.overall = static_cast<int>(k) + 1;
    if (k < s.picks.size()) cell.player_id = s.picks[k].player_id;
  }
  return rows;
}

struct Recommendation {
  int rank = 0;
  ValueScore score;
  double marginal_value = 0.0;
};

struct WhatIf {
  std::string player_id;
  std::array<double, kCategoryCount> probabilities{};
  double expected_categories = 0.0;
  double marginal = 0.0;
  bool clamped = false;
};

// Draft-room backend: rankings for a loaded dataset plus live draft
// sessions. Sessions are event-sourced; with a log path every create and
// pick is appended to a JSON-lines file and replayed on construction.
class DraftService {
 public:
  struct Options {
    int default_teams = 12;
    int default_roster = 13;
    KappaMode kappa_mode = KappaMode::exact;
    PoolMode pool_mode = PoolMode::z_full_league;
    std::optional<std::filesystem::path> log_path;
  };

  explicit DraftService(Options options) : options_(std::move(options)) { replay(); }

  DraftService(std::vector<PlayerHistory> eligible, Options options)
      : options_(std::move(options)), players_(std::move(eligible)), has_dataset_(true) {
    for (std::size_t i = 0; i < players_.size(); ++i) index_.emplace(players_[i].player_id, i);
    replay();
  }

  bool has_dataset() const { return has_dataset_; }
  const std::vector<PlayerHistory>& players() const { return players_; }

  SessionState create_session(const SessionConfig& config) {
    require_dataset();
    validate(config);
    std::unique_lock lock(sessions_mutex_);
    const std::string id = "s" + std::to_string(++session_counter_);
    append_log({{"type", "create"},
                {"session", id},
                {"teams", config.teams},
                {"roster", config.roster},
                {"my_seat", config.my_seat}});
    auto session = std::make_shared<Session>();
    session->id = id;
    session->config = config;
    session->order = snake_order(config.teams, config.roster);
    sessions_.emplace(id, session);
    return snapshot(*session);
  }

  SessionState get_session(const std::string& id) const {
    auto s = find(id);
    std::shared_lock lock(s->mutex);
    return snapshot(*s);
  }

  SessionState record_pick(const std::string& id, const std::string& player_id) {
    auto s = find(id);
    std::unique_lock lock(s->mutex);
    apply_pick(*s, player_id, true);
    return snapshot(*s);
  }

  std::vector<Recommendation> recommendations(const std::string& id, MetricKind metric,
                                              std::size_t top_k) const {
    auto s = find(id);
    std::unordered_set<std::string> drafted;
    SessionConfig config;
    {
      std::shared_lock lock(s->mutex);
      drafted = s->drafted;
      config = s->config;
    }
    const auto& league = league_for(config.teams, config.roster);
    const auto& scores = metric == MetricKind::z ? league.z_scores : league.g_scores;
    const auto& order = league.ranking(metric);
    std::vector<Recommendation> out;
    for (std::size_t i : order) {
      if (out.size() >= top_k) break;
      if (drafted.contains(players_[i].player_id)) continue;
      Recommendation r;
      r.rank = static_cast<int>(out.size()) + 1;
      r.score = scores[i];
      r.marginal_value =
          expected_categories_won(league.g_scores[i], config.roster, LeagueAggregates::category_count())
              .marginal;
      out.push_back(std::move(r));
    }
    return out;
  }

  // Per-category win probabilities against a random opponent if the
  // candidate joins an otherwise random team.
  WhatIf whatif(const std::string& id, const std::string& player_id) const {
    auto s = find(id);
    SessionConfig config;
    {
      std::shared_lock lock(s->mutex);
      if (s->drafted.contains(player_id)) {
        throw ServiceError(ServiceErrorCode::conflict, "player '" + player_id + "' already drafted");
      }
      config = s->config;
    }
    const auto idx = player_index(player_id);
    const auto& league = league_for(config.teams, config.roster);
    const auto& g = league.g_scores[idx];
    WhatIf out;
    out.player_id = player_id;
    for (Category c : kAllCategories) {
      const double linear = win_probability_linear(g[c], config.roster);
      out.probabilities[index(c)] = std::clamp(linear, 0.0, 1.0);
      out.clamped = out.clamped || linear != out.probabilities[index(c)];
      out.expected_categories += out.probabilities[index(c)];
    }
    out.marginal = out.expected_categories - 0.5 * LeagueAggregates::category_count();
    return out;
  }

  // Global ranking for the default league size.
  std::vector<Recommendation> rankings(MetricKind metric) const {
    require_dataset();
    const auto& league = league_for(options_.default_teams, options_.default_roster);
    const auto& scores = metric == MetricKind::z ? league.z_scores : league.g_scores;
    std::vector<Recommendation> out;
    for (std::size_t i : league.ranking(metric)) {
      Recommendation r;
      r.rank = static_cast<int>(out.size()) + 1;
      r.score = scores[i];
      r.marginal_value = expected_categories_won(league.g_scores[i], options_.default_roster,
                                                 LeagueAggregates::category_count())
                             .marginal;
      out.push_back(std::move(r));
    }
    return out;
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
  }

 private:
  struct Session {
    mutable std::shared_mutex mutex;
    std::string id;
    SessionConfig config;
    std::vector<int> order;
    std::vector<Pick> picks;
    std::unordered_set<std::string> drafted;
  };

  void require_dataset() const {
    if (!has_dataset_) throw ServiceError(ServiceErrorCode::no_dataset, "no dataset loaded");
  }

  void validate(const SessionConfig& c) const {
    if (c.teams < 2) throw ServiceError(ServiceErrorCode::bad_request, "teams must be at least 2");
    if (c.roster < 1) throw ServiceError(ServiceErrorCode::bad_request, "roster must be at least 1");
    if (c.my_seat < 0 || c.my_seat >= c.teams) {
      throw ServiceError(ServiceErrorCode::bad_request, "my_seat out of range");
    }
    if (static_cast<std::size_t>(c.teams) * static_cast<std::size_t>(c.roster) > players_.size()) {
      throw ServiceError(ServiceErrorCode::bad_request, "league larger than the player pool");
    }
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(ServiceErrorCode::not_found, "unknown session '" + id + "'");
    return it->second;
  }

  std::size_t player_index(const std::string& player_id) const {
    auto it = index_.find(player_id);
    if (it == index_.end()) {
      throw ServiceError(ServiceErrorCode::not_found, "unknown player '" + player_id + "'");
    }
    return it->second;
  }

  // Caller holds the session's writer lock.
  void apply_pick(Session& s, const std::string& player_id, bool persist) {
    player_index(player_id);
    if (static_cast<int>(s.picks.size()) == s.config.teams * s.config.roster) {
      throw ServiceError(ServiceErrorCode::conflict, "session complete");
    }
    if (s.drafted.contains(player_id)) {
      throw ServiceError(ServiceErrorCode::conflict, "player '" + player_id + "' already drafted");
    }
    if (persist) append_log({{"type", "pick"}, {"session", s.id}, {"player", player_id}});
    const int overall = static_cast<int>(s.picks.size()) + 1;
    s.picks.push_back({overall, s.order[overall - 1], player_id});
    s.drafted.insert(player_id);
  }

  SessionState snapshot(const Session& s) const {
    SessionState out;
    out.id = s.id;
    out.config = s.config;
    out.picks = s.picks;
    out.available_count = players_.size() - s.drafted.size();
    return out;
  }

  const League& league_for(int teams, int roster) const {
    std::lock_guard lock(league_mutex_);
    const auto key = std::make_pair(teams, roster);
    auto it = leagues_.find(key);
    if (it == leagues_.end()) {
      it = leagues_
               .emplace(key, std::make_unique<League>(prepare_league(players_, teams, roster,
                                                                     options_.kappa_mode,
                                                                     options_.pool_mode)))
               .first;
    }
    return *it->second;
  }

  void append_log(const nlohmann::json& event) {
    if (!options_.log_path) return;
    std::lock_guard lock(log_mutex_);
    std::ofstream out(*options_.log_path, std::ios::app);
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw Error("failed to append to session log " + options_.log_path->string());
  }

  void replay() {
    if (!options_.log_path || !std::filesystem::exists(*options_.log_path)) return;
    std::ifstream in(*options_.log_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto event = nlohmann::json::parse(line);
      const std::string type = event.at("type");
      const std::string id = event.at("session");
      if (type == "create") {
        auto s = std::make_shared<Session>();
        s->id = id;
        s->config = {event.at("teams"), event.at("roster"), event.at("my_seat")};
        s->order = snake_order(s->config.teams, s->config.roster);
        sessions_.emplace(id, s);
        session_counter_ = std::max(session_counter_, std::stoi(id.substr(1)));
      } else if (type == "pick") {
        apply_pick(*sessions_.at(id), event.at("player"), false);
      }
    }
  }

  Options options_;
  std::vector<PlayerHistory> players_;
  std::unordered_map<std::string, std::size_t> index_;
  bool has_dataset_ = false;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  int session_counter_ = 0;

  mutable std::mutex league_mutex_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<League>> leagues_;

  std::mutex log_mutex_;
};

// JSON encodings used by the HTTP API.
namespace api {

using nlohmann::json;

inline json scores_json(const ValueScore& s) {
  json out = json::object();
  for (Category c : kAllCategories) out[std::string(short_name(c))] = s[c];
  return out;
}

inline json to_json(const SessionState& s) {
  json picks = json::array();
  for (const auto& p : s.picks) {
    picks.push_back({{"overall", p.overall}, {"seat", p.seat}, {"player_id", p.player_id}});
  }
  json out{{"id", s.id},
           {"config", {{"teams", s.config.teams}, {"roster", s.config.roster}, {"my_seat", s.config.my_seat}}},
           {"picks", picks},
           {"available_count", s.available_count},
           {"total_picks", s.total_picks()},
           {"complete", s.complete()}};
  json board = json::array();
  for (const auto& row : board_layout(s)) {
    json cells = json::array();
    for (const auto& cell : row) {
      cells.push_back({{"overall", cell.overall},
                       {"player_id", cell.player_id ? json(*cell.player_id) : json(nullptr)}});
    }
    board.push_back(cells);
  }
  out["board"] = board;
  if (s.complete()) {
    out["on_clock"] = nullptr;
  } else {
    const int overall = static_cast<int>(s.picks.size()) + 1;
    const int round = (overall - 1) / s.config.teams;
    const int pos = (overall - 1) % s.config.teams;
    const int seat = round % 2 == 0 ? pos : s.config.teams - 1 - pos;
    out["on_clock"] = {{"overall", overall}, {"round", round + 1}, {"seat", seat}};
  }
  return out;
}

inline json to_json(const Recommendation& r) {
  return {{"rank", r.rank},
          {"player_id", r.score.player_id},
          {"metric", std::string(to_string(r.score.kind))},
          {"total", r.score.total},
          {"scores", scores_json(r.score)},
          {"marginal_value", r.marginal_value}};
}

inline json to_json(const WhatIf& w) {
  json probs = json::object();
  for (Category c : kAllCategories) probs[std::string(short_name(c))] = w.probabilities[index(c)];
  return {{"player_id", w.player_id},
          {"probabilities", probs},
          {"expected_categories", w.expected_categories},
          {"marginal", w.marginal},
          {"clamped", w.clamped}};
}

inline json error_json(std::string_view code, const std::string& message) {
  return {{"code", std::string(code)}, {"message", message}};
}

}  // namespace api

// Registers the draft-room routes on `server`. The service must outlive it.
inline void mount_routes(httplib::Server& server, DraftService& service) {
  using nlohmann::json;
  auto send = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  auto guarded = [send](auto handler) {
    return [send, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const ServiceError& e) {
        send(res, e.http_status(), api::error_json(to_string(e.code()), e.what()));
      } catch (const json::exception& e) {
        send(res, 400, api::error_json("bad_request", e.what()));
      } catch (const Error& e) {
        send(res, 400, api::error_json("bad_request", e.what()));
      }
    };
  };
  auto metric_param = [](const httplib::Request& req) {
    return parse_metric(req.has_param("metric") ? req.get_param_value("metric") : "g");
  };

  server.Post("/sessions", guarded([&service, send](const httplib::Request& req, httplib::Response& res) {
    const json body = req.body.empty() ? json::object() : json::parse(req.body);
    SessionConfig c;
    c.teams = body.value("teams", c.teams);
    c.roster = body.value("roster", c.roster);
    c.my_seat = body.value("my_seat", c.my_seat);
    send(res, 201, api::to_json(service.create_session(c)));
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, api::to_json(service.get_session(req.matches[1])));
  }));

  server.Post(R"(/sessions/([^/]+)/picks)",
              guarded([&service, send](const httplib::Request& req, httplib::Response& res) {
                const json body = json::parse(req.body);
                const std::string player = body.at("player_id");
                send(res, 200, api::to_json(service.record_pick(req.matches[1], player)));
              }));

  server.Get(R"(/sessions/([^/]+)/recommendations)",
             guarded([&service, send, metric_param](const httplib::Request& req, httplib::Response& res) {
               const std::size_t top =
                   req.has_param("top") ? std::stoul(req.get_param_value("top")) : 25;
               json out = json::array();
               for (const auto& r : service.recommendations(req.matches[1], metric_param(req), top)) {
                 out.push_back(api::to_json(r));
               }
               send(res, 200, out);
             }));

  server.Get(R"(/sessions/([^/]+)/whatif/([^/]+))",
             guarded([&service, send](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, api::to_json(service.whatif(req.matches[1], req.matches[2])));
             }));

  server.Get("/players", guarded([&service, send](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& p : service.players()) {
      out.push_back({{"player_id", p.player_id}, {"weeks", p.weeks.size()}});
    }
    send(res, 200, out);
  }));

  server.Get("/rankings",
             guarded([&service, send, metric_param](const httplib::Request& req, httplib::Response& res) {
               json out = json::array();
               for (const auto& r : service.rankings(metric_param(req))) out.push_back(api::to_json(r));
               send(res, 200, out);
             }));
}

}  // namespace gscore
