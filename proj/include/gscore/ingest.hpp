#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gscore/categories.hpp"

namespace gscore {

// Successes over attempts for one percentage category.
struct Shots {
  double made = 0.0;
  double attempted = 0.0;

  friend bool operator==(const Shots&, const Shots&) = default;
};

// Raw statistics for one player-week or one team-week.
struct StatLine {
  std::array<double, kCountingCount> counting{};
  std::array<Shots, kPercentageCount> shots{};

  double count(Category c) const { return counting[index(c)]; }
  double& count(Category c) { return counting[index(c)]; }
  const Shots& shooting(Category c) const { return shots[percentage_index(c)]; }
  Shots& shooting(Category c) { return shots[percentage_index(c)]; }

  StatLine& operator+=(const StatLine& other) {
    for (std::size_t i = 0; i < kCountingCount; ++i) counting[i] += other.counting[i];
    for (std::size_t i = 0; i < kPercentageCount; ++i) {
      shots[i].made += other.shots[i].made;
      shots[i].attempted += other.shots[i].attempted;
    }
    return *this;
  }

  friend bool operator==(const StatLine&, const StatLine&) = default;
};

struct PlayerWeek {
  std::string player_id;
  int week = 0;
  bool injured = false;
  StatLine line;

  friend bool operator==(const PlayerWeek&, const PlayerWeek&) = default;
};

struct PlayerHistory {
  std::string player_id;
  std::vector<PlayerWeek> weeks;

  std::size_t healthy_weeks() const {
    return static_cast<std::size_t>(std::count_if(
        weeks.begin(), weeks.end(), [](const PlayerWeek& w) { return !w.injured; }));
  }

  friend bool operator==(const PlayerHistory&, const PlayerHistory&) = default;
};

// Malformed input. `line()` is 1-based and counts the header row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a data invariant (made > attempted,
// duplicate player-week).
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

inline constexpr std::string_view kGameLogHeader =
    "player_id,week,injured,pts,reb,ast,stl,blk,tpm,tov,fgm,fga,ftm,fta";

enum class GameLogFormat { csv };

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_stat(std::string_view field, std::string_view column, std::size_t line) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError(line, "column '" + std::string(column) + "': not a number: '" +
                               std::string(field) + "'");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw ParseError(line, "column '" + std::string(column) +
                               "': statistics must be finite and non-negative");
  }
  return value;
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Parses a weekly game log. Histories come back in order of first
// appearance; weeks keep their file order.
inline std::vector<PlayerHistory> parse_game_log(std::istream& source,
                                                 GameLogFormat = GameLogFormat::csv) {
  std::vector<PlayerHistory> histories;
  std::unordered_map<std::string, std::size_t> slot;
  std::unordered_set<std::string> seen_weeks;

  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(source, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kGameLogHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kGameLogHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    const auto fields = detail::split_csv(line);
    if (fields.size() != 14) {
      throw ParseError(line_no, "expected 14 columns, got " + std::to_string(fields.size()));
    }
    PlayerWeek week;
    week.player_id = std::string(detail::trim(fields[0]));
    if (week.player_id.empty()) throw ParseError(line_no, "empty player_id");

    const auto week_field = detail::trim(fields[1]);
    auto [wptr, wec] =
        std::from_chars(week_field.data(), week_field.data() + week_field.size(), week.week);
    if (wec != std::errc{} || wptr != week_field.data() + week_field.size() ||
        week_field.empty() || week.week < 0) {
      throw ParseError(line_no, "week must be a non-negative integer");
    }

    const auto injured = detail::trim(fields[2]);
    if (injured == "0") {
      week.injured = false;
    } else if (injured == "1") {
      week.injured = true;
    } else {
      throw ParseError(line_no, "injured must be 0 or 1");
    }

    static constexpr std::array<std::string_view, 11> columns{
        "pts", "reb", "ast", "stl", "blk", "tpm", "tov", "fgm", "fga", "ftm", "fta"};
    std::array<double, 11> values{};
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = detail::parse_stat(detail::trim(fields[3 + i]), columns[i], line_no);
    }
    for (std::size_t i = 0; i < kCountingCount; ++i) week.line.counting[i] = values[i];
    week.line.shots[0] = {values[7], values[8]};
    week.line.shots[1] = {values[9], values[10]};
    if (values[7] > values[8]) throw ValidationError(line_no, "fgm exceeds fga");
    if (values[9] > values[10]) throw ValidationError(line_no, "ftm exceeds fta");

    const std::string key = week.player_id + '\x1f' + std::to_string(week.week);
    if (!seen_weeks.insert(key).second) {
      throw ValidationError(line_no, "duplicate week " + std::to_string(week.week) +
                                         " for player '" + week.player_id + "'");
    }

    auto [it, inserted] = slot.try_emplace(week.player_id, histories.size());
    if (inserted) histories.push_back(PlayerHistory{week.player_id, {}});
    histories[it->second].weeks.push_back(std::move(week));
  }
  return histories;
}

inline void write_game_log(std::ostream& out, std::span<const PlayerHistory> histories) {
  out << kGameLogHeader << '\n';
  for (const auto& h : histories) {
    for (const auto& w : h.weeks) {
      out << w.player_id << ',' << w.week << ',' << (w.injured ? '1' : '0');
      for (double v : w.line.counting) out << ',' << detail::format_number(v);
      for (const auto& s : w.line.shots) {
        out << ',' << detail::format_number(s.made) << ',' << detail::format_number(s.attempted);
      }
      out << '\n';
    }
  }
}

// Keeps players with at least `min_weeks` healthy weeks, dropping their
// injured weeks.
inline std::vector<PlayerHistory> filter_eligible(std::span<const PlayerHistory> histories,
                                                  int min_weeks) {
  if (min_weeks < 1) throw Error("min_weeks must be at least 1");
  std::vector<PlayerHistory> out;
  for (const auto& h : histories) {
    if (h.healthy_weeks() < static_cast<std::size_t>(min_weeks)) continue;
    PlayerHistory kept{h.player_id, {}};
    std::copy_if(h.weeks.begin(), h.weeks.end(), std::back_inserter(kept.weeks),
                 [](const PlayerWeek& w) { return !w.injured; });
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace gscore
