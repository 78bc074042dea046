#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gscore {

// The nine standard categories. Counting categories come first, in CSV
// column order, followed by the two percentage categories.
enum class Category : std::uint8_t {
  points,
  rebounds,
  assists,
  steals,
  blocks,
  threes,
  turnovers,
  field_goal,
  free_throw,
};

inline constexpr std::size_t kCountingCount = 7;
inline constexpr std::size_t kPercentageCount = 2;
inline constexpr std::size_t kCategoryCount = kCountingCount + kPercentageCount;

inline constexpr std::array<Category, kCategoryCount> kAllCategories{
    Category::points,   Category::rebounds,  Category::assists,
    Category::steals,   Category::blocks,    Category::threes,
    Category::turnovers, Category::field_goal, Category::free_throw};

inline constexpr std::array<Category, kCountingCount> kCountingCategories{
    Category::points, Category::rebounds, Category::assists, Category::steals,
    Category::blocks, Category::threes,   Category::turnovers};

inline constexpr std::array<Category, kPercentageCount> kPercentageCategories{
    Category::field_goal, Category::free_throw};

constexpr std::size_t index(Category c) { return static_cast<std::size_t>(c); }

constexpr bool is_percentage(Category c) {
  return index(c) >= kCountingCount;
}

// Index into the percentage arrays (0 = field goals, 1 = free throws).
constexpr std::size_t percentage_index(Category c) {
  return index(c) - kCountingCount;
}

constexpr bool lower_is_better(Category c) { return c == Category::turnovers; }

// Short machine name, used in CSV headers and JSON keys.
constexpr std::string_view short_name(Category c) {
  constexpr std::array<std::string_view, kCategoryCount> names{
      "pts", "reb", "ast", "stl", "blk", "tpm", "tov", "fg_pct", "ft_pct"};
  return names[index(c)];
}

constexpr std::string_view display_name(Category c) {
  constexpr std::array<std::string_view, kCategoryCount> names{
      "Points", "Rebounds", "Assists",         "Steals",         "Blocks",
      "Threes", "Turnovers", "Field Goal %", "Free Throw %"};
  return names[index(c)];
}

inline std::optional<Category> category_from_name(std::string_view name) {
  for (Category c : kAllCategories) {
    if (short_name(c) == name) return c;
  }
  return std::nullopt;
}

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MetricKind : std::uint8_t { z, g };

constexpr std::string_view to_string(MetricKind m) {
  return m == MetricKind::z ? "z" : "g";
}

inline MetricKind parse_metric(std::string_view s) {
  if (s == "z") return MetricKind::z;
  if (s == "g") return MetricKind::g;
  throw Error("unknown metric '" + std::string(s) + "' (expected z or g)");
}

}  // namespace gscore
