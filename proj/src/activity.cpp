#include "kanhar/activity.hpp"

#include <array>

namespace kanhar {

namespace {
constexpr std::array<std::string_view, kNumActivities> kNames = {
    "downstairs", "upstairs", "walking", "jogging", "sitting", "standing"};
constexpr std::array<std::string_view, kNumActivities> kPrefixes = {
    "dws", "ups", "wlk", "jog", "sit", "std"};
}  // namespace

std::span<const std::string_view> activity_names() { return kNames; }

std::string_view activity_name(Activity a) {
  return kNames[static_cast<std::size_t>(a)];
}

std::optional<Activity> activity_from_name(std::string_view name) {
  for (int i = 0; i < kNumActivities; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<Activity>(i);
    }
  }
  return std::nullopt;
}

std::optional<Activity> activity_from_prefix(std::string_view prefix) {
  for (int i = 0; i < kNumActivities; ++i) {
    if (kPrefixes[static_cast<std::size_t>(i)] == prefix) {
      return static_cast<Activity>(i);
    }
  }
  return std::nullopt;
}

}  // namespace kanhar
