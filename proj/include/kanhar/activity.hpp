#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace kanhar {

// Fixed class order; confusion matrices and label indices follow it.
enum class Activity : int {
  kDownstairs = 0,
  kUpstairs = 1,
  kWalking = 2,
  kJogging = 3,
  kSitting = 4,
  kStanding = 5,
};

inline constexpr int kNumActivities = 6;

std::span<const std::string_view> activity_names();
std::string_view activity_name(Activity a);
std::optional<Activity> activity_from_name(std::string_view name);

// MotionSense directory prefixes: dws, ups, wlk, jog, sit, std.
std::optional<Activity> activity_from_prefix(std::string_view prefix);

}  // namespace kanhar
