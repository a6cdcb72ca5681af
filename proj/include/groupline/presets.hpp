#pragma once

#include <array>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "groupline/error.hpp"

namespace groupline {

/// Shipped operating point: decision threshold plus optional time-decay constant.
struct Preset {
  std::string_view name;
  std::optional<double> lambda;
  double threshold;
};

inline constexpr std::array<Preset, 4> kPresets{{
    {"zero-shot", std::nullopt, 0.23},
    {"zero-shot-time", 0.15, 0.14},
    {"swap", std::nullopt, 0.0012},
    {"swap-time", 0.07, 0.00056},
}};

inline const Preset& find_preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

/// Preset files: {"threshold": T} or {"lambda": l, "threshold": T}.
inline Preset preset_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("threshold")) throw ConfigError("preset file needs a 'threshold'");
  Preset p{"file", std::nullopt, j["threshold"].get<double>()};
  if (j.contains("lambda")) p.lambda = j["lambda"].get<double>();
  return p;
}

}  // namespace groupline
