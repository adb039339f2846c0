#pragma once

#include <optional>
#include <string>

#include "json.hpp"

namespace relshot::llm {

inline constexpr int kMaxNewTokensCap = 1000;

struct DecodingProfile {
  std::string name = "greedy";
  double temperature = 0.0;
  double top_p = 1.0;
  std::optional<int> top_k;
  int max_new_tokens = kMaxNewTokensCap;
  bool sampling = false;

  /// Throws InvalidConfig.
  void validate() const;

  /// temperature 0.6, top-p 0.95, top-k 20, sampling on.
  static DecodingProfile qwen();
  /// temperature 1.0, top-p 0.95, top-k 64, sampling on.
  static DecodingProfile gemma();
  static DecodingProfile greedy();
  static DecodingProfile preset(const std::string& name);
};

nlohmann::json to_json(const DecodingProfile& p);

}  // namespace relshot::llm
