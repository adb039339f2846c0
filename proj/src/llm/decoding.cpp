#include "relshot/llm/decoding.hpp"

#include "relshot/core/errors.hpp"

namespace relshot::llm {

void DecodingProfile::validate() const {
  if (max_new_tokens < 1 || max_new_tokens > kMaxNewTokensCap) {
    throw InvalidConfig("max_new_tokens must be in [1, " +
                        std::to_string(kMaxNewTokensCap) + "]");
  }
  if (temperature < 0.0) throw InvalidConfig("temperature must be non-negative");
  if (top_p <= 0.0 || top_p > 1.0) throw InvalidConfig("top_p must be in (0, 1]");
  if (top_k && *top_k < 1) throw InvalidConfig("top_k must be positive");
}

DecodingProfile DecodingProfile::qwen() {
  return {"qwen", 0.6, 0.95, 20, kMaxNewTokensCap, true};
}

DecodingProfile DecodingProfile::gemma() {
  return {"gemma", 1.0, 0.95, 64, kMaxNewTokensCap, true};
}

DecodingProfile DecodingProfile::greedy() {
  return {"greedy", 0.0, 1.0, std::nullopt, kMaxNewTokensCap, false};
}

DecodingProfile DecodingProfile::preset(const std::string& name) {
  if (name == "qwen") return qwen();
  if (name == "gemma") return gemma();
  if (name == "greedy") return greedy();
  throw InvalidConfig("unknown decoding preset '" + name + "' (qwen, gemma, greedy)");
}

nlohmann::json to_json(const DecodingProfile& p) {
  nlohmann::json j = {{"name", p.name},
                      {"temperature", p.temperature},
                      {"top_p", p.top_p},
                      {"max_new_tokens", p.max_new_tokens},
                      {"sampling", p.sampling}};
  j["top_k"] = p.top_k ? nlohmann::json(*p.top_k) : nlohmann::json();
  return j;
}

}  // namespace relshot::llm
