#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "relshot/embed/vector_index.hpp"
#include "relshot/llm/decoding.hpp"
#include "relshot/select/strategy.hpp"

namespace relshot::pipeline {

enum class InferenceMode { kBinary, kMultiClass };
enum class NerMode { kOff, kDeterministic, kLlm, kDeterministicThenLlm };

std::string to_string(InferenceMode m);
std::string to_string(NerMode m);
InferenceMode inference_mode_from_string(const std::string& s);
NerMode ner_mode_from_string(const std::string& s);

inline constexpr double kDefaultTau = 0.6;

struct RunConfig {
  select::SelectionStrategy strategy;
  double tau = kDefaultTau;
  InferenceMode inference_mode = InferenceMode::kBinary;
  NerMode ner = NerMode::kDeterministicThenLlm;
  llm::DecodingProfile decoding = llm::DecodingProfile::qwen();
  std::uint64_t seed = 0;
  int parallelism = 1;

  /// Throws InvalidConfig.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);

/// Read-only retrieval inputs bound to one run. Both are required by the
/// retrieval strategies and ignored otherwise.
struct Stores {
  const embed::VectorIndex* candidates = nullptr;
  const embed::SupportVectors* supports = nullptr;
};

}  // namespace relshot::pipeline
