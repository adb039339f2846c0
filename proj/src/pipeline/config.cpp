#include "relshot/pipeline/config.hpp"

#include "relshot/core/errors.hpp"

namespace relshot::pipeline {

std::string to_string(InferenceMode m) {
  return m == InferenceMode::kBinary ? "binary" : "multi-class";
}

std::string to_string(NerMode m) {
  switch (m) {
    case NerMode::kOff: return "off";
    case NerMode::kDeterministic: return "deterministic";
    case NerMode::kLlm: return "llm";
    case NerMode::kDeterministicThenLlm: return "deterministic-then-llm";
  }
  return "off";
}

InferenceMode inference_mode_from_string(const std::string& s) {
  if (s == "binary") return InferenceMode::kBinary;
  if (s == "multi-class") return InferenceMode::kMultiClass;
  throw InvalidConfig("unknown inference mode '" + s + "' (binary, multi-class)");
}

NerMode ner_mode_from_string(const std::string& s) {
  if (s == "off") return NerMode::kOff;
  if (s == "deterministic") return NerMode::kDeterministic;
  if (s == "llm") return NerMode::kLlm;
  if (s == "deterministic-then-llm") return NerMode::kDeterministicThenLlm;
  throw InvalidConfig("unknown NER filter mode '" + s +
                      "' (off, deterministic, llm, deterministic-then-llm)");
}

void RunConfig::validate() const {
  strategy.validate();
  decoding.validate();
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidConfig("tau must be in [0, 1]");
  if (parallelism < 1) throw InvalidConfig("parallelism must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"strategy", select::to_json(c.strategy)},
          {"tau", c.tau},
          {"inference_mode", to_string(c.inference_mode)},
          {"ner", to_string(c.ner)},
          {"decoding", llm::to_json(c.decoding)},
          {"seed", c.seed}};
}

}  // namespace relshot::pipeline
