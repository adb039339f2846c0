#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace relshot::llm {

enum class TemplateId {
  kBinaryRelation,
  kMultiRelation,
  kNerCheck,
  kParaphrase,
  kGenerate,
  kSummarize,
  kHybridPick,
  kSubjectObjectProbe,
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::kBinaryRelation, TemplateId::kMultiRelation, TemplateId::kNerCheck,
    TemplateId::kParaphrase,     TemplateId::kGenerate,      TemplateId::kSummarize,
    TemplateId::kHybridPick,     TemplateId::kSubjectObjectProbe,
};

std::string to_string(TemplateId id);
TemplateId template_from_string(const std::string& s);

/// Placeholder name -> text. Support sentences are bound one per key:
/// SUPPORT_SENTENCE_1 .. SUPPORT_SENTENCE_N, and for the multi-relation
/// template SUPPORT_SENTENCE_<r>_<i> alongside RELATION<r> and
/// RELATION_DESCRIPTION<r>.
using Bindings = std::map<std::string, std::string>;

/// Raw template text with #PLACEHOLDER# sites.
std::string_view template_body(TemplateId id);

/// FNV-1a of the template body; recorded in run manifests.
std::uint64_t template_hash(TemplateId id);

/// Order-independent hash of a binding map (keys are sorted by std::map).
std::uint64_t bindings_hash(const Bindings& b);

std::string hex64(std::uint64_t v);

/// Fills a template. Derived placeholders (support lists, counts, the
/// numbered output format) are computed from the bindings. Throws
/// UnboundPlaceholder when a required binding is missing.
std::string render_prompt(TemplateId id, const Bindings& bindings);

/// A rendered prompt plus what produced it, so transports that script
/// replies can key on the template and bindings.
struct Prompt {
  TemplateId id;
  Bindings bindings;
  std::string text;
};

Prompt make_prompt(TemplateId id, Bindings bindings);

}  // namespace relshot::llm
