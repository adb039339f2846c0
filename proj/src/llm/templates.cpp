#include "relshot/llm/templates.hpp"

#include <cctype>
#include <cstdio>
#include <optional>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"

namespace relshot::llm {
namespace {

constexpr std::string_view kBinaryRelation =
    R"(You are given below a Relation name, a Description of the relation between brackets, #N# Support sentences exemplifying the relation, and a Query sentence.

A relation connects the Subject and the Object entities. The Subject and the Object entities are indicated with the subject and object tags respectively. You need to decide whether the relation holds between the Subject and the Object of the Query sentence.

Relation name: "#RELATION#" (#RELATION_DESCRIPTION#)
#SUPPORT_LIST#

Query Sentence: #QUERY_SENTENCE#

If the relation holds between the Subject and Object in the Query sentence, say "yes", otherwise say "no." Just output "yes" or "no," and nothing else.)";

constexpr std::string_view kMultiRelation =
    R"(You are given below five Relation names, the Description of the relations between brackets, #N# Support sentences exemplifying each relation, and a Query sentence.

A relation connects the Subject and the Object entities. The Subject and the Object entities are indicated with the subject and object tags respectively. You need to decide whether the relation holds between the Subject and the Object of the Query sentence.

#RELATION_BLOCKS#

Query Sentence: #QUERY_SENTENCE#

If the relation holds between the Subject and Object in the Query sentence, say "yes", otherwise say "no." Just output "yes" or "no," and nothing else.)";

constexpr std::string_view kNerCheck =
    R"(You are given below a sentence, an entity contained within the sentence, and an entity type:

Sentence: #SENTENCE#
Entity: #ENTITY#
Entity Type: #ENTITY_TYPE#

Your task is to decide whether the Entity in the context of the Sentence either:
1. belongs to the entity type "#ENTITY_TYPE#"
or,
2. is a co-reference (such as a pronoun or other co-referring expression) that points to an entity that belongs to the entity type "#ENTITY_TYPE#"

Only answer "yes" or "no," nothing else.)";

constexpr std::string_view kParaphrase =
    R"(You are given below a Relation name, a Description of the relation, and a support sentence exemplifying the relation.

A relation connects two entities: the Subject and the Object entities in the sentence. The Subject and the Object are indicated with the <subject>..</subject> and <object>..</object> tags respectively.

Relation name: "#RELATION#"
Relation description: "#RELATION_DESCRIPTION#"
Support Sentence: #SUPPORT_SENTENCE#

Your task is to generate #N# paraphrases of the support sentence that hold the same relation between the same Subject and Object entities. In each paraphrase, you must include the subject and object tags to identify the Subject and the Object.

Output in the following format:
#PARAPHRASE_FORMAT#)";

constexpr std::string_view kGenerate =
    R"(You are given below a Relation name, the Description of the relation, and a support sentence exemplifying the relation.

A relation connects two entities: the Subject and the Object entities in the sentence. The Subject and the Object are indicated with the <subject>..</subject> and <object>..</object> tags respectively.

Relation name: "#RELATION#"
Relation description: "#RELATION_DESCRIPTION#"
Support Sentence: #SUPPORT_SENTENCE#

Your task is to generate #N# completely different new examples that hold the same relation. You must follow these guidelines:
1. In each example, include subject and object tags to identify the Subject and the Object entities.
2. To increase diversity, use different words, phrases, and sentence structures across different examples.

Output in the following format:
#EXAMPLE_FORMAT#)";

constexpr std::string_view kSummarize =
    R"(You are given a context sentence containing a Subject and an Object entity.

The Subject and Object entities are marked using <subject> and <object> tags, respectively.

Your task is to summarize the relation expressed between the Subject and the Object in the context.

Context: #SUPPORT_SENTENCE#

You must retain the <subject> and <object> tags in the summarized output.

Only output the summarized relation between the Subject and the Object, and nothing else.)";

constexpr std::string_view kHybridPick =
    R"(You are given below a Relation name, a Description of the relation between brackets, and #N# Support sentences exemplifying the relation.

A relation connects the Subject and the Object entities. The Subject and the Object entities are marked within the subject and object tags respectively.

Relation name: "#RELATION#" (#RELATION_DESCRIPTION#)
#SUPPORT_LIST#

Your task is to pick #N_HALF# support sentences that maximize diversity. In other words, you should pick support sentences that use different words, phrases, and sentence structures.

Output your best picks as a Python-style list of the #N_HALF# IDs of the support sentences (e.g., [1, 4, 6, 7]).
Only output the list and nothing else.)";

constexpr std::string_view kSubjectObjectProbe =
    R"(You are given below a Relation name, a Description of the relation in brackets, a Support sentence (example sentence) that holds the given relation between the Subject and the Object, and a Query (a subject and an object).

A relation connects the Subject and the Object. The Subject and the Object are given within the subject and object tags respectively. You need to decide whether the relation between the Subject and the Object of the given Query holds the given relation or not.

Relation name: "#RELATION#" (#RELATION_DESCRIPTION#)
#SUPPORT_LIST#

Query Subject: #SUBJECT#

Query Object: #OBJECT#

If the relation between the subject and the object of the Query matches the given Relation given say yes, otherwise no.)";

struct Entry {
  TemplateId id;
  const char* name;
  std::string_view body;
};

constexpr Entry kEntries[] = {
    {TemplateId::kBinaryRelation, "binary-relation", kBinaryRelation},
    {TemplateId::kMultiRelation, "multi-relation", kMultiRelation},
    {TemplateId::kNerCheck, "ner-check", kNerCheck},
    {TemplateId::kParaphrase, "paraphrase", kParaphrase},
    {TemplateId::kGenerate, "generate", kGenerate},
    {TemplateId::kSummarize, "summarize", kSummarize},
    {TemplateId::kHybridPick, "hybrid-pick", kHybridPick},
    {TemplateId::kSubjectObjectProbe, "subject-object-probe", kSubjectObjectProbe},
};

const Entry& entry(TemplateId id) {
  for (const auto& e : kEntries) {
    if (e.id == id) return e;
  }
  throw Error("unknown template id");
}

std::string ordinal(std::size_t n) {
  const std::size_t mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

std::string two_digits(std::size_t n) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%02zu", n);
  return buf;
}

class Renderer {
 public:
  explicit Renderer(const Bindings& b) : b_(b) {}

  std::string render(std::string_view body) const {
    std::string out;
    out.reserve(body.size() + 256);
    std::size_t pos = 0;
    while (pos < body.size()) {
      const std::size_t open = body.find('#', pos);
      if (open == std::string_view::npos) break;
      const std::size_t close = body.find('#', open + 1);
      if (close == std::string_view::npos) break;
      const std::string_view name = body.substr(open + 1, close - open - 1);
      if (!is_name(name)) {
        out.append(body.substr(pos, open + 1 - pos));
        pos = open + 1;
        continue;
      }
      out.append(body.substr(pos, open - pos));
      out.append(resolve(std::string(name)));
      pos = close + 1;
    }
    out.append(body.substr(pos));
    return out;
  }

 private:
  static bool is_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!(std::isupper(static_cast<unsigned char>(c)) ||
            std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
        return false;
    }
    return true;
  }

  std::optional<std::string> find(const std::string& key) const {
    const auto it = b_.find(key);
    if (it == b_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& need(const std::string& key) const {
    const auto it = b_.find(key);
    if (it == b_.end()) throw UnboundPlaceholder("unbound placeholder #" + key + "#");
    return it->second;
  }

  std::size_t count_supports(const std::string& prefix) const {
    std::size_t n = 0;
    while (b_.count(prefix + std::to_string(n + 1))) ++n;
    return n;
  }

  std::string support_list(const std::string& prefix) const {
    const std::size_t n = count_supports(prefix);
    if (n == 0) throw UnboundPlaceholder("unbound placeholder #" + prefix + "1#");
    std::string out;
    for (std::size_t i = 1; i <= n; ++i) {
      if (i > 1) out += '\n';
      out += "Support Sentence " + std::to_string(i) + ": " + need(prefix + std::to_string(i));
    }
    return out;
  }

  std::size_t count() const {
    if (auto n = find("N")) return static_cast<std::size_t>(std::stoul(*n));
    std::size_t supports = count_supports("SUPPORT_SENTENCE_");
    if (supports == 0) supports = count_supports("SUPPORT_SENTENCE_1_");
    if (supports == 0) throw UnboundPlaceholder("unbound placeholder #N#");
    return supports;
  }

  std::string numbered_format(const char* noun) const {
    const std::size_t n = count();
    std::string out;
    const auto line = [&](std::size_t i) {
      return two_digits(i) + ": your " + ordinal(i) + " " + noun;
    };
    if (n <= 3) {
      for (std::size_t i = 1; i <= n; ++i) out += (i > 1 ? "\n" : "") + line(i);
      return out;
    }
    return line(1) + "\n" + line(2) + "\n...\n" + line(n);
  }

  std::string relation_blocks() const {
    std::string out;
    for (std::size_t r = 1; b_.count("RELATION" + std::to_string(r)); ++r) {
      const std::string rs = std::to_string(r);
      if (r > 1) out += "\n\n";
      out += "Relation name: \"" + need("RELATION" + rs) + "\" (" +
             need("RELATION_DESCRIPTION" + rs) + ")\n";
      out += support_list("SUPPORT_SENTENCE_" + rs + "_");
    }
    if (out.empty()) throw UnboundPlaceholder("unbound placeholder #RELATION1#");
    return out;
  }

  std::string resolve(const std::string& name) const {
    if (name == "SUPPORT_LIST") return support_list("SUPPORT_SENTENCE_");
    if (name == "RELATION_BLOCKS") return relation_blocks();
    if (name == "N") return std::to_string(count());
    if (name == "N_HALF") return std::to_string(count() / 2);
    if (name == "PARAPHRASE_FORMAT") return numbered_format("paraphrased sentence");
    if (name == "EXAMPLE_FORMAT") return numbered_format("example sentence");
    return need(name);
  }

  const Bindings& b_;
};

}  // namespace

std::string to_string(TemplateId id) { return entry(id).name; }

TemplateId template_from_string(const std::string& s) {
  for (const auto& e : kEntries) {
    if (s == e.name) return e.id;
  }
  throw Error("unknown template '" + s + "'");
}

std::string_view template_body(TemplateId id) { return entry(id).body; }

std::uint64_t template_hash(TemplateId id) { return fnv1a64(template_body(id)); }

std::uint64_t bindings_hash(const Bindings& b) {
  std::string canon;
  for (const auto& [k, v] : b) {
    canon += k;
    canon += '\x1f';
    canon += v;
    canon += '\x1e';
  }
  return fnv1a64(canon);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string render_prompt(TemplateId id, const Bindings& bindings) {
  return Renderer(bindings).render(template_body(id));
}

Prompt make_prompt(TemplateId id, Bindings bindings) {
  std::string text = render_prompt(id, bindings);
  return Prompt{id, std::move(bindings), std::move(text)};
}

}  // namespace relshot::llm
