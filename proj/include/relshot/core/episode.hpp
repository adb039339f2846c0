#pragma once

#include <cstddef>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "relshot/core/tagged_sentence.hpp"

namespace relshot {

inline constexpr std::string_view kNoRelation = "no_relation";
inline constexpr std::size_t kEpisodeWays = 5;

/// (subject entity type, object entity type).
struct TypePair {
  std::string subject;
  std::string object;

  friend bool operator==(const TypePair&, const TypePair&) = default;
  friend auto operator<=>(const TypePair&, const TypePair&) = default;
};

struct TypePairHash {
  std::size_t operator()(const TypePair& p) const noexcept {
    const std::size_t h = std::hash<std::string>{}(p.subject);
    return h ^ (std::hash<std::string>{}(p.object) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};

/// Set of admissible entity-type labels. An open inventory accepts any
/// non-empty label.
class TypeInventory {
 public:
  static TypeInventory open() { return TypeInventory(); }
  /// PERSON, LOCATION, ORGANIZATION, DATE, CITY, COUNTRY, STATE, PROVINCE.
  static TypeInventory standard();
  static TypeInventory of(std::set<std::string> labels);

  bool contains(const std::string& label) const;
  bool is_open() const noexcept { return !labels_; }

 private:
  std::optional<std::set<std::string>> labels_;
};

struct RelationSpec {
  std::string name;
  std::string description;
  std::string subject_type;
  std::string object_type;

  TypePair type_pair() const { return {subject_type, object_type}; }
  friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

struct EpisodeRelation {
  RelationSpec spec;
  TaggedSentence support;
};

struct Query {
  TaggedSentence sentence;
  std::string gold_label;
  std::optional<TypePair> gold_types;
};

struct Episode {
  std::string episode_id;
  std::vector<EpisodeRelation> relations;
  std::vector<Query> queries;

  bool has_relation(std::string_view name) const;
};

/// A relation name from an episode, or the no_relation sentinel.
class PredictionLabel {
 public:
  static PredictionLabel none() { return PredictionLabel(std::string(kNoRelation)); }
  /// Throws InvariantViolation if `name` is not one of `episode`'s relations.
  static PredictionLabel relation(const Episode& episode, std::string name);

  const std::string& value() const noexcept { return value_; }
  bool is_none() const noexcept { return value_ == kNoRelation; }
  friend bool operator==(const PredictionLabel&, const PredictionLabel&) = default;

 private:
  explicit PredictionLabel(std::string v) : value_(std::move(v)) {}
  std::string value_;
};

/// Checks N=5, one support per relation, >=1 query, gold-label closure and
/// entity types. Throws InvariantViolation.
void validate_episode(const Episode& episode, const TypeInventory& types);

/// Decodes one episode record. JSON shape errors throw SchemaError(line);
/// tag and invariant failures throw InvariantViolation.
Episode episode_from_json(const nlohmann::json& record, std::size_t line,
                          const TypeInventory& types);
nlohmann::json episode_to_json(const Episode& episode);

/// One line of an episode file after decoding. Either `episode` is set or
/// `error` describes the invariant violation that rejected it.
struct EpisodeRecord {
  std::size_t line = 0;
  std::string episode_id;
  std::optional<Episode> episode;
  std::string error;
};

/// Streams an episode file one record at a time.
class EpisodeReader {
 public:
  explicit EpisodeReader(const std::string& path,
                         TypeInventory types = TypeInventory::open());

  /// Returns the next record, or nullopt at end of file. Malformed JSON or a
  /// record missing required fields throws SchemaError; a record that decodes
  /// but violates an invariant comes back with `error` set.
  std::optional<EpisodeRecord> next();

  std::size_t line() const noexcept { return line_; }

 private:
  std::ifstream in_;
  TypeInventory types_;
  std::size_t line_ = 0;
};

/// Loads a whole file, throwing on the first invalid record.
std::vector<Episode> load_episodes(const std::string& path,
                                   const TypeInventory& types = TypeInventory::open());

}  // namespace relshot
