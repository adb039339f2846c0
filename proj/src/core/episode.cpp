#include "relshot/core/episode.hpp"

#include <algorithm>

#include "relshot/core/errors.hpp"

namespace relshot {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, std::size_t line,
                    const char* where) {
  if (!obj.is_object()) {
    throw SchemaError(line, std::string(where) + " is not an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(line, std::string(where) + " lacks field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line,
                           const char* where) {
  const json& v = require(obj, key, line, where);
  if (!v.is_string()) {
    throw SchemaError(line, std::string(where) + "." + key + " is not a string");
  }
  return v.get<std::string>();
}

const json& require_array(const json& obj, const char* key, std::size_t line,
                          const char* where) {
  const json& v = require(obj, key, line, where);
  if (!v.is_array()) {
    throw SchemaError(line, std::string(where) + "." + key + " is not an array");
  }
  return v;
}

TaggedSentence parse_in_episode(const std::string& raw,
                                const std::string& episode_id,
                                const char* where) {
  try {
    return parse_tagged(raw);
  } catch (const TagError& e) {
    throw InvariantViolation(episode_id, std::string(where) + ": " + e.what());
  }
}

}  // namespace

TypeInventory TypeInventory::standard() {
  return of({"PERSON", "LOCATION", "ORGANIZATION", "DATE", "CITY", "COUNTRY",
             "STATE", "PROVINCE"});
}

TypeInventory TypeInventory::of(std::set<std::string> labels) {
  TypeInventory inv;
  inv.labels_ = std::move(labels);
  return inv;
}

bool TypeInventory::contains(const std::string& label) const {
  if (label.empty()) return false;
  return !labels_ || labels_->count(label) > 0;
}

bool Episode::has_relation(std::string_view name) const {
  return std::any_of(relations.begin(), relations.end(),
                     [&](const EpisodeRelation& r) { return r.spec.name == name; });
}

PredictionLabel PredictionLabel::relation(const Episode& episode,
                                          std::string name) {
  if (name == kNoRelation) return none();
  if (!episode.has_relation(name)) {
    throw InvariantViolation(episode.episode_id,
                             "'" + name + "' is not a relation of this episode");
  }
  return PredictionLabel(std::move(name));
}

void validate_episode(const Episode& ep, const TypeInventory& types) {
  if (ep.episode_id.empty()) {
    throw InvariantViolation(ep.episode_id, "empty episode_id");
  }
  if (ep.relations.size() != kEpisodeWays) {
    throw InvariantViolation(ep.episode_id,
                             "expected " + std::to_string(kEpisodeWays) +
                                 " relations, found " +
                                 std::to_string(ep.relations.size()));
  }
  std::set<std::string> names;
  for (const auto& r : ep.relations) {
    if (r.spec.name.empty()) {
      throw InvariantViolation(ep.episode_id, "relation with empty name");
    }
    if (r.spec.name == kNoRelation) {
      throw InvariantViolation(ep.episode_id,
                               "no_relation cannot be a candidate relation");
    }
    if (!names.insert(r.spec.name).second) {
      throw InvariantViolation(ep.episode_id,
                               "duplicate relation '" + r.spec.name + "'");
    }
    for (const auto* t : {&r.spec.subject_type, &r.spec.object_type}) {
      if (!types.contains(*t)) {
        throw InvariantViolation(ep.episode_id, "relation '" + r.spec.name +
                                                    "' has unknown entity type '" +
                                                    *t + "'");
      }
    }
  }
  if (ep.queries.empty()) {
    throw InvariantViolation(ep.episode_id, "episode has no queries");
  }
  for (const auto& q : ep.queries) {
    if (q.gold_label != kNoRelation && names.count(q.gold_label) == 0) {
      throw InvariantViolation(ep.episode_id, "gold label '" + q.gold_label +
                                                  "' is not a relation of the episode");
    }
  }
}

Episode episode_from_json(const json& rec, std::size_t line,
                          const TypeInventory& types) {
  Episode ep;
  ep.episode_id = require_string(rec, "episode_id", line, "episode");
  for (const auto& r : require_array(rec, "relations", line, "episode")) {
    RelationSpec spec{require_string(r, "name", line, "relation"),
                      require_string(r, "description", line, "relation"),
                      require_string(r, "subject_type", line, "relation"),
                      require_string(r, "object_type", line, "relation")};
    const json& support = require_array(r, "support", line, "relation");
    for (const auto& s : support) {
      if (!s.is_string()) {
        throw SchemaError(line, "relation.support entries must be strings");
      }
    }
    if (support.size() != 1) {
      throw InvariantViolation(ep.episode_id,
                               "relation '" + spec.name + "' has " +
                                   std::to_string(support.size()) +
                                   " supports, expected exactly 1");
    }
    TaggedSentence s =
        parse_in_episode(support[0].get<std::string>(), ep.episode_id, "support");
    ep.relations.push_back({std::move(spec), std::move(s)});
  }
  for (const auto& q : require_array(rec, "queries", line, "episode")) {
    Query query;
    query.sentence =
        parse_in_episode(require_string(q, "text", line, "query"), ep.episode_id, "query");
    query.gold_label = require_string(q, "gold_label", line, "query");
    const bool has_s = q.contains("subject_type") && !q["subject_type"].is_null();
    const bool has_o = q.contains("object_type") && !q["object_type"].is_null();
    if (has_s != has_o) {
      throw SchemaError(line, "query must carry both or neither of subject_type/object_type");
    }
    if (has_s) {
      query.gold_types = TypePair{require_string(q, "subject_type", line, "query"),
                                  require_string(q, "object_type", line, "query")};
    }
    ep.queries.push_back(std::move(query));
  }
  validate_episode(ep, types);
  return ep;
}

json episode_to_json(const Episode& ep) {
  json rels = json::array();
  for (const auto& r : ep.relations) {
    rels.push_back({{"name", r.spec.name},
                    {"description", r.spec.description},
                    {"subject_type", r.spec.subject_type},
                    {"object_type", r.spec.object_type},
                    {"support", json::array({render_tagged(r.support)})}});
  }
  json queries = json::array();
  for (const auto& q : ep.queries) {
    json jq = {{"text", render_tagged(q.sentence)}, {"gold_label", q.gold_label}};
    if (q.gold_types) {
      jq["subject_type"] = q.gold_types->subject;
      jq["object_type"] = q.gold_types->object;
    }
    queries.push_back(std::move(jq));
  }
  return {{"episode_id", ep.episode_id}, {"relations", rels}, {"queries", queries}};
}

EpisodeReader::EpisodeReader(const std::string& path, TypeInventory types)
    : in_(path), types_(std::move(types)) {
  if (!in_) throw Error("cannot open episode file '" + path + "'");
}

std::optional<EpisodeRecord> EpisodeReader::next() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw SchemaError(line_, std::string("invalid JSON: ") + e.what());
    }
    EpisodeRecord out;
    out.line = line_;
    out.episode_id = require_string(rec, "episode_id", line_, "episode");
    try {
      out.episode = episode_from_json(rec, line_, types_);
    } catch (const InvariantViolation& e) {
      out.error = e.detail();
    }
    return out;
  }
  return std::nullopt;
}

std::vector<Episode> load_episodes(const std::string& path,
                                   const TypeInventory& types) {
  EpisodeReader reader(path, types);
  std::vector<Episode> out;
  while (auto rec = reader.next()) {
    if (!rec->episode) throw InvariantViolation(rec->episode_id, rec->error);
    out.push_back(std::move(*rec->episode));
  }
  return out;
}

}  // namespace relshot
