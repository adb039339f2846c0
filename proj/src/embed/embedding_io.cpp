#include "relshot/embed/embedding_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "relshot/core/errors.hpp"

namespace relshot::embed {
namespace {

using nlohmann::json;

template <typename T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <typename T>
void put(std::ofstream& out, T v) {
  v = to_little_endian(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw SchemaError(0, "truncated vector sidecar '" + path + "'");
  }
  return to_little_endian(v);
}

std::string field_string(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw SchemaError(line, std::string("embedding record needs string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

EmbeddingRecord record_from_json(const json& j, std::size_t line,
                                 bool vector_required) {
  if (!j.is_object()) throw SchemaError(line, "embedding record is not an object");
  EmbeddingRecord rec;
  const auto id = j.find("id");
  if (id == j.end() || !id->is_number_integer()) {
    throw SchemaError(line, "embedding record needs integer field 'id'");
  }
  rec.id = id->get<RecordId>();
  try {
    rec.sentence = parse_tagged(field_string(j, "text", line));
  } catch (const TagError& e) {
    throw SchemaError(line, std::string("record text: ") + e.what());
  }
  rec.type_pair = {field_string(j, "subject_type", line),
                   field_string(j, "object_type", line)};
  if (j.contains("rule") && !j["rule"].is_null()) {
    rec.rule = field_string(j, "rule", line);
  }
  if (j.contains("source")) {
    rec.source = vector_source_from_string(field_string(j, "source", line));
  }
  const auto vec = j.find("vector");
  if (vec != j.end()) {
    if (!vec->is_array()) throw SchemaError(line, "'vector' must be an array");
    rec.vector.reserve(vec->size());
    for (const auto& x : *vec) {
      if (!x.is_number()) throw SchemaError(line, "'vector' entries must be numbers");
      rec.vector.push_back(x.get<float>());
    }
  } else if (vector_required) {
    throw SchemaError(line, "embedding record needs field 'vector'");
  }
  return rec;
}

json record_to_json(const EmbeddingRecord& rec) {
  json j = {{"id", rec.id},
            {"text", render_tagged(rec.sentence)},
            {"subject_type", rec.type_pair.subject},
            {"object_type", rec.type_pair.object},
            {"vector", rec.vector}};
  if (rec.rule) j["rule"] = *rec.rule;
  if (rec.source != VectorSource::kSentence) j["source"] = to_string(rec.source);
  return j;
}

std::vector<EmbeddingRecord> read_embedding_file(
    const std::string& path, const std::optional<std::string>& sidecar) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  std::vector<EmbeddingRecord> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw SchemaError(line, std::string("invalid JSON: ") + e.what());
    }
    out.push_back(record_from_json(j, line, !sidecar.has_value()));
  }
  if (sidecar) {
    auto [dim, values] = read_vector_sidecar(*sidecar);
    if (values.size() != dim * out.size()) {
      throw SizeMismatch("sidecar '" + *sidecar + "' holds " +
                         std::to_string(dim ? values.size() / dim : 0) +
                         " rows for " + std::to_string(out.size()) + " records");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto first = values.begin() + static_cast<std::ptrdiff_t>(i * dim);
      out[i].vector.assign(first, first + static_cast<std::ptrdiff_t>(dim));
    }
  }
  return out;
}

void write_embedding_file(const std::string& path,
                          const std::vector<EmbeddingRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

void write_vector_sidecar(const std::string& path,
                          const std::vector<EmbeddingRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  const std::size_t dim = records.empty() ? 0 : records.front().vector.size();
  put<std::uint32_t>(out, kSidecarMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put<std::uint64_t>(out, records.size());
  for (const auto& rec : records) {
    if (rec.vector.size() != dim) {
      throw DimensionMismatch("record " + std::to_string(rec.id) +
                              " does not match sidecar dimension");
    }
    for (float x : rec.vector) put<float>(out, x);
  }
}

std::pair<std::size_t, std::vector<float>> read_vector_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open sidecar '" + path + "'");
  if (get<std::uint32_t>(in, path) != kSidecarMagic) {
    throw SchemaError(0, "'" + path + "' is not a vector sidecar (bad magic)");
  }
  const auto dim = get<std::uint32_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(dim * count));
  for (std::uint64_t i = 0; i < dim * count; ++i) values.push_back(get<float>(in, path));
  return {dim, std::move(values)};
}

}  // namespace relshot::embed
