#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relshot/embed/vector_index.hpp"

namespace relshot::embed {

/// Binary sidecar layout: 16-byte little-endian header
/// (uint32 magic, uint32 dimension, uint64 count) then count x dimension
/// float32 values, row-major, in the same order as the JSONL records.
inline constexpr std::uint32_t kSidecarMagic = 0x31565352;  // "RSV1"

EmbeddingRecord record_from_json(const nlohmann::json& j, std::size_t line,
                                 bool vector_required = true);
nlohmann::json record_to_json(const EmbeddingRecord& rec);

/// Reads a line-delimited embedding file. When `sidecar` is given, vectors
/// come from it and any inline `vector` field is ignored.
std::vector<EmbeddingRecord> read_embedding_file(
    const std::string& path, const std::optional<std::string>& sidecar = std::nullopt);

void write_embedding_file(const std::string& path,
                          const std::vector<EmbeddingRecord>& records);

void write_vector_sidecar(const std::string& path,
                          const std::vector<EmbeddingRecord>& records);

/// Returns (dimension, row-major values).
std::pair<std::size_t, std::vector<float>> read_vector_sidecar(const std::string& path);

}  // namespace relshot::embed
