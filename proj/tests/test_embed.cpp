#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "relshot/core/errors.hpp"
#include "relshot/embed/embedding_io.hpp"
#include "relshot/embed/vector_index.hpp"
#include "test_support.hpp"

using namespace relshot;
using namespace relshot::embed;

namespace {

std::vector<float> random_unit(std::mt19937_64& gen, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double s = 0.0;
  for (auto& x : v) {
    x = n(gen);
    s += x * x;
  }
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / std::sqrt(s));
  return out;
}

EmbeddingRecord record(RecordId id, std::vector<float> v, TypePair pair = {"PERSON", "CITY"}) {
  return {id,
          parse_tagged("<subject>s" + std::to_string(id) + "</subject> and <object>o</object>"),
          std::move(v),
          std::move(pair),
          std::nullopt,
          VectorSource::kRule};
}

std::vector<Hit> brute_force(const std::vector<EmbeddingRecord>& recs, std::span<const float> q,
                             const TypePair& pair) {
  std::vector<Hit> out;
  for (const auto& r : recs) {
    if (!(r.type_pair == pair)) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      s += static_cast<double>(q[i]) * static_cast<double>(r.vector[i]);
    }
    out.push_back({r.id, s});
  }
  std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  return out;
}

}  // namespace

TEST_SUITE("embed") {

TEST_CASE("top-k and threshold agree with a scan, per partition") {
  std::mt19937_64 gen(3);
  std::vector<EmbeddingRecord> recs;
  const TypePair a{"PERSON", "CITY"}, b{"ORGANIZATION", "PERSON"};
  for (RecordId id = 0; id < 200; ++id) recs.push_back(record(id, random_unit(gen, 16), id % 3 ? a : b));
  const auto index = VectorIndex::build(recs);
  CHECK(index.size() == 200);
  CHECK(index.partition_size(a) + index.partition_size(b) == 200);
  CHECK(index.partition_size({"X", "Y"}) == 0);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_unit(gen, 16);
    const auto all = brute_force(recs, q, a);
    const auto top = index.retrieve_topk(q, 10, a);
    CHECK(top == std::vector<Hit>(all.begin(), all.begin() + 10));
    const auto thr = index.retrieve_threshold(q, 0.2, a);
    std::vector<Hit> want;
    for (const auto& h : all) {
      if (h.score >= 0.2) want.push_back(h);
    }
    CHECK(thr == want);
  }
  CHECK(index.retrieve_topk(random_unit(gen, 16), 1000, b).size() == index.partition_size(b));
}

TEST_CASE("ties break by ascending id") {
  std::vector<float> v{1.0f, 0.0f};
  const auto index = VectorIndex::build({record(9, v), record(2, v), record(5, v)});
  const auto hits = index.retrieve_topk(v, 3, {"PERSON", "CITY"});
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].id == 2);
  CHECK(hits[1].id == 5);
  CHECK(hits[2].id == 9);
}

TEST_CASE("build rejects bad input") {
  CHECK_THROWS_AS(VectorIndex::build({record(1, {1.0f, 0.0f}), record(1, {0.0f, 1.0f})}),
                  DuplicateId);
  CHECK_THROWS_AS(VectorIndex::build({record(1, {1.0f, 0.0f}), record(2, {0.0f, 0.0f, 1.0f})}),
                  DimensionMismatch);
  CHECK_THROWS_AS(VectorIndex::build({record(1, {0.6f, 0.6f})}), NormViolation);
  const auto index = VectorIndex::build({record(1, {1.0f, 0.0f})});
  const std::vector<float> q3{1.0f, 0.0f, 0.0f};
  CHECK_THROWS_AS(index.retrieve_topk(q3, 1, {"PERSON", "CITY"}), DimensionMismatch);
  const std::vector<float> a{1.0f}, b{1.0f, 0.0f};
  CHECK_THROWS_AS(cosine(a, b), DimensionMismatch);
}

TEST_CASE("record accessors") {
  auto r = record(4, {0.0f, 1.0f});
  r.rule = "[entity=PERSON]+ <nsubj met";
  const auto index = VectorIndex::build({r});
  CHECK(index.sentence(4).subject() == "s4");
  CHECK(index.rule(4) == r.rule);
  CHECK(index.type_pair(4) == TypePair{"PERSON", "CITY"});
  CHECK(index.vector(4)[1] == 1.0f);
  CHECK_FALSE(index.contains(5));
}

TEST_CASE("embedding file round trip with and without sidecar") {
  testing::TempDir tmp;
  std::mt19937_64 gen(11);
  std::vector<EmbeddingRecord> recs;
  for (RecordId id = 1; id <= 5; ++id) recs.push_back(record(id, random_unit(gen, 4)));
  recs[2].rule = "rule text";
  recs[3].source = VectorSource::kRuleFallback;
  write_embedding_file(tmp.file("e.jsonl"), recs);
  write_vector_sidecar(tmp.file("e.bin"), recs);
  const auto inline_recs = read_embedding_file(tmp.file("e.jsonl"));
  const auto side_recs = read_embedding_file(tmp.file("e.jsonl"), tmp.file("e.bin"));
  REQUIRE(inline_recs.size() == 5);
  REQUIRE(side_recs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(inline_recs[i].vector == recs[i].vector);
    CHECK(side_recs[i].vector == recs[i].vector);
    CHECK(inline_recs[i].id == recs[i].id);
    CHECK(render_tagged(inline_recs[i].sentence) == render_tagged(recs[i].sentence));
  }
  CHECK(inline_recs[2].rule == "rule text");
  CHECK(inline_recs[3].source == VectorSource::kRuleFallback);
  const auto [dim, values] = read_vector_sidecar(tmp.file("e.bin"));
  CHECK(dim == 4);
  CHECK(values.size() == 20);
}

TEST_CASE("sidecar header layout is little-endian magic, dim, count") {
  testing::TempDir tmp;
  write_vector_sidecar(tmp.file("v.bin"), {record(1, {1.0f, 0.0f, 0.0f})});
  const std::string bytes = testing::slurp(tmp.file("v.bin"));
  REQUIRE(bytes.size() == 16 + 12);
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  CHECK(u8(0) == 'R');
  CHECK(u8(1) == 'S');
  CHECK(u8(2) == 'V');
  CHECK(u8(3) == '1');
  CHECK(u8(4) == 3);
  CHECK(u8(8) == 1);
  // float32 1.0 = 0x3f800000
  CHECK(u8(16) == 0x00);
  CHECK(u8(19) == 0x3f);
}

TEST_CASE("malformed embedding records") {
  testing::TempDir tmp;
  testing::spit(tmp.path() / "a.jsonl",
                R"({"id": 1, "text": "<subject>a</subject> <object>b</object>", "subject_type": "PERSON", "object_type": "CITY"})"
                "\n");
  CHECK_THROWS_AS(read_embedding_file(tmp.file("a.jsonl")), SchemaError);
  testing::spit(tmp.path() / "b.jsonl", "{\"id\": 1}\n");
  CHECK_THROWS_AS(read_embedding_file(tmp.file("b.jsonl")), SchemaError);
}

TEST_CASE("checked-in stores: sidecar and inline vectors match, supports resolve") {
  const auto inline_recs = read_embedding_file(testing::fixture("candidate_store.jsonl"));
  const auto side_recs = read_embedding_file(testing::fixture("candidate_store_novec.jsonl"),
                                             testing::fixture("candidate_store.bin"));
  REQUIRE(inline_recs.size() == side_recs.size());
  for (std::size_t i = 0; i < inline_recs.size(); ++i) {
    CHECK(inline_recs[i].vector == side_recs[i].vector);
  }
  CHECK_NOTHROW(VectorIndex::build(side_recs));
  const auto supports = SupportVectors::build(read_embedding_file(testing::fixture("support_store.jsonl")));
  CHECK(supports.size() == 100);
  const auto eps = load_episodes(testing::fixture("e2e_episodes.jsonl"));
  for (const auto& ep : eps) {
    for (const auto& r : ep.relations) CHECK(supports.find(r.support).has_value());
  }
  CHECK_FALSE(supports.find(parse_tagged("<subject>x</subject> <object>y</object>")).has_value());
}

}  // TEST_SUITE
