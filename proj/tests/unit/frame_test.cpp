#include "support/generators.hpp"
#include "support/test_util.hpp"

#include "jqml/frame.hpp"
#include "jqml/schema.hpp"

#include <random>

namespace jqml::testing {
namespace {

const char* kSchema =
    "{\"id\": \"long\", \"name\": \"string\", \"score\": \"double\", \"ok\": \"boolean\", "
    "\"v\": [\"double\"], \"tags\": [\"string\"], \"p\": {\"x\": \"int\", \"y\": \"decimal\"}}";

std::vector<Item> sample_rows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Item> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Item> v, tags;
    for (std::size_t k = rng() % 4; k > 0; --k) v.push_back(Item::double_value(static_cast<double>(rng() % 1000) / 8));
    for (std::size_t k = rng() % 3; k > 0; --k) tags.push_back(Item::string("t" + std::to_string(rng() % 9)));
    rows.push_back(Item::object({
        {"id", Item::integer(static_cast<std::int64_t>(rng() % 100000) - 50000)},
        {"name", Item::string("n" + std::to_string(i))},
        {"score", Item::double_value(static_cast<double>(rng() % 4096) / 64 - 32)},
        {"ok", Item::boolean(rng() % 2)},
        {"v", Item::array(std::move(v))},
        {"tags", Item::array(std::move(tags))},
        {"p", Item::object({{"x", Item::integer(static_cast<std::int64_t>(rng() % 50))},
                            {"y", parse_json(std::to_string(rng() % 1000) + ".25")}})},
    }));
  }
  return rows;
}

TEST(Frame, RowsRoundTripExactly) {
  std::vector<Item> rows = sample_rows(300, 7);
  Sequence frame = annotate(Sequence::materialized(rows), parse_json(kSchema));
  ASSERT_TRUE(frame.is_frame());
  std::vector<Item> back = materialize(frame, 1000);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(canonical_serialize(back[i]), canonical_serialize(validate_item(rows[i], parse_schema(parse_json(kSchema)))));
  }
}

TEST(Frame, RoundTripThroughItemsAgain) {
  std::vector<Item> rows = sample_rows(50, 8);
  Sequence a = annotate(Sequence::materialized(rows), parse_json(kSchema));
  Sequence b = annotate(Sequence::materialized(materialize(a, 100)), parse_json(kSchema));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(deep_equal(a.frame()->row(i), b.frame()->row(i)));
  }
}

TEST(Frame, ColumnsAreTyped) {
  Sequence frame = annotate(Sequence::materialized(sample_rows(5, 9)), parse_json(kSchema));
  const Frame& f = *frame.frame();
  EXPECT_EQ(f.column_count(), 7u);
  const ColumnVector& v = f.column(f.require_column("v"));
  EXPECT_TRUE(v.type().is_dense_vector());
  EXPECT_EQ(v.offsets().size(), 6u);
  EXPECT_EQ(v.child(0).doubles().size(), v.offsets().back());
  EXPECT_JQ_ERROR(ErrorCode::UnknownColumn, f.require_column("nope"));
}

TEST(Frame, FilterMatchesLocalEvaluation) {
  TempDir dir;
  std::string path = dir.file("rows.jsonl");
  {
    std::ofstream out(path);
    for (const Item& row : sample_rows(400, 10)) out << canonical_serialize(row) << '\n';
  }
  const std::string q = "for $r in annotate(json-lines(\"" + path + "\"), " + std::string(kSchema) +
                        ") where $r.score gt 0 and $r.ok return $r";
  EngineOptions local;
  local.policy = ModePolicy::ForceLocal;
  std::string expected = eval_text(q, local);
  EXPECT_FALSE(expected.empty());
  EXPECT_EQ(eval_text(q), expected);
  EngineOptions parts;
  parts.partitions = 4;
  EXPECT_EQ(eval_text(q, parts), expected);
  EXPECT_EQ(eval_text("count(annotate(json-lines(\"" + path + "\"), " + std::string(kSchema) + ")[$$.p.x lt 10])"),
            eval_text("count(annotate(json-lines(\"" + path + "\"), " + std::string(kSchema) + ")[$$.p.x lt 10])",
                      local));
}

TEST(Frame, GatherAndProject) {
  Sequence frame = annotate(Sequence::materialized(sample_rows(10, 11)), parse_json(kSchema));
  std::vector<std::string> names = {"name", "id"};
  auto projected = frame_project(*frame.frame(), names);
  EXPECT_EQ(projected->column_count(), 2u);
  EXPECT_EQ(projected->row(3).object().find("name")->atomic().as_string(), "n3");
}

}  // namespace
}  // namespace jqml::testing
