#include "support/oracles.hpp"
#include "support/test_util.hpp"

#include "jqml/frame.hpp"
#include "jqml/schema.hpp"

namespace jqml::testing {
namespace {

class TypeTable : public ::testing::TestWithParam<TypeRow> {};

TEST_P(TypeTable, MapsExactly) {
  EXPECT_EQ(check_type_row(GetParam()), std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Rows, TypeTable, ::testing::ValuesIn(type_table()),
                         [](const ::testing::TestParamInfo<TypeRow>& info) {
                           std::string name;
                           for (char c : info.param.jsoniq) {
                             if (std::isalnum(static_cast<unsigned char>(c))) name += c;
                           }
                           return std::to_string(info.index) + "_" + name;
                         });

TEST(TypeTable, HasSixteenRows) { EXPECT_EQ(type_table().size(), 16u); }

std::string mapped(const std::string& descriptor) {
  return map_frame_type(parse_schema(parse_json(descriptor))).to_string();
}

TEST(Schema, NestedTypesPrint) {
  EXPECT_EQ(mapped("[\"double\"]"), "ArrayType(DoubleType)");
  EXPECT_EQ(mapped("[[\"double\"]]"), "ArrayType(ArrayType(DoubleType))");
  EXPECT_EQ(mapped("{\"a\": \"integer\", \"b\": {\"c\": \"boolean\"}}"),
            "StructType(a: DecimalType, b: StructType(c: BooleanType))");
}

TEST(Schema, DescriptorRoundTrip) {
  for (const char* text : {"\"long\"", "[\"string\"]", "{\"a\": [\"double\"], \"b\": \"dateTime\"}"}) {
    TypeDescriptor t = parse_schema(parse_json(text));
    EXPECT_EQ(descriptor_of(map_frame_type(t)), t) << text;
    EXPECT_EQ(canonical_serialize(t.to_item()), canonical_serialize(parse_json(text)));
  }
}

TEST(Schema, MalformedDescriptors) {
  EXPECT_JQ_ERROR(ErrorCode::UnknownTypeName, parse_schema(parse_json("\"varchar\"")));
  EXPECT_JQ_ERROR(ErrorCode::MalformedSchema, parse_schema(parse_json("[\"a\", \"b\"]")));
  EXPECT_JQ_ERROR(ErrorCode::MalformedSchema, parse_schema(parse_json("[]")));
  EXPECT_JQ_ERROR(ErrorCode::MalformedSchema, parse_schema(parse_json("3")));
}

Item check(const std::string& item, const std::string& type) {
  return validate_item(parse_json(item), parse_schema(parse_json(type)));
}

TEST(Validation, CastsLexicalForms) {
  EXPECT_EQ(canonical_serialize(check("\"-4.893\"", "\"double\"")), "-4.893");
  EXPECT_EQ(canonical_serialize(check("3", "\"double\"")), "3");
  EXPECT_EQ(check("3", "\"double\"").atomic().kind(), AtomicKind::Double);
  EXPECT_EQ(check("\"12\"", "\"int\"").atomic().kind(), AtomicKind::Int);
  EXPECT_EQ(canonical_serialize(check("\"true\"", "\"boolean\"")), "true");
  EXPECT_EQ(check("\"2020-02-29\"", "\"date\"").atomic().kind(), AtomicKind::Date);
}

TEST(Validation, RejectsWithPath) {
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("\"abc\"", "\"double\""));
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("300", "\"byte\""));
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("1.5", "\"int\""));
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("{\"a\": 1}", "{\"a\": \"int\", \"b\": \"int\"}"));
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("{\"a\": 1, \"c\": 2}", "{\"a\": \"int\"}"));
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, check("[1]", "\"int\""));
  try {
    check("{\"v\": [1, \"x\"]}", "{\"v\": [\"double\"]}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("v[1]"), std::string::npos) << e.what();
  }
}

TEST(Annotate, ProducesFrame) {
  Sequence rows = Sequence::materialized({parse_json("{\"a\": \"1\", \"b\": [1, 2]}"), parse_json("{\"a\": 2, \"b\": []}")});
  Sequence frame = annotate(rows, parse_json("{\"a\": \"long\", \"b\": [\"double\"]}"));
  ASSERT_TRUE(frame.is_frame());
  EXPECT_EQ(frame.frame()->row_count(), 2u);
  EXPECT_EQ(frame.frame()->schema()->to_string(), "StructType(a: LongType, b: ArrayType(DoubleType))");
  EXPECT_EQ(canonical_serialize(frame.frame()->row(0)), "{\"a\": 1, \"b\": [1, 2]}");
}

TEST(Annotate, ReportsRowIndex) {
  Sequence rows = Sequence::materialized({parse_json("{\"a\": 1}"), parse_json("{\"a\": \"z\"}")});
  try {
    annotate(rows, parse_json("{\"a\": \"long\"}"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  EXPECT_JQ_ERROR(ErrorCode::NonObjectRow,
                  annotate(Sequence::materialized({Item::integer(1)}), parse_json("{\"a\": \"long\"}")));
}

TEST(Annotate, StreamIsLazyAndTagged) {
  Sequence s = annotate_stream(Sequence::materialized({parse_json("{\"a\": 1}"), parse_json("{\"a\": \"z\"}")}),
                               parse_json("{\"a\": \"long\"}"));
  ASSERT_TRUE(s.schema_tag());
  auto cursor = s.open();
  EXPECT_TRUE(cursor->next().has_value());
  EXPECT_JQ_ERROR(ErrorCode::ValidationError, cursor->next());
}

TEST(Annotate, ViaQueryInBothPolicies) {
  const std::string q =
      "count(annotate(for $i in 1 to 10 return {\"i\": $i, \"s\": string($i)}, {\"i\": \"int\", \"s\": \"string\"}))";
  EXPECT_EQ(eval_text(q), "10\n");
  EngineOptions local;
  local.policy = ModePolicy::ForceLocal;
  EXPECT_EQ(eval_text(q, local), "10\n");
}

}  // namespace
}  // namespace jqml::testing
