#include "support/oracles.hpp"
#include "support/test_util.hpp"

#include "jqml/frame.hpp"
#include "jqml/ml.hpp"
#include "jqml/schema.hpp"
#include "jqml/training.hpp"

#include <cmath>

namespace jqml::testing {
namespace {

/// `let $train := annotate(<rows>, <schema>)` prefix for ML queries.
std::string frame_let(const std::string& var, const std::string& rows, const std::string& schema) {
  return "let $" + var + " := annotate((" + rows + "), " + schema + ") ";
}

const std::string kVecSchema = "{\"label\": \"double\", \"features\": [\"double\"]}";

class ParamTable : public ::testing::TestWithParam<ParamRow> {};

TEST_P(ParamTable, AcceptsAndRejects) { EXPECT_EQ(check_param_row(GetParam()), std::nullopt); }

INSTANTIATE_TEST_SUITE_P(Rows, ParamTable, ::testing::ValuesIn(param_table()),
                         [](const ::testing::TestParamInfo<ParamRow>& info) {
                           std::string name;
                           for (char c : info.param.native) {
                             if (std::isalnum(static_cast<unsigned char>(c))) name += c;
                             if (c == '[') name += "Arr";
                           }
                           return std::to_string(info.index) + "_" + name;
                         });

TEST(Params, ValidateMergesDefaults) {
  ml::ParamMap p = ml::validate_params(*ml::find_component("LinearSVC"), parse_json("{\"maxIter\": 5}"));
  EXPECT_EQ(ml::get_integer(p, "maxIter"), 5);
  EXPECT_EQ(ml::get_string(p, "featuresCol"), "features");
  EXPECT_DOUBLE_EQ(ml::get_double(p, "stepSize"), 0.1);
  EXPECT_JQ_ERROR(ErrorCode::ParamTypeError,
                  ml::validate_params(*ml::find_component("LinearSVC"), parse_json("{\"maxIter\": \"five\"}")));
  EXPECT_JQ_ERROR(ErrorCode::UnknownParam,
                  ml::validate_params(*ml::find_component("LinearSVC"), parse_json("{\"maxIterations\": 5}")));
  EXPECT_JQ_ERROR(ErrorCode::MissingParam, ml::require(p, "nope"));
}

TEST(Registry, Lookup) {
  EXPECT_EQ(eval_text("count((get-transformer(\"VectorAssembler\", {\"inputCols\": [\"features\"], "
                      "\"outputCol\": \"transformedFeatures\"}), get-transformer(\"Tokenizer\", {})))"),
            "2\n");
  EXPECT_JQ_ERROR(ErrorCode::UnknownTransformer, eval_text("get-transformer(\"Bogus\", {})"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownEstimator, eval_text("get-estimator(\"RandomForest\", {})"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownEstimator, eval_text("get-estimator(\"Tokenizer\", {})"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownTransformer, eval_text("get-transformer(\"LinearSVC\", {})"));
}

TEST(Tokenizer, LowercasesAndSplits) {
  std::string q = frame_let("d", "{\"s\": \"Hi I heard\"}, {\"s\": \"\"}, {\"s\": \"  A\\tb  \"}", "{\"s\": \"string\"}") +
                  "let $t := get-transformer(\"Tokenizer\", {\"inputCol\": \"s\"}) "
                  "for $r in $t($d, {\"outputCol\": \"w\"}) return $r.w";
  EXPECT_EQ(eval_text(q), "[\"hi\", \"i\", \"heard\"]\n[]\n[\"a\", \"b\"]\n");
}

TEST(Tokenizer, NeedsFrameAndColumns) {
  std::string t = "let $t := get-transformer(\"Tokenizer\", {\"inputCol\": \"s\", \"outputCol\": \"w\"}) ";
  EXPECT_JQ_ERROR(ErrorCode::NotAFrame, eval_text(t + "return $t(({\"s\": \"a\"}), {})"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownColumn,
                  eval_text(frame_let("d", "{\"x\": \"a\"}", "{\"x\": \"string\"}") + t + "return $t($d, {})"));
  EXPECT_JQ_ERROR(ErrorCode::DuplicateColumn,
                  eval_text(frame_let("d", "{\"s\": \"a\", \"w\": 1}", "{\"s\": \"string\", \"w\": \"int\"}") + t +
                            "return $t($d, {})"));
  EXPECT_JQ_ERROR(ErrorCode::MissingParam,
                  eval_text(frame_let("d", "{\"s\": \"a\"}", "{\"s\": \"string\"}") +
                            "return get-transformer(\"Tokenizer\", {})($d, {})"));
}

TEST(Tokenizer, InputFrameIsUnchanged) {
  std::string q = frame_let("d", "{\"s\": \"a b\"}", "{\"s\": \"string\"}") +
                  "let $out := get-transformer(\"Tokenizer\", {\"inputCol\": \"s\", \"outputCol\": \"w\"})($d, {}) "
                  "return ($d, $out)";
  EXPECT_EQ(eval_text(q), "{\"s\": \"a b\"}\n{\"s\": \"a b\", \"w\": [\"a\", \"b\"]}\n");
}

TEST(VectorAssembler, Concatenates) {
  std::string q = frame_let("d", "{\"x\": 1.5, \"v\": [2, 3], \"r\": {\"a\": 4, \"b\": 5}, \"i\": 6}",
                            "{\"x\": \"double\", \"v\": [\"double\"], \"r\": {\"a\": \"double\", \"b\": \"int\"}, \"i\": \"long\"}") +
                  "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"x\", \"v\", \"r\", \"i\"], \"outputCol\": \"f\"}) "
                  "return $va($d, {}).f";
  EXPECT_EQ(eval_text(q), "[1.5, 2, 3, 4, 5, 6]\n");
  EXPECT_JQ_ERROR(ErrorCode::NonNumericInput,
                  eval_text(frame_let("d", "{\"s\": \"a\"}", "{\"s\": \"string\"}") +
                            "return get-transformer(\"VectorAssembler\", {\"inputCols\": [\"s\"], \"outputCol\": \"f\"})($d, {})"));
}

TEST(VectorSlicer, SelectsIndices) {
  std::string q = frame_let("d", "{\"v\": [10, 11, 12]}", "{\"v\": [\"double\"]}") +
                  "return get-transformer(\"VectorSlicer\", {\"inputCol\": \"v\", \"outputCol\": \"s\", \"indices\": [2, 0]})($d, {}).s";
  EXPECT_EQ(eval_text(q), "[12, 10]\n");
}

TEST(MaxAbsScaler, HandExample) {
  std::string q = frame_let("d", "{\"features\": [2, -4]}, {\"features\": [1, 2]}, {\"features\": [0, 0]}",
                            "{\"features\": [\"double\"]}") +
                  "let $m := get-estimator(\"MaxAbsScaler\", {\"outputCol\": \"s\"})($d, {}) "
                  "for $r in $m($d, {}) return $r.s";
  EXPECT_EQ(eval_text(q), "[1, -1]\n[0.5, 0.5]\n[0, 0]\n");
  std::string zero = frame_let("d", "{\"features\": [0, 3]}", "{\"features\": [\"double\"]}") +
                     "return get-estimator(\"MaxAbsScaler\", {\"outputCol\": \"s\"})($d, {})($d, {}).s";
  EXPECT_EQ(eval_text(zero), "[0, 1]\n");
  EXPECT_JQ_ERROR(ErrorCode::EmptyTrainingSet,
                  eval_text("let $d := annotate((), {\"features\": [\"double\"]}) "
                            "return get-estimator(\"MaxAbsScaler\", {})($d, {})"));
  EXPECT_JQ_ERROR(ErrorCode::RaggedVectors,
                  eval_text(frame_let("d", "{\"features\": [1]}, {\"features\": [1, 2]}", "{\"features\": [\"double\"]}") +
                            "return get-estimator(\"MaxAbsScaler\", {})($d, {})"));
}

TEST(LogisticRegression, OneDimensionalExample) {
  std::string q = frame_let("d", "{\"label\": 0, \"features\": [-1]}, {\"label\": 1, \"features\": [1]}", kVecSchema) +
                  "let $m := get-estimator(\"LogisticRegression\", {\"maxIter\": 100, \"stepSize\": 1.0, \"regParam\": 0})($d, {}) "
                  "return count($m($d, {})[$$.label eq $$.prediction]) div 2";
  EXPECT_EQ(eval_text(q), "1\n");
}

TEST(LogisticRegression, ZeroIterationsPredictOne) {
  std::string q = frame_let("d", "{\"label\": 0, \"features\": [-1]}, {\"label\": 1, \"features\": [1]}", kVecSchema) +
                  "let $m := get-estimator(\"LogisticRegression\", {\"maxIter\": 0})($d, {}) "
                  "return $m($d, {}).prediction";
  EXPECT_EQ(eval_text(q), "1\n1\n");
}

TEST(LogisticRegression, BadLabels) {
  EXPECT_JQ_ERROR(ErrorCode::BadLabel,
                  eval_text(frame_let("d", "{\"label\": 2, \"features\": [1]}", kVecSchema) +
                            "return get-estimator(\"LogisticRegression\", {})($d, {})"));
  EXPECT_JQ_ERROR(ErrorCode::BadLabel,
                  eval_text(frame_let("d", "{\"label\": \"x\", \"features\": [1]}",
                                      "{\"label\": \"string\", \"features\": [\"double\"]}") +
                            "return get-estimator(\"LogisticRegression\", {})($d, {})"));
  EXPECT_EQ(eval_text(frame_let("d", "{\"label\": \"1\", \"features\": [1]}",
                                "{\"label\": \"string\", \"features\": [\"double\"]}") +
                      "return get-estimator(\"LogisticRegression\", {})($d, {})($d, {}).prediction"),
            "1\n");
}

TEST(LinearSVC, OneStepHandComputation) {
  ml::Dataset data;
  data.rows = 1;
  data.dims = 1;
  data.x = {1.0};
  data.y = {1.0};
  ml::LinearOptions options;
  options.max_iter = 1;
  options.step_size = 1.0;
  ml::LinearModel m = ml::train_linear(ml::Loss::Hinge, data, options);
  EXPECT_EQ(m.w, std::vector<double>{1.0});
  EXPECT_EQ(m.b, 1.0);

  // Same through the query surface, read back via save-model.
  TempDir dir;
  std::string path = dir.file("svc.json");
  std::string q = frame_let("d", "{\"label\": 1, \"features\": [1]}", kVecSchema) +
                  "let $m := get-estimator(\"LinearSVC\", {\"maxIter\": 1, \"stepSize\": 1})($d, {}) "
                  "return save-model($m, \"" + path + "\")";
  eval_text(q);
  Item doc = parse_json(read_text(path));
  EXPECT_EQ(canonical_serialize(*doc.object().find("weights")), "[1]");
  EXPECT_EQ(canonical_serialize(*doc.object().find("intercept")), "1");
  EXPECT_EQ(doc.object().find("kind")->atomic().as_string(), "LinearSVCModel");
}

TEST(LinearSVC, Errors) {
  EXPECT_JQ_ERROR(ErrorCode::RaggedVectors,
                  eval_text(frame_let("d", "{\"label\": 1, \"features\": [1]}, {\"label\": 0, \"features\": [1, 2]}", kVecSchema) +
                            "return get-estimator(\"LinearSVC\", {})($d, {})"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownParam,
                  eval_text(frame_let("d", "{\"label\": 1, \"features\": [1]}", kVecSchema) +
                            "let $m := get-estimator(\"LinearSVC\", {})($d, {}) return $m($d, {\"maxIter\": 3})"));
  EXPECT_JQ_ERROR(ErrorCode::InvalidArgument,
                  eval_text(frame_let("d", "{\"label\": 1, \"features\": [1, 2]}", kVecSchema) +
                            "return get-estimator(\"LogisticRegression\", {\"lowerBoundsOnCoefficients\": [[0]]})($d, {})"));
}

TEST(LogisticRegression, BoundsAreRespected) {
  std::string q = frame_let("d", "{\"label\": 1, \"features\": [1, 1]}, {\"label\": 0, \"features\": [-1, -1]}", kVecSchema) +
                  "let $m := get-estimator(\"LogisticRegression\", {\"maxIter\": 50, \"stepSize\": 1, "
                  "\"upperBoundsOnCoefficients\": [[0.25, 10]], \"lowerBoundsOnIntercepts\": [0], \"upperBoundsOnIntercepts\": [0]})($d, {}) "
                  "return $m($d, {}).prediction";
  EXPECT_EQ(eval_text(q), "1\n0\n");
}

TEST(LinearSVC, FitIsDeterministic) {
  TempDir dir;
  std::string rows;
  for (int i = 0; i < 40; ++i) {
    rows += std::string(i ? ", " : "") + "{\"label\": " + std::to_string(i % 2) + ", \"features\": [" +
            std::to_string((i % 2 ? 1 : -1) * (1 + i % 7)) + ", " + std::to_string(i % 5) + "]}";
  }
  for (const char* name : {"a", "b"}) {
    eval_text(frame_let("d", rows, kVecSchema) + "return save-model(get-estimator(\"LinearSVC\", {\"maxIter\": 30})($d, {}), \"" +
              dir.file(name) + "\")");
  }
  EXPECT_EQ(read_text(dir.file("a")), read_text(dir.file("b")));
}

TEST(NaiveBayes, NegativeFeatureFails) {
  EXPECT_JQ_ERROR(ErrorCode::NegativeFeature,
                  eval_text(frame_let("d", "{\"label\": 0, \"features\": [1, 0]}, {\"label\": 1, \"features\": [0, -0.5]}", kVecSchema) +
                            "return get-estimator(\"NaiveBayes\", {})($d, {})"));
}

TEST(NaiveBayes, OneHotPredictsPerfectly) {
  std::string q = frame_let("d", "{\"label\": 0, \"features\": [1, 0]}, {\"label\": 1, \"features\": [0, 1]}", kVecSchema) +
                  "let $m := get-estimator(\"NaiveBayes\", {\"smoothing\": 1})($d, {}) "
                  "return $m($d, {}).prediction";
  EXPECT_EQ(eval_text(q), "0\n1\n");
}

TEST(NaiveBayes, HandComputedParameters) {
  ml::Dataset data;
  data.rows = 2;
  data.dims = 2;
  data.x = {1, 0, 0, 1};
  data.y = {0, 1};
  ml::NaiveBayesModel m = ml::train_naive_bayes(data, 1.0);
  // theta_00 = log((1 + 1) / (1 + 2)), theta_01 = log(1 / 3).
  EXPECT_NEAR(m.theta[0][0], std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(m.theta[0][1], std::log(1.0 / 3.0), 1e-15);
  EXPECT_NEAR(m.log_priors[1], std::log(0.5), 1e-15);
  for (const auto& row : m.theta) {
    double total = 0;
    for (double t : row) total += std::exp(t);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(NaiveBayes, SingleClass) {
  std::string q = frame_let("d", "{\"label\": 1, \"features\": [1, 0]}, {\"label\": 1, \"features\": [0, 3]}", kVecSchema) +
                  "return get-estimator(\"NaiveBayes\", {})($d, {})($d, {}).prediction";
  EXPECT_EQ(eval_text(q), "1\n1\n");
}

const std::string kTextRows =
    "{\"label\": 0, \"x\": -2.0, \"y\": 0.5}, {\"label\": 1, \"x\": 1.5, \"y\": 0.25}, "
    "{\"label\": 0, \"x\": -1.0, \"y\": -0.5}, {\"label\": 1, \"x\": 2.5, \"y\": 1}";
const std::string kTextSchema = "{\"label\": \"double\", \"x\": \"double\", \"y\": \"double\"}";

TEST(Pipeline, FitsAndAppliesInOrder) {
  std::string q = frame_let("d", kTextRows, kTextSchema) +
                  "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"x\", \"y\"], \"outputCol\": \"f\"}) "
                  "let $svc := get-estimator(\"LinearSVC\", {\"featuresCol\": \"f\", \"maxIter\": 20}) "
                  "let $pm := get-estimator(\"Pipeline\", {\"stages\": [$va, $svc]})($d, {}) "
                  "let $out := $pm($d, {}) "
                  "return (keys(head($out)), count($out[$$.label eq $$.prediction]))";
  EXPECT_EQ(eval_text(q), "\"label\"\n\"x\"\n\"y\"\n\"f\"\n\"prediction\"\n4\n");
}

TEST(Pipeline, EqualsSequentialApplication) {
  std::string q = frame_let("d", kTextRows, kTextSchema) +
                  "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"x\", \"y\"], \"outputCol\": \"f\"}) "
                  "let $sc := get-estimator(\"MaxAbsScaler\", {\"inputCol\": \"f\", \"outputCol\": \"g\"}) "
                  "let $lr := get-estimator(\"LogisticRegression\", {\"featuresCol\": \"g\", \"maxIter\": 15}) "
                  "let $pm := get-estimator(\"Pipeline\", {\"stages\": [$va, $sc, $lr]})($d, {}) "
                  "let $d1 := $va($d, {}) let $m1 := $sc($d1, {}) let $d2 := $m1($d1, {}) "
                  "let $m2 := $lr($d2, {}) "
                  "return deep-equal($pm($d, {}), $m2($d2, {}))";
  EXPECT_EQ(eval_text(q), "true\n");
}

TEST(Pipeline, SingleTransformer) {
  std::string q = frame_let("d", "{\"s\": \"A b\"}", "{\"s\": \"string\"}") +
                  "let $t := get-transformer(\"Tokenizer\", {\"inputCol\": \"s\", \"outputCol\": \"w\"}) "
                  "let $pm := get-estimator(\"Pipeline\", {\"stages\": [$t]})($d, {}) "
                  "return deep-equal($pm($d, {}), $t($d, {}))";
  EXPECT_EQ(eval_text(q), "true\n");
}

TEST(Pipeline, StageErrors) {
  EXPECT_JQ_ERROR(ErrorCode::StageTypeError, eval_text("get-estimator(\"Pipeline\", {\"stages\": []})"));
  EXPECT_JQ_ERROR(ErrorCode::StageTypeError,
                  eval_text(frame_let("d", kTextRows, kTextSchema) +
                            "return get-estimator(\"Pipeline\", {\"stages\": [count#1]})($d, {})"));
  try {
    eval_text(frame_let("d", kTextRows, kTextSchema) +
              "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"nope\"], \"outputCol\": \"f\"}) "
              "return get-estimator(\"Pipeline\", {\"stages\": [$va]})($d, {})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownColumn);
    EXPECT_NE(std::string(e.what()).find("stage 0"), std::string::npos) << e.what();
  }
}

TEST(Persistence, RoundTripPredictionsAreIdentical) {
  TempDir dir;
  for (const char* est : {"LinearSVC", "LogisticRegression", "NaiveBayes"}) {
    std::string path = dir.file(std::string(est) + ".json");
    std::string rows = "{\"label\": 0, \"features\": [3, 0.5]}, {\"label\": 1, \"features\": [0.25, 4]}, "
                       "{\"label\": 1, \"features\": [1, 2]}";
    std::string q = frame_let("d", rows, kVecSchema) + "let $m := get-estimator(\"" + est +
                    "\", {})($d, {}) let $s := save-model($m, \"" + path + "\") "
                    "let $l := load-model(\"" + path + "\") "
                    "return (serialize($m($d, {})), serialize($l($d, {})))";
    std::vector<Item> out = run_query(q);
    ASSERT_EQ(out.size(), 2u) << est;
    EXPECT_EQ(canonical_serialize(out[0]), canonical_serialize(out[1])) << est;
  }
}

TEST(Persistence, PipelineModelAndTransformers) {
  TempDir dir;
  std::string path = dir.file("pm.json");
  std::string q = frame_let("d", kTextRows, kTextSchema) +
                  "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"x\", \"y\"], \"outputCol\": \"f\"}) "
                  "let $sc := get-estimator(\"MaxAbsScaler\", {\"inputCol\": \"f\", \"outputCol\": \"g\"}) "
                  "let $svc := get-estimator(\"LinearSVC\", {\"featuresCol\": \"g\"}) "
                  "let $pm := get-estimator(\"Pipeline\", {\"stages\": [$va, $sc, $svc]})($d, {}) "
                  "let $s := save-model($pm, \"" + path + "\") "
                  "return deep-equal($pm($d, {}), load-model(\"" + path + "\")($d, {}))";
  EXPECT_EQ(eval_text(q), "true\n");
}

TEST(Persistence, Errors) {
  TempDir dir;
  std::string martian = dir.write("m.json", "{\"kind\": \"martian\", \"params\": {}}");
  EXPECT_JQ_ERROR(ErrorCode::UnknownModelKind, eval_text("load-model(\"" + martian + "\")"));
  EXPECT_JQ_ERROR(ErrorCode::UnknownModelKind,
                  eval_text("declare function local:f($a, $b) { $a }; save-model(local:f#2, \"" + dir.file("x") + "\")"));
  EXPECT_JQ_ERROR(ErrorCode::IoError, eval_text("load-model(\"" + dir.file("missing.json") + "\")"));
  std::string broken = dir.write("b.json", "{\"kind\": \"LinearSVCModel\"}");
  EXPECT_JQ_ERROR(ErrorCode::UnknownModelKind, eval_text("load-model(\"" + broken + "\")"));
}

TEST(Models, CallTimeParamsOverride) {
  std::string q = frame_let("d", "{\"label\": 1, \"features\": [1]}", kVecSchema) +
                  "let $m := get-estimator(\"LinearSVC\", {})($d, {}) "
                  "return keys($m($d, {\"predictionCol\": \"p\"}))";
  EXPECT_EQ(eval_text(q), "\"label\"\n\"features\"\n\"p\"\n");
}

TEST(Models, LocalSequencesWithSchemaTagAreAccepted) {
  // A frame lowered by a filter keeps its schema and still trains.
  std::string q = frame_let("d", kTextRows, kTextSchema) +
                  "let $va := get-transformer(\"VectorAssembler\", {\"inputCols\": [\"x\", \"y\"], \"outputCol\": \"features\"}) "
                  "let $f := for $r in $d where $r.x gt -5 return $r "
                  "return count($va($f, {}))";
  EngineOptions local;
  local.policy = ModePolicy::ForceLocal;
  EXPECT_EQ(eval_text(q), "4\n");
  EXPECT_EQ(eval_text(q, local), "4\n");
}

}  // namespace
}  // namespace jqml::testing
