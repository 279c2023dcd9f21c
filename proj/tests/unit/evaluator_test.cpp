#include "support/test_util.hpp"

namespace jqml::testing {
namespace {

std::string eval(const std::string& q) { return eval_text(q); }

TEST(Evaluator, Literals) {
  EXPECT_EQ(eval("1, 2.5, 1e0, \"a\", true, null"), "1\n2.5\n1\n\"a\"\ntrue\nnull\n");
  EXPECT_EQ(eval("()"), "");
}

TEST(Evaluator, Arithmetic) {
  EXPECT_EQ(eval("1 + 2 * 3"), "7\n");
  EXPECT_EQ(eval("7 div 2"), "3.5\n");
  EXPECT_EQ(eval("7 idiv 2, 7 mod 2"), "3\n1\n");
  EXPECT_EQ(eval("1.5 + 1"), "2.5\n");
  EXPECT_EQ(eval("-(3)"), "-3\n");
  EXPECT_EQ(eval("() + 1"), "");
  EXPECT_EQ(eval("null + 1"), "null\n");
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("(1, 2) + 1"));
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("\"a\" + 1"));
  EXPECT_JQ_ERROR(ErrorCode::DivisionByZero, eval("1 div 0"));
}

TEST(Evaluator, Comparisons) {
  EXPECT_EQ(eval("1 eq 1.0, 2 lt 1, \"a\" lt \"b\", null eq null, null lt 0"), "true\nfalse\ntrue\ntrue\ntrue\n");
  EXPECT_EQ(eval("\"1\" eq 1.0"), "true\n");
  EXPECT_EQ(eval("() eq 1"), "");
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("true eq 1"));
}

TEST(Evaluator, LogicAndEbv) {
  EXPECT_EQ(eval("1 and \"\", 0 or \"x\", not(())"), "false\ntrue\ntrue\n");
  EXPECT_EQ(eval("if (null) then 1 else 2"), "2\n");
  EXPECT_JQ_ERROR(ErrorCode::EbvError, eval("if ((1, 2)) then 1 else 2"));
  EXPECT_JQ_ERROR(ErrorCode::EbvError, eval("if ({}) then 1 else 2"));
}

TEST(Evaluator, RangeAndComma) {
  EXPECT_EQ(eval("1 to 3, 5 to 4"), "1\n2\n3\n");
  EXPECT_EQ(eval("count(1 to 1000000)"), "1000000\n");
}

TEST(Evaluator, Constructors) {
  EXPECT_EQ(eval("{\"a\": 1, \"b\": (), \"c\": (1, 2)}"), "{\"a\": 1, \"b\": null, \"c\": [1, 2]}\n");
  EXPECT_EQ(eval("{a: 1}"), "{\"a\": 1}\n");
  EXPECT_EQ(eval("[1 to 3], []"), "[1, 2, 3]\n[]\n");
  EXPECT_EQ(eval("{| {\"a\": 1}, {\"b\": 2} |}"), "{\"a\": 1, \"b\": 2}\n");
  EXPECT_JQ_ERROR(ErrorCode::DuplicateKeyInMerge, eval("{| {\"a\": 1}, {\"a\": 2} |}"));
  EXPECT_JQ_ERROR(ErrorCode::DuplicateKey, eval("{\"a\": 1, \"a\": 2}"));
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("{| 1 |}"));
}

TEST(Evaluator, LookupAndPredicate) {
  EXPECT_EQ(eval("({\"a\": 1}, 3, {\"a\": 2}, {\"b\": 0}).a"), "1\n2\n");
  EXPECT_EQ(eval("let $k := \"b\" return {\"b\": 9}.$k"), "9\n");
  EXPECT_EQ(eval("{\"a b\": 1}.\"a b\""), "1\n");
  EXPECT_EQ(eval("(10 to 20)[$$ mod 5 eq 0]"), "10\n15\n20\n");
  EXPECT_EQ(eval("(10 to 20)[2]"), "11\n");
  EXPECT_EQ(eval("(10 to 20)[{\"p\": 3}.p]"), "12\n");
}

TEST(Evaluator, Flwor) {
  EXPECT_EQ(eval("for $x in 1 to 3 let $y := $x * $x where $y gt 1 return $y"), "4\n9\n");
  EXPECT_EQ(eval("for $x at $i in (\"a\", \"b\") return {\"i\": $i, \"x\": $x}"),
            "{\"i\": 1, \"x\": \"a\"}\n{\"i\": 2, \"x\": \"b\"}\n");
  EXPECT_EQ(eval("for $x in (3, 1, 2) order by $x descending return $x"), "3\n2\n1\n");
  EXPECT_EQ(eval("for $x in ({\"k\": 2}, {}, {\"k\": 1}) order by $x.k return count($x.k)"), "0\n1\n1\n");
  EXPECT_EQ(eval("for $a in (1, 2), $b in (10, 20) return $a + $b"), "11\n21\n12\n22\n");
  EXPECT_EQ(eval("let $a := 1, $b := $a + 1 return $b"), "2\n");
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("for $x in (1, \"a\") order by $x return $x"));
}

TEST(Evaluator, OrderByIsStable) {
  EXPECT_EQ(eval("for $x in ({\"k\": 1, \"v\": \"a\"}, {\"k\": 0, \"v\": \"b\"}, {\"k\": 1, \"v\": \"c\"}) "
                 "order by $x.k return $x.v"),
            "\"b\"\n\"a\"\n\"c\"\n");
}

TEST(Evaluator, UserFunctions) {
  EXPECT_EQ(eval("declare function local:fact($n) { if ($n le 1) then 1 else $n * local:fact($n - 1) }; "
                 "local:fact(20)"),
            "2432902008176640000\n");
  EXPECT_EQ(eval("declare function local:twice($f, $x) { $f($f($x)) }; "
                 "declare function local:inc($x) { $x + 1 }; local:twice(local:inc#1, 5)"),
            "7\n");
  EXPECT_EQ(eval("let $f := count#1 return $f((1, 2, 3))"), "3\n");
  EXPECT_JQ_ERROR(ErrorCode::ArityMismatch, eval("let $f := count#1 return $f(1, 2)"));
  EXPECT_JQ_ERROR(ErrorCode::NotAFunction, eval("let $f := 1 return $f(1)"));
}

TEST(Evaluator, Externals) {
  Query q = Query::compile("$x + 1");
  EXPECT_EQ(q.externals(), std::vector<std::string>{"x"});
  EXPECT_EQ(serialize_all(q.collect({{"x", Sequence::single(Item::integer(41))}})), "42\n");
  EXPECT_JQ_ERROR(ErrorCode::UndefinedVariable, q.collect());
}

TEST(Evaluator, ErrorsCarryPositions) {
  try {
    eval("1 +\n  \"a\"");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeError);
    EXPECT_TRUE(e.pos().valid());
  }
}

TEST(Evaluator, MaterializationCap) {
  EngineOptions small;
  small.cap = 5;
  EXPECT_JQ_ERROR(ErrorCode::MaterializationCapExceeded, run_query("let $x := 1 to 6 return count($x)", small));
  EXPECT_EQ(serialize_all(run_query("let $x := 1 to 5 return count($x)", small)), "5\n");
  // Streaming without binding is not capped.
  EXPECT_EQ(serialize_all(run_query("count(for $x in 1 to 100 return $x)", small)), "100\n");
  EXPECT_JQ_ERROR(ErrorCode::MaterializationCapExceeded,
                  run_query("for $x in 1 to 6 order by $x return $x", small));
}

TEST(Evaluator, ResultIsLazy) {
  Query q = Query::compile("for $x in 1 to 1000000000 return $x * 2");
  auto cursor = q.evaluate().open();
  EXPECT_EQ(canonical_serialize(*cursor->next()), "2");
  EXPECT_EQ(canonical_serialize(*cursor->next()), "4");
}

TEST(Evaluator, Builtins) {
  EXPECT_EQ(eval("string(1.50), string(()), concat(\"a\", 1), string-join((1, 2), \"-\")"),
            "\"1.5\"\n\"\"\n\"a1\"\n\"1-2\"\n");
  EXPECT_EQ(eval("sum((1, 2.5)), avg((1, 2)), min((3, 1)), max((\"a\", \"b\")), sum(())"), "3.5\n1.5\n1\n\"b\"\n0\n");
  EXPECT_EQ(eval("exists(()), empty(()), boolean(\"x\"), abs(-2), floor(2.5), floor(-2.5)"),
            "false\ntrue\ntrue\n2\n2\n-3\n");
  EXPECT_EQ(eval("size([1, 2]), members([1, [2]]), keys(({\"a\": 1}, {\"a\": 2, \"b\": 3}))"),
            "2\n1\n[2]\n\"a\"\n\"b\"\n");
  EXPECT_EQ(eval("distinct-values((1, 1.0, \"1\", 2)), deep-equal((1, [2]), (1.0, [2]))"),
            "1\n\"1\"\n2\ntrue\n");
  EXPECT_EQ(eval("upper-case(\"ab\"), substring-before(\"a=b\", \"=\"), substring-after(\"a=b\", \"=\"), string-length(\"hé\")"),
            "\"AB\"\n\"a\"\n\"b\"\n2\n");
  EXPECT_EQ(eval("number(\"2.5\"), serialize({\"a\": [1]})"), "2.5\n\"{\\\"a\\\": [1]}\"\n");
  EXPECT_EQ(eval("string(number(\"x\"))"), "\"NaN\"\n");
  EXPECT_JQ_ERROR(ErrorCode::TypeError, eval("string({})"));
}

TEST(Evaluator, FigureBuiltins) {
  std::string line = "animal:0.7420,outdoor:0.9710,pet:0.6130,white:0.6790 -4.893 -3.803";
  EXPECT_EQ(eval("count(tokenize(\"" + line + "\", \" \"))"), "3\n");
  EXPECT_EQ(eval("head(tokenize(\"" + line + "\", \" \"))"), "\"animal:0.7420,outdoor:0.9710,pet:0.6130,white:0.6790\"\n");
  EXPECT_EQ(eval("tail(tokenize(\"a b c\", \" \"))"), "\"b\"\n\"c\"\n");
  EXPECT_EQ(eval("tokenize(\"a,b,\", \",\")"), "\"a\"\n\"b\"\n");
  EXPECT_EQ(eval("tokenize(\"a,,b\", \",\")"), "\"a\"\n\"\"\n\"b\"\n");
  EXPECT_EQ(eval("tokenize(\"\", \",\")"), "");
  EXPECT_EQ(eval("head(()), tail(())"), "");
  EXPECT_EQ(eval("contains(\"indoor:0.3\", \"indoor\"), contains(\"outdoor\", \"indoor\")"), "true\nfalse\n");
  EXPECT_JQ_ERROR(ErrorCode::InvalidArgument, eval("tokenize(\"a\", \"\")"));
}

TEST(Evaluator, TextFiles) {
  TempDir dir;
  std::string lines = dir.write("a.txt", "x y\r\nz\n");
  std::string json = dir.write("a.jsonl", "{\"a\": 1}\n\n[2]\n");
  EXPECT_EQ(eval("unparsed-text-lines(\"" + lines + "\")"), "\"x y\"\n\"z\"\n");
  EXPECT_EQ(eval("json-lines(\"" + json + "\")"), "{\"a\": 1}\n[2]\n");
  EXPECT_JQ_ERROR(ErrorCode::IoError, eval("unparsed-text-lines(\"" + dir.file("missing") + "\")"));
  std::string bad = dir.write("bad.jsonl", "{\n");
  EXPECT_JQ_ERROR(ErrorCode::JsonParseError, eval("json-lines(\"" + bad + "\")"));
}

}  // namespace
}  // namespace jqml::testing
