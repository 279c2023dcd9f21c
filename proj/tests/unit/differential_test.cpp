#include "support/reference_eval.hpp"
#include "support/test_util.hpp"

#include <random>

namespace jqml::testing {
namespace {

// Random FLWOR queries against a naive tuple-stream interpreter.
TEST(Differential, RandomQueriesMatchReference) {
  std::mt19937_64 rng(20240607);
  for (int i = 0; i < 500; ++i) {
    RPtr query = generate_query(rng);
    std::string text = print_reference(*query);
    std::vector<Item> expected = reference_evaluate(*query);
    for (ModePolicy policy : {ModePolicy::Auto, ModePolicy::ForceLocal}) {
      std::vector<Item> actual;
      ASSERT_NO_THROW(actual = run_query(text, {policy})) << text;
      ASSERT_EQ(actual.size(), expected.size()) << text;
      for (std::size_t k = 0; k < actual.size(); ++k) {
        EXPECT_TRUE(deep_equal(actual[k], expected[k]))
            << text << "\nitem " << k << ": " << canonical_serialize(actual[k]) << " vs "
            << canonical_serialize(expected[k]);
      }
    }
  }
}

}  // namespace
}  // namespace jqml::testing
