#include <gtest/gtest.h>

#include "test_support.hpp"
#include "varw/errors.hpp"
#include "varw/model_io.hpp"

namespace varw {
namespace {

TEST(ParseModel, ReadsAllFields) {
  const auto p = parse_model(R"({
    "kernel": [[0.0, 0.5], [0.4, 0.0]],
    "lambda": [1, 2], "sigma": [0.2, 0.3], "nu": [0.5, 0.3],
    "labels": ["north", "south"]
  })");
  ASSERT_EQ(p.num_villages(), 2u);
  EXPECT_EQ(p.kernel(0, 1), 0.5);
  EXPECT_EQ(p.kernel(1, 0), 0.4);
  EXPECT_EQ(p.sleep_rates, (Vector{1.0, 2.0}));
  EXPECT_EQ(p.init_sleepers, (Vector{0.2, 0.3}));
  EXPECT_EQ(p.init_actives, (Vector{0.5, 0.3}));
  EXPECT_EQ(p.labels, (std::vector<std::string>{"north", "south"}));
}

TEST(ParseModel, RoundTripsThroughDump) {
  const auto p = testing::two_village();
  const auto q = parse_model(dump_model(p));
  EXPECT_EQ(q.kernel.row(0)[1], p.kernel.row(0)[1]);
  EXPECT_EQ(q.sleep_rates, p.sleep_rates);
  EXPECT_EQ(q.init_sleepers, p.init_sleepers);
  EXPECT_EQ(q.init_actives, p.init_actives);
}

TEST(ParseModel, RejectsUnknownKey) {
  try {
    parse_model(R"({"kernel": [[0.5]], "lambda": [1], "sigma": [0], "nu": [1], "mu": 3})");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown key 'mu'"), std::string::npos);
  }
}

TEST(ParseModel, RejectsMissingKey) {
  try {
    parse_model(R"({"kernel": [[0.5]], "lambda": [1], "sigma": [0]})");
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("missing key 'nu'"), std::string::npos);
  }
}

TEST(ParseModel, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_model("{ not json"), ModelError);
  EXPECT_THROW(parse_model("[1, 2]"), ModelError);
  EXPECT_THROW(parse_model(R"({"kernel": [[0.5, 0.1]], "lambda": [1], "sigma": [0], "nu": [1]})"),
               ModelError);
  EXPECT_THROW(parse_model(R"({"kernel": [["x"]], "lambda": [1], "sigma": [0], "nu": [1]})"),
               ModelError);
  EXPECT_THROW(parse_model(R"({"kernel": [[0.5]], "lambda": 1, "sigma": [0], "nu": [1]})"),
               ModelError);
}

TEST(LoadModel, MissingFile) {
  EXPECT_THROW(load_model("/nonexistent/model.json"), ModelError);
}

}  // namespace
}  // namespace varw
