#include <gtest/gtest.h>

#include "phmm/errors.hpp"
#include "phmm/io.hpp"
#include "phmm/model.hpp"
#include "test_support.hpp"

namespace phmm {
namespace {

TEST(ValidateModel, ReferenceModelIsValid) {
  EXPECT_NO_THROW(validate_model(reference_model()));
}

TEST(ValidateModel, IdentityTransitionsUniformEmissions) {
  HmmModel m;
  m.pi = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  m.A = Eigen::MatrixXd::Identity(3, 3);
  m.B = Eigen::MatrixXd::Constant(3, 4, 0.25);
  EXPECT_NO_THROW(validate_model(m));
}

TEST(ValidateModel, RowNotNormalizedNamesRowAndSum) {
  HmmModel m = reference_model();
  m.A(1, 2) -= 0.1;
  try {
    validate_model(m);
    FAIL() << "expected InvalidModel";
  } catch (const InvalidModel& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("A row 1"), std::string::npos) << what;
    EXPECT_NE(what.find("0.9"), std::string::npos) << what;
  }
}

TEST(ValidateModel, RejectsOutOfRangeAndShapeErrors) {
  HmmModel m = reference_model();
  m.B(0, 0) = -0.1;
  m.B(0, 1) = 1.0;
  EXPECT_THROW(validate_model(m), InvalidModel);

  m = reference_model();
  m.pi = Eigen::Vector2d(0.5, 0.5);
  EXPECT_THROW(validate_model(m), InvalidModel);

  m = reference_model();
  m.pi(0) = std::nan("");
  EXPECT_THROW(validate_model(m), InvalidModel);
}

TEST(ValidateObservations, RejectsEmptyAndOutOfAlphabet) {
  const HmmModel m = reference_model();
  EXPECT_THROW(validate_observations(m, std::vector<int>{}), InvalidInput);
  EXPECT_THROW(validate_observations(m, std::vector<int>{0, 3}), InvalidInput);
  EXPECT_THROW(validate_observations(m, std::vector<int>{-1}), InvalidInput);
  EXPECT_NO_THROW(validate_observations(m, std::vector<int>{0, 1, 2}));
}

TEST(FloorAndRenormalize, RaisesZerosAndKeepsRowsNormalized) {
  HmmModel m = testing::alternating_model(Eigen::Matrix2d::Identity());
  floor_and_renormalize(m);
  EXPECT_NO_THROW(validate_model(m));
  EXPECT_GT(m.A(0, 0), 0.0);
  EXPECT_NEAR(m.A(0, 0), kProbabilityFloor, 1e-20);
  EXPECT_NEAR(m.A(0, 1), 1.0, 1e-11);
}

TEST(RandomModel, ValidAndSeedDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HmmModel a = random_model(3, 4, seed);
    const HmmModel b = random_model(3, 4, seed);
    EXPECT_NO_THROW(validate_model(a));
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.B, b.B);
    EXPECT_EQ(a.pi, b.pi);
  }
  EXPECT_NE(random_model(3, 3, 1).A, random_model(3, 3, 2).A);
}

TEST(ModelJson, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const HmmModel m = random_model(1 + static_cast<int>(seed % 4),
                                    1 + static_cast<int>(seed % 5), seed);
    const auto text = io::model_to_json(m).dump();
    const HmmModel back = io::model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.pi, m.pi);
    EXPECT_EQ(back.A, m.A);
    EXPECT_EQ(back.B, m.B);
  }
}

TEST(ModelJson, RejectsInvalidDocuments) {
  auto doc = io::model_to_json(reference_model());
  doc["A"][0][0] = 0.5;
  EXPECT_THROW(io::model_from_json(doc), InvalidModel);

  doc = io::model_to_json(reference_model());
  doc["num_states"] = 2;
  EXPECT_THROW(io::model_from_json(doc), InvalidModel);

  doc = io::model_to_json(reference_model());
  doc.erase("B");
  EXPECT_THROW(io::model_from_json(doc), InvalidInput);

  doc = io::model_to_json(reference_model());
  doc["B"][1] = {0.5, 0.5};
  EXPECT_THROW(io::model_from_json(doc), InvalidInput);
}

TEST(SequenceIo, WhitespaceAndJsonForms) {
  EXPECT_EQ(io::parse_sequence("0\n2\n1\n"), (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(io::parse_sequence("0 2\t1"), (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(io::parse_sequence(" [0, 2, 1]"), (std::vector<int>{0, 2, 1}));
  EXPECT_THROW(io::parse_sequence("0 x 1"), InvalidInput);
  EXPECT_THROW(io::parse_sequence("[0, 1.5]"), InvalidInput);
  EXPECT_THROW(io::parse_sequence("1.5"), InvalidInput);
}

TEST(LabelIo, UnderscoreIsUnobserved) {
  const LabelSequence labels = io::parse_labels("_\n1\n_\n0\n");
  EXPECT_EQ(labels, (LabelSequence{kUnobserved, 1, kUnobserved, 0}));
  EXPECT_EQ(io::format_labels(labels), "_\n1\n_\n0\n");
  EXPECT_THROW(io::parse_labels("_ -2"), InvalidInput);
  EXPECT_THROW(io::parse_labels("s1"), InvalidInput);
}

}  // namespace
}  // namespace phmm
