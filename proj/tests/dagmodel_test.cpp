#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "causim/dagmodel.hpp"
#include "causim/population.hpp"

using namespace causim;

namespace {

constexpr double kTol = 1e-12;
constexpr std::size_t Z = 0, X = 1, Y = 2;

BinaryDag chain(double p, double p0, double p1) {
  return build_dag<double>({"X", "Y"}, {{}, {"X"}}, {{p}, {p0, p1}});
}

}  // namespace

TEST(BuildDag, ValidatesStructure) {
  EXPECT_NO_THROW(chain(0.5, 0.1, 0.9));
  EXPECT_THROW(build_dag<double>({"X"}, {{"X"}}, {{0.5, 0.5}}), ValidationError);
  EXPECT_THROW(build_dag<double>({"A", "B", "C"}, {{}, {}, {"A", "B"}}, {{0.5}, {0.5}, {0.1, 0.2, 0.3}}),
               ValidationError);
  EXPECT_THROW(build_dag<double>({"A", "B"}, {{"B"}, {"A"}}, {{0.1, 0.2}, {0.1, 0.2}}), ValidationError);
  EXPECT_THROW(build_dag<double>({"A"}, {{}}, {{1.2}}), ValidationError);
  EXPECT_THROW(build_dag<double>({"A"}, {{"Q"}}, {{0.1, 0.2}}), ValidationError);
}

TEST(Joint, RootAndChain) {
  const auto root = joint_distribution(build_dag<double>({"R"}, {{}}, {{0.3}}));
  EXPECT_NEAR(root.probs[0], 0.7, kTol);
  EXPECT_NEAR(root.probs[1], 0.3, kTol);

  const auto j = joint_distribution(chain(0.5, 0.1, 0.9));
  EXPECT_NEAR(j.probs[0b11], 0.45, kTol);
  EXPECT_NEAR(j.total(), 1.0, kTol);
  EXPECT_THROW(joint_distribution(chain(0.5, 0.1, 0.9), 1), CapExceeded);
}

TEST(Joint, CommonCauseModelValues) {
  const auto j = joint_distribution(appendix_model());
  EXPECT_NEAR(query(j, {{Z, 1}}), 0.5, kTol);
  EXPECT_NEAR(query(j, {{X, 1}}), 0.5, kTol);
  EXPECT_NEAR(query(j, {{Y, 1}}), 0.5, kTol);
  EXPECT_NEAR(query(j, {{Y, 1}}, {{X, 1}}), 0.905, kTol);
  EXPECT_NEAR(query(j, {{Y, 0}}, {{X, 0}}), 0.905, kTol);

  const auto exact = joint_distribution(appendix_model<Rational>());
  EXPECT_EQ(query(exact, {{Y, 1}}, {{X, 1}}), Rational(181, 200));
  EXPECT_EQ(exact.total(), 1);
}

TEST(TwoVariable, MatchesHandProducts) {
  const auto m = two_variable_measure(0.5, 0.1, 0.9);
  // probs indexed X + 2Y.
  EXPECT_NEAR(m.probs[0b00], 0.45, kTol);
  EXPECT_NEAR(m.probs[0b10], 0.05, kTol);
  EXPECT_NEAR(m.probs[0b01], 0.05, kTol);
  EXPECT_NEAR(m.probs[0b11], 0.45, kTol);

  const auto zero = two_variable_measure(0.0, 0.3, 0.8);
  EXPECT_EQ(zero.probs[0b01], 0.0);
  EXPECT_EQ(zero.probs[0b11], 0.0);

  const auto indep = two_variable_measure(0.4, 0.7, 0.7);
  EXPECT_TRUE(cond_independent(indep, 0, 1, {}, 1e-12));
  EXPECT_THROW(two_variable_measure(1.1, 0.0, 0.0), ValidationError);
}

TEST(TwoVariable, EqualsChainJoint) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double p = u(gen), p0 = u(gen), p1 = u(gen);
    const auto a = two_variable_measure(p, p0, p1);
    const auto b = joint_distribution(chain(p, p0, p1));
    for (std::size_t x = 0; x < 4; ++x) EXPECT_NEAR(a.probs[x], b.probs[x], kTol);
  }
}

TEST(Query, EdgeCases) {
  const auto j = joint_distribution(appendix_model());
  EXPECT_NEAR(query(j, {}), 1.0, kTol);
  const auto forced = joint_distribution(intervene(appendix_model(), X, 1));
  EXPECT_THROW(query(forced, {{Y, 1}}, {{X, 0}}), ValidationError);
}

TEST(Intervene, CommonCauseAndChain) {
  const auto dag = appendix_model();
  const auto forced = intervene(dag, X, 1);
  EXPECT_TRUE(forced.parents(X).empty());
  EXPECT_EQ(forced.cpt(Y), dag.cpt(Y));
  EXPECT_NEAR(query(joint_distribution(forced), {{Y, 1}}), 0.5, kTol);

  const auto c = chain(0.3, 0.2, 0.85);
  EXPECT_NEAR(query(joint_distribution(intervene(c, 0, 1)), {{1, 1}}), 0.85, kTol);
  EXPECT_NEAR(query(joint_distribution(c), {{1, 1}}, {{0, 1}}), 0.85, kTol);

  const auto root_one = build_dag<double>({"A", "B"}, {{}, {"A"}}, {{1.0}, {0.2, 0.6}});
  EXPECT_EQ(joint_distribution(intervene(root_one, 0, 1)).probs, joint_distribution(root_one).probs);
  EXPECT_THROW(intervene(dag, 5, 1), ValidationError);
}

TEST(Intervene, IdempotentAndCommuting) {
  const auto dag = build_dag<double>({"A", "B", "C", "D"}, {{}, {"A"}, {"A", "B"}, {"C"}},
                                     {{0.3}, {0.2, 0.7}, {0.1, 0.4, 0.6, 0.9}, {0.25, 0.8}});
  EXPECT_EQ(intervene(intervene(dag, 2, 1), 2, 1), intervene(dag, 2, 1));
  EXPECT_EQ(intervene(intervene(dag, 1, 0), 2, 1), intervene(intervene(dag, 2, 1), 1, 0));
}

TEST(Intervene, RootInterventionEqualsConditioning) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 25; ++i) {
    const auto dag = build_dag<double>({"A", "B", "C"}, {{}, {"A"}, {"A", "B"}},
                                       {{u(gen)}, {u(gen), u(gen)}, {u(gen), u(gen), u(gen), u(gen)}});
    const auto joint = joint_distribution(dag);
    for (std::uint8_t a = 0; a < 2; ++a) {
      const auto forced = joint_distribution(intervene(dag, 0, a));
      for (std::size_t v : {1, 2})
        EXPECT_NEAR(query(joint, {{v, 1}}, {{0, a}}), query(forced, {{v, 1}}), kTol);
    }
  }
}

TEST(CondIndependent, CommonCauseProperties) {
  const auto j = joint_distribution(appendix_model());
  EXPECT_TRUE(cond_independent(j, X, Y, {Z}, 1e-9));
  EXPECT_FALSE(cond_independent(j, X, Y, {}, 1e-9));
}

TEST(JointProperties, NormalizedWithRootMarginals) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto dag = build_dag<double>({"A", "B", "C", "D", "E"},
                                       {{}, {}, {"A", "B"}, {"C"}, {"A", "D"}},
                                       {{u(gen)}, {u(gen)}, {u(gen), u(gen), u(gen), u(gen)},
                                        {u(gen), u(gen)}, {u(gen), u(gen), u(gen), u(gen)}});
    const auto joint = joint_distribution(dag);
    EXPECT_NEAR(joint.total(), 1.0, kTol);
    EXPECT_NEAR(query(joint, {{0, 1}}), dag.cpt(0)[0], kTol);
    EXPECT_NEAR(query(joint, {{1, 1}}), dag.cpt(1)[0], kTol);
  }
}

TEST(PopulationModel, FactorizationExamples) {
  const auto pop = Population::build(2, {}, {0, 0}, {0, 0});
  const auto dist = joint_distribution(build_dag<Rational>({"V"}, {{}}, {{Rational(7, 10)}}));
  const std::vector<std::size_t> a{0};
  const auto r = verify_population_model_independence(pop, dist, a);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.max_error, 0);
  // Direct enumeration of the product space for v = 1.
  EXPECT_EQ(Rational(1, 2) * dist.probs[1], Rational(35, 100));

  const std::vector<std::size_t> none;
  EXPECT_TRUE(verify_population_model_independence(pop, dist, none).holds);
  const std::vector<std::size_t> all{0, 1};
  EXPECT_TRUE(verify_population_model_independence(pop, dist, all).holds);

  const auto approx = joint_distribution(appendix_model());
  const auto pop5 = Population::build(5, {}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
  const std::vector<std::size_t> some{1, 3, 4};
  EXPECT_TRUE(verify_population_model_independence(pop5, approx, some).holds);
}

TEST(SampleDag, DeterministicAndConvergent) {
  const auto fixed = build_dag<double>({"A", "B"}, {{}, {"A"}}, {{1.0}, {1.0, 0.0}});
  SeededRng rng(4);
  EXPECT_EQ(sample_dag(fixed, rng), 0b01u);

  const auto dag = appendix_model();
  SeededRng a(10), b(10);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_dag(dag, a), sample_dag(dag, b));

  SeededRng big(2026);
  const int draws = 100000;
  int x_ones = 0;
  for (int i = 0; i < draws; ++i) x_ones += (sample_dag(dag, big) >> X) & 1U;
  EXPECT_LE(std::abs(x_ones / static_cast<double>(draws) - 0.5), 4.0 * std::sqrt(0.25 / draws));
}
