#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "causim/population.hpp"

using namespace causim;

namespace {

constexpr double kTol = 1e-12;

Population four() {
  return Population::build(4, {{"a", {1, 1, 0, 0}}}, {1, 1, 0, 0}, {0, 0, 0, 0});
}

Population random_population(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint8_t> a(n);
  std::vector<double> tau(n), nu(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::uint8_t>(i % 2);
    tau[i] = u(gen);
    nu[i] = u(gen);
  }
  std::shuffle(a.begin(), a.end(), gen);
  return Population::build(n, {{"a", a}}, tau, nu);
}

}  // namespace

TEST(Population, BuildsValidPopulation) {
  const auto pop = four();
  EXPECT_EQ(pop.size(), 4u);
  EXPECT_EQ(pop.attribute_count(), 1u);
  const auto view = pop.view(0);
  EXPECT_EQ(view.support_size, 2u);
  EXPECT_EQ(view.support_size + view.complement_size, pop.size());
}

TEST(Population, NoAttributesIsLegal) {
  EXPECT_NO_THROW(Population::build(2, {}, {0.5, 0.5}, {0.1, 0.2}));
}

TEST(Population, RejectsBadInput) {
  EXPECT_THROW(Population::build(4, {}, {1.5, 0, 0, 0}, {0, 0, 0, 0}), ValidationError);
  EXPECT_THROW(Population::build(3, {{"a", {1, 0}}}, {0, 0, 0}, {0, 0, 0}), ValidationError);
  EXPECT_THROW(Population::build(0, {}, {}, {}), ValidationError);
  EXPECT_THROW(Population::build(2, {}, {0, 0}, {0, -0.1}), ValidationError);
  EXPECT_THROW(Population::build(2, {{"a", {0, 2}}}, {0, 0}, {0, 0}), ValidationError);
  EXPECT_THROW(Population::build(1, {{"a", {0}}, {"a", {1}}}, {0}, {0}), ValidationError);
}

TEST(Population, ExpandsBlocksInOrder) {
  const auto pop = expand_blocks({{2, {{"a", 1}}, 0.9, 0.1}, {1, {{"a", 0}}, 0.2, 0.3}});
  EXPECT_EQ(pop.size(), 3u);
  EXPECT_EQ(pop.attribute(0).values, (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(pop.tau(), (std::vector<double>{0.9, 0.9, 0.2}));
  EXPECT_THROW(expand_blocks({{1, {{"a", 1}}, 0, 0}, {1, {{"b", 1}}, 0, 0}}), ValidationError);
}

TEST(Population, Summary) {
  const auto s = population_summary(four());
  EXPECT_NEAR(s.tau_bar, 0.5, kTol);
  EXPECT_NEAR(s.nu_bar, 0.0, kTol);
  EXPECT_NEAR(s.true_effect, 0.5, kTol);

  const auto all = population_summary(Population::build(3, {}, {1, 1, 1}, {0, 0, 0}));
  EXPECT_NEAR(all.tau_bar, 1.0, kTol);
  EXPECT_NEAR(all.nu_bar, 0.0, kTol);
  EXPECT_NEAR(all.true_effect, 1.0, kTol);
}

TEST(Population, ConditionalEffect) {
  const auto pop = four();
  EXPECT_NEAR(conditional_effect(pop, 0, Side::one), 1.0, kTol);
  EXPECT_NEAR(conditional_effect(pop, 0, Side::zero), 0.0, kTol);
  const auto ones = Population::build(2, {{"a", {1, 1}}}, {1, 0}, {0, 0});
  EXPECT_THROW(conditional_effect(ones, 0, Side::zero), ValidationError);
}

TEST(Population, ConditionalResponseProb) {
  const auto pop = four();
  EXPECT_NEAR(conditional_response_prob(pop, 0, Side::one, Arm::treated), 1.0, kTol);
  EXPECT_NEAR(conditional_response_prob(pop, 0, Side::one, Arm::control), 0.0, kTol);
  EXPECT_NEAR(conditional_response_prob(pop, 0, Side::zero, Arm::treated), 0.0, kTol);
  const auto zeros = Population::build(2, {{"a", {0, 0}}}, {1, 0}, {0, 0});
  EXPECT_THROW(conditional_response_prob(zeros, 0, Side::one, Arm::treated), ValidationError);
}

TEST(Population, AttributeEffect) {
  EXPECT_NEAR(attribute_effect(four(), 0, 0.5), 0.5, kTol);
  const auto flat_tau = Population::build(4, {{"a", {1, 1, 0, 0}}}, {0.3, 0.3, 0.3, 0.3},
                                          {1, 0, 0, 1});
  EXPECT_NEAR(attribute_effect(flat_tau, 0, 1.0), 0.0, kTol);
  const auto nu_split = Population::build(4, {{"a", {1, 1, 0, 0}}}, {0, 0, 0, 0}, {1, 1, 0, 0});
  EXPECT_NEAR(attribute_effect(nu_split, 0, 0.0), 1.0, kTol);
  EXPECT_THROW(attribute_effect(four(), 0, 1.5), ValidationError);
}

TEST(Population, ResponseProb) {
  const auto pop = four();
  EXPECT_NEAR(response_prob(pop, 0.5), 0.25, kTol);
  const auto s = population_summary(pop);
  EXPECT_NEAR(response_prob(pop, 0.0), s.nu_bar, kTol);
  EXPECT_NEAR(response_prob(pop, 1.0), s.tau_bar, kTol);
}

TEST(PopulationProperties, RandomPopulations) {
  std::mt19937_64 gen(20261017);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 40;
    const auto pop = random_population(gen, n);
    const auto s = population_summary(pop);
    const auto [tmin, tmax] = std::minmax_element(pop.tau().begin(), pop.tau().end());
    const auto [nmin, nmax] = std::minmax_element(pop.nu().begin(), pop.nu().end());
    EXPECT_LE(*tmin, s.tau_bar + kTol);
    EXPECT_GE(*tmax, s.tau_bar - kTol);
    EXPECT_LE(*nmin, s.nu_bar + kTol);
    EXPECT_GE(*nmax, s.nu_bar - kTol);

    // Affine in the treatment fraction.
    const double f = frac(gen);
    EXPECT_NEAR(response_prob(pop, f), s.nu_bar + f * (s.tau_bar - s.nu_bar), kTol);

    // Weighted recombination of the two attribute sides.
    const auto view = pop.view(0);
    const double w1 = static_cast<double>(view.support_size);
    const double w0 = static_cast<double>(view.complement_size);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(w1 * conditional_response_prob(pop, 0, Side::one, Arm::treated) +
                    w0 * conditional_response_prob(pop, 0, Side::zero, Arm::treated),
                nn * s.tau_bar, 1e-10);
    EXPECT_NEAR(w1 * conditional_response_prob(pop, 0, Side::one, Arm::control) +
                    w0 * conditional_response_prob(pop, 0, Side::zero, Arm::control),
                nn * s.nu_bar, 1e-10);
  }
}

TEST(PopulationProperties, EqualOutcomesCancel) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto base = random_population(gen, 2 + trial % 10);
    const auto pop = Population::build(base.size(), base.attributes(), base.tau(), base.tau());
    EXPECT_NEAR(population_summary(pop).true_effect, 0.0, kTol);
    EXPECT_NEAR(conditional_effect(pop, 0, Side::one), 0.0, kTol);
    EXPECT_NEAR(conditional_effect(pop, 0, Side::zero), 0.0, kTol);
  }
}
