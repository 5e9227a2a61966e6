#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causim/errors.hpp"

namespace causim {

/// Value of a binary attribute on which a quantity is conditioned.
enum class Side : std::uint8_t { zero = 0, one = 1 };

/// Treatment arm.
enum class Arm : std::uint8_t { control = 0, treated = 1 };

/// A named binary attribute a_j : N -> {0, 1}.
struct Attribute {
  std::string name;
  std::vector<std::uint8_t> values;
};

/// Support sizes of one attribute: |a_j| and n - |a_j|.
struct AttributeView {
  std::size_t index = 0;
  std::size_t support_size = 0;
  std::size_t complement_size = 0;

  std::size_t side_size(Side side) const {
    return side == Side::one ? support_size : complement_size;
  }
};

/// A fixed finite population: per-individual binary attributes plus the
/// potential-outcome response probabilities tau (if treated) and nu (if not).
/// Individuals are indexed 0..n-1. Immutable once built.
class Population {
 public:
  static Population build(std::size_t n, std::vector<Attribute> attributes,
                          std::vector<double> tau, std::vector<double> nu) {
    detail::require(n >= 1, "population must have at least one individual");
    detail::require(tau.size() == n && nu.size() == n,
                    "length mismatch: tau/nu must have length n");
    for (std::size_t i = 0; i < n; ++i) {
      detail::require(tau[i] >= 0.0 && tau[i] <= 1.0 && nu[i] >= 0.0 &&
                          nu[i] <= 1.0,
                      "probability out of range at individual " +
                          std::to_string(i));
    }
    for (std::size_t j = 0; j < attributes.size(); ++j) {
      const auto& a = attributes[j];
      detail::require(a.values.size() == n,
                      "length mismatch: attribute '" + a.name + "'");
      detail::require(
          std::all_of(a.values.begin(), a.values.end(),
                      [](std::uint8_t v) { return v <= 1; }),
          "attribute '" + a.name + "' must be binary");
      detail::require(!a.name.empty() &&
                          a.name.find_first_of(",\n\r\"") == std::string::npos,
                      "invalid attribute name '" + a.name + "'");
      for (std::size_t l = 0; l < j; ++l)
        detail::require(attributes[l].name != a.name,
                        "duplicate attribute name '" + a.name + "'");
    }
    Population pop;
    pop.n_ = n;
    pop.attributes_ = std::move(attributes);
    pop.tau_ = std::move(tau);
    pop.nu_ = std::move(nu);
    return pop;
  }

  std::size_t size() const { return n_; }
  std::size_t attribute_count() const { return attributes_.size(); }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t j) const {
    detail::require(j < attributes_.size(), "attribute index out of range");
    return attributes_[j];
  }
  const std::vector<double>& tau() const { return tau_; }
  const std::vector<double>& nu() const { return nu_; }

  std::optional<std::size_t> attribute_index(const std::string& name) const {
    for (std::size_t j = 0; j < attributes_.size(); ++j)
      if (attributes_[j].name == name) return j;
    return std::nullopt;
  }

  AttributeView view(std::size_t j) const {
    const auto& values = attribute(j).values;
    const auto ones = static_cast<std::size_t>(
        std::count(values.begin(), values.end(), std::uint8_t{1}));
    return {j, ones, n_ - ones};
  }

  /// Attribute tuple (a_1(i), ..., a_m(i)) of individual i.
  std::vector<std::uint8_t> row(std::size_t i) const {
    std::vector<std::uint8_t> out;
    out.reserve(attributes_.size());
    for (const auto& a : attributes_) out.push_back(a.values[i]);
    return out;
  }

 private:
  Population() = default;

  std::size_t n_ = 0;
  std::vector<Attribute> attributes_;
  std::vector<double> tau_;
  std::vector<double> nu_;
};

/// Run of identical individuals in the block-generator form.
struct PopulationBlock {
  std::size_t count = 0;
  std::vector<std::pair<std::string, std::uint8_t>> attrs;
  double tau = 0.0;
  double nu = 0.0;
};

/// Expands blocks in order; every block must carry the same attribute names.
inline Population expand_blocks(const std::vector<PopulationBlock>& blocks) {
  detail::require(!blocks.empty(), "block form needs at least one block");
  std::vector<Attribute> attributes;
  for (const auto& [name, value] : blocks.front().attrs)
    attributes.push_back({name, {}});
  std::vector<double> tau;
  std::vector<double> nu;
  for (const auto& block : blocks) {
    detail::require(block.attrs.size() == attributes.size(),
                    "every block must define the same attributes");
    for (const auto& [name, value] : block.attrs) {
      auto it = std::find_if(attributes.begin(), attributes.end(),
                             [&](const Attribute& a) { return a.name == name; });
      detail::require(it != attributes.end(),
                      "block defines unknown attribute '" + name + "'");
      it->values.insert(it->values.end(), block.count, value);
    }
    tau.insert(tau.end(), block.count, block.tau);
    nu.insert(nu.end(), block.count, block.nu);
  }
  const std::size_t n = tau.size();
  return Population::build(n, std::move(attributes), std::move(tau),
                           std::move(nu));
}

struct PopulationSummary {
  double tau_bar = 0.0;
  double nu_bar = 0.0;
  double true_effect = 0.0;  // tau_bar - nu_bar
};

namespace detail {

inline double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

inline double side_mean(const Population& pop, std::size_t j, Side side,
                        const std::vector<double>& values) {
  const auto view = pop.view(j);
  require(view.side_size(side) > 0,
          "degenerate attribute side: no individual has '" +
              pop.attribute(j).name + "' = " +
              std::to_string(static_cast<int>(side)));
  const auto want = static_cast<std::uint8_t>(side);
  const auto& a = pop.attribute(j).values;
  double sum = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (a[i] == want) sum += values[i];
  return sum / static_cast<double>(view.side_size(side));
}

inline void require_fraction(double treat_frac) {
  require(treat_frac >= 0.0 && treat_frac <= 1.0,
          "treatment fraction must lie in [0, 1]");
}

}  // namespace detail

inline PopulationSummary population_summary(const Population& pop) {
  const double tau_bar = detail::mean(pop.tau());
  const double nu_bar = detail::mean(pop.nu());
  return {tau_bar, nu_bar, tau_bar - nu_bar};
}

/// Mean of tau (treated) or nu (control) over {i : a_j(i) = side}; this is
/// Pr(R_k = 1 | T_k = arm, A_kj = side) in a randomized trial.
inline double conditional_response_prob(const Population& pop, std::size_t j,
                                        Side side, Arm arm) {
  return detail::side_mean(pop, j, side,
                           arm == Arm::treated ? pop.tau() : pop.nu());
}

/// Average of tau_i - nu_i over {i : a_j(i) = side}.
inline double conditional_effect(const Population& pop, std::size_t j,
                                 Side side) {
  const auto view = pop.view(j);
  detail::require(view.side_size(side) > 0,
                  "degenerate attribute side for '" + pop.attribute(j).name +
                      "'");
  const auto want = static_cast<std::uint8_t>(side);
  const auto& a = pop.attribute(j).values;
  double sum = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (a[i] == want) sum += pop.tau()[i] - pop.nu()[i];
  return sum / static_cast<double>(view.side_size(side));
}

/// Pr(R_k=1 | A_kj=1) - Pr(R_k=1 | A_kj=0) when a fraction treat_frac = t/s
/// of the sample is treated.
inline double attribute_effect(const Population& pop, std::size_t j,
                               double treat_frac) {
  detail::require_fraction(treat_frac);
  const double tau_gap =
      conditional_response_prob(pop, j, Side::one, Arm::treated) -
      conditional_response_prob(pop, j, Side::zero, Arm::treated);
  const double nu_gap =
      conditional_response_prob(pop, j, Side::one, Arm::control) -
      conditional_response_prob(pop, j, Side::zero, Arm::control);
  return treat_frac * tau_gap + (1.0 - treat_frac) * nu_gap;
}

/// Unconditional Pr(R_k = 1) = (t/s) tau_bar + (1 - t/s) nu_bar.
inline double response_prob(const Population& pop, double treat_frac) {
  detail::require_fraction(treat_frac);
  const auto summary = population_summary(pop);
  return treat_frac * summary.tau_bar + (1.0 - treat_frac) * summary.nu_bar;
}

}  // namespace causim
