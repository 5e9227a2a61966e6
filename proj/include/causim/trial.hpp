#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "causim/errors.hpp"
#include "causim/population.hpp"
#include "causim/rng.hpp"

namespace causim {

/// s draws with replacement from N, each uniform over individuals, with the
/// attribute tuple of every drawn individual.
struct ObservationalSample {
  std::vector<std::size_t> draws;
  std::vector<std::vector<std::uint8_t>> data;

  std::size_t size() const { return draws.size(); }
};

/// One realized randomized controlled trial. Position k holds the k-th
/// individual drawn; treated[k] and response[k] are T_k and R_k.
struct TrialOutcome {
  std::vector<std::size_t> sample;
  std::vector<std::uint8_t> treated;
  std::vector<std::uint8_t> response;

  std::size_t s() const { return sample.size(); }
  std::size_t t() const {
    return static_cast<std::size_t>(
        std::accumulate(treated.begin(), treated.end(), std::size_t{0}));
  }
};

inline ObservationalSample sample_observational(const Population& pop,
                                                std::size_t s,
                                                SeededRng& rng) {
  detail::require(s >= 1, "sample size must be at least 1");
  ObservationalSample out;
  out.draws.reserve(s);
  out.data.reserve(s);
  for (std::size_t k = 0; k < s; ++k) {
    const auto i = static_cast<std::size_t>(rng.uniform_below(pop.size()));
    out.draws.push_back(i);
    out.data.push_back(pop.row(i));
  }
  return out;
}

namespace detail {

// First `take` entries of `items` become a uniform random ordered selection.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t take, SeededRng& rng) {
  for (std::size_t k = 0; k < take; ++k) {
    const auto pick = k + static_cast<std::size_t>(
                              rng.uniform_below(items.size() - k));
    std::swap(items[k], items[pick]);
  }
}

inline void check_trial_sizes(std::size_t n, std::size_t s, std::size_t t) {
  require(t >= 1, "a trial needs at least one treated subject (t >= 1)");
  require(t <= s, "treated count t exceeds sample size s");
  require(s <= n, "sample size s exceeds population size n");
}

}  // namespace detail

/// Samples s individuals without replacement, treats a uniform size-t subset
/// of the sample positions, and draws each response with probability tau_i
/// (treated) or nu_i (untreated).
inline TrialOutcome run_trial(const Population& pop, std::size_t s,
                              std::size_t t, SeededRng& rng) {
  detail::check_trial_sizes(pop.size(), s, t);
  std::vector<std::size_t> ids(pop.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  detail::partial_shuffle(ids, s, rng);
  ids.resize(s);

  std::vector<std::size_t> positions(s);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  detail::partial_shuffle(positions, t, rng);

  TrialOutcome out;
  out.sample = std::move(ids);
  out.treated.assign(s, 0);
  for (std::size_t k = 0; k < t; ++k) out.treated[positions[k]] = 1;
  out.response.resize(s);
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t i = out.sample[k];
    const double p = out.treated[k] ? pop.tau()[i] : pop.nu()[i];
    out.response[k] = rng.bernoulli(p) ? 1 : 0;
  }
  return out;
}

/// Treated response rate (1/t) sum T_k R_k; estimates tau_bar.
inline double rho1(const TrialOutcome& trial) {
  const std::size_t t = trial.t();
  detail::require(t >= 1, "rho1 needs a treated arm");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trial.s(); ++k)
    hits += trial.treated[k] & trial.response[k];
  return static_cast<double>(hits) / static_cast<double>(t);
}

/// Control response rate (1/(s-t)) sum (1-T_k) R_k; estimates nu_bar.
inline double rho0(const TrialOutcome& trial) {
  const std::size_t controls = trial.s() - trial.t();
  detail::require(controls >= 1, "no control arm (s = t)");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trial.s(); ++k)
    hits += (1 - trial.treated[k]) & trial.response[k];
  return static_cast<double>(hits) / static_cast<double>(controls);
}

inline double effect_estimate(const TrialOutcome& trial) {
  return rho1(trial) - rho0(trial);
}

/// Empirical Pr(R=1 | T=arm, A=side) per cell; empty cells are absent.
struct ConditionalRates {
  std::optional<double> t1a1;
  std::optional<double> t0a1;
  std::optional<double> t1a0;
  std::optional<double> t0a0;
};

inline ConditionalRates conditional_rates(
    const TrialOutcome& trial, std::span<const std::uint8_t> attr_values) {
  detail::require(attr_values.size() == trial.s(),
                  "attribute vector length must equal sample size");
  std::size_t count[2][2] = {};
  std::size_t hits[2][2] = {};
  for (std::size_t k = 0; k < trial.s(); ++k) {
    const auto a = attr_values[k] ? 1 : 0;
    const auto tr = trial.treated[k] ? 1 : 0;
    ++count[tr][a];
    hits[tr][a] += trial.response[k];
  }
  auto rate = [&](int tr, int a) -> std::optional<double> {
    if (count[tr][a] == 0) return std::nullopt;
    return static_cast<double>(hits[tr][a]) /
           static_cast<double>(count[tr][a]);
  };
  return {rate(1, 1), rate(0, 1), rate(1, 0), rate(0, 0)};
}

/// Attribute column j restricted to the trial's sample order.
inline std::vector<std::uint8_t> sample_attribute(const Population& pop,
                                                  const TrialOutcome& trial,
                                                  std::size_t j) {
  const auto& values = pop.attribute(j).values;
  std::vector<std::uint8_t> out;
  out.reserve(trial.s());
  for (std::size_t i : trial.sample) out.push_back(values[i]);
  return out;
}

struct ReplicationSummary {
  double mean_effect = 0.0;
  double std_error = 0.0;  // standard error of mean_effect
  double mean_rho1 = 0.0;
  double mean_rho0 = 0.0;
  std::vector<double> per_rep;
};

/// Runs `reps` independent trials on streams (seed, 0..reps-1), handing each
/// outcome to on_trial(rep, outcome) in stream order.
template <typename OnTrial>
ReplicationSummary replicate_trials(const Population& pop, std::size_t s,
                                    std::size_t t, std::size_t reps,
                                    std::uint64_t seed, OnTrial&& on_trial) {
  detail::require(reps >= 2, "replicate_trials needs reps >= 2");
  detail::check_trial_sizes(pop.size(), s, t);
  detail::require(t < s, "no control arm (s = t)");
  ReplicationSummary out;
  out.per_rep.reserve(reps);
  double sum1 = 0.0;
  double sum0 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    SeededRng rng(seed, r);
    const auto trial = run_trial(pop, s, t, rng);
    on_trial(r, trial);
    const double r1 = rho1(trial);
    const double r0 = rho0(trial);
    sum1 += r1;
    sum0 += r0;
    out.per_rep.push_back(r1 - r0);
  }
  const double n = static_cast<double>(reps);
  double sum = 0.0;
  for (double e : out.per_rep) sum += e;
  out.mean_effect = sum / n;
  out.mean_rho1 = sum1 / n;
  out.mean_rho0 = sum0 / n;
  double ss = 0.0;
  for (double e : out.per_rep) ss += (e - out.mean_effect) * (e - out.mean_effect);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

inline ReplicationSummary replicate_trials(const Population& pop,
                                           std::size_t s, std::size_t t,
                                           std::size_t reps,
                                           std::uint64_t seed) {
  return replicate_trials(pop, s, t, reps, seed,
                          [](std::size_t, const TrialOutcome&) {});
}

}  // namespace causim
