#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "causim/errors.hpp"
#include "causim/io.hpp"
#include "causim/population.hpp"

namespace causim {

/// Simulation scenario:
///   {"population": {...}, "trial": {"s": int, "t": int, "reps": int},
///    "seed": u64, "out": path, "format": "csv" | "json"}
/// Command-line flags override the file; validate() enforces the final state.
struct ScenarioConfig {
  std::optional<Population> population;
  std::size_t s = 0;
  std::size_t t = 0;
  std::size_t reps = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";

  static ScenarioConfig from_json(const Json& j) {
    detail::require(j.is_object(), "config: expected a JSON object");
    for (const auto& [key, value] : j.items())
      detail::require(key == "population" || key == "trial" || key == "seed" ||
                          key == "out" || key == "format",
                      "config: unknown key '" + key + "'");
    ScenarioConfig cfg;
    if (j.contains("population")) cfg.population = population_from_json(j.at("population"));
    if (j.contains("trial")) {
      const auto& tr = j.at("trial");
      detail::require(tr.is_object(), "config.trial: expected an object");
      for (const auto& [key, value] : tr.items()) {
        detail::require(key == "s" || key == "t" || key == "reps",
                        "config.trial: unknown key '" + key + "'");
        detail::require(value.is_number_integer() && value.get<long long>() >= 0,
                        "config.trial." + key + ": expected a nonnegative integer");
      }
      if (tr.contains("s")) cfg.s = tr.at("s").get<std::size_t>();
      if (tr.contains("t")) cfg.t = tr.at("t").get<std::size_t>();
      if (tr.contains("reps")) cfg.reps = tr.at("reps").get<std::size_t>();
    }
    if (j.contains("seed")) {
      detail::require(j.at("seed").is_number_unsigned(), "config.seed: expected an unsigned integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("out")) {
      detail::require(j.at("out").is_string(), "config.out: expected a string");
      cfg.out = j.at("out").get<std::string>();
    }
    if (j.contains("format")) {
      detail::require(j.at("format").is_string(), "config.format: expected a string");
      cfg.format = j.at("format").get<std::string>();
    }
    return cfg;
  }

  /// Observational runs need only s >= 1; trials need 1 <= t < s <= n.
  void validate(bool randomized) const {
    detail::require(population.has_value(), "config: population is required");
    detail::require(seed.has_value(), "--seed is required for simulation commands");
    detail::require(!out.empty(), "--out DIR is required for simulation commands");
    detail::require(format == "csv" || format == "json", "format must be csv or json");
    detail::require(reps >= 1, "reps must be >= 1");
    detail::require(s >= 1, "trial.s must be >= 1");
    if (randomized) {
      detail::require(t >= 1, "trial.t must be >= 1");
      detail::require(t < s, "trial.t must be < trial.s");
      detail::require(s <= population->size(), "trial.s must be <= population size");
    }
  }
};

}  // namespace causim
