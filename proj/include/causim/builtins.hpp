#pragma once

// Built-in reproductions. Each returns a JSON report with a top-level "pass"
// flag comparing computed values against their known targets.

#include <cstdint>
#include <string>
#include <vector>

#include "causim/dagmodel.hpp"
#include "causim/exact.hpp"
#include "causim/io.hpp"
#include "causim/population.hpp"
#include "causim/tables.hpp"
#include "causim/trial.hpp"

namespace causim {

inline Json table_to_json(const Table2x2& t) {
  return Json::array({Json::array({t.c[0][0], t.c[0][1]}),
                      Json::array({t.c[1][0], t.c[1][1]})});
}

inline Json rational_to_json(const Rational& r) {
  return {{"value", to_double(r)}, {"exact", r.str()}};
}

/// Two blocks of 100 units: treatment x response counts (81,9;9,1) in the
/// first block and (1,9;9,81) in the second. `block` marks the second half.
struct Example1Data {
  std::vector<TreatResponse> pairs;
  std::vector<std::uint8_t> block;
};

inline Example1Data example1_data() {
  Example1Data d;
  auto add = [&](std::uint8_t blk, std::uint8_t treated, std::uint8_t response,
                 int count) {
    for (int i = 0; i < count; ++i) {
      d.pairs.push_back({treated, response});
      d.block.push_back(blk);
    }
  };
  add(0, 0, 0, 81);
  add(0, 0, 1, 9);
  add(0, 1, 0, 9);
  add(0, 1, 1, 1);
  add(1, 0, 0, 1);
  add(1, 0, 1, 9);
  add(1, 1, 0, 9);
  add(1, 1, 1, 81);
  return d;
}

inline Json builtin_example1() {
  const auto data = example1_data();
  const auto strata = stratify(data.pairs, data.block, "block");
  const auto pooled = pool(strata);
  const auto report = simpson_check(strata, Rational(1, 1'000'000'000));
  const auto search = confounder_search(data.pairs, {{"block", data.block}}, Rational(0));

  const bool tables_ok = strata[0].table == Table2x2::of(81, 9, 9, 1) &&
                         strata[1].table == Table2x2::of(1, 9, 9, 81) &&
                         pooled == Table2x2::of(82, 18, 18, 82) &&
                         tabulate(data.pairs) == pooled;
  const bool gaps_ok = report.stratum_gaps[0] == Rational(0) &&
                       report.stratum_gaps[1] == Rational(0) &&
                       report.pooled_gap == Rational(16, 25);
  const bool verdict_ok = report.verdict == SimpsonVerdict::masked;

  Json partitions = Json::array();
  for (const auto& p : search.ranked) {
    Json gaps = Json::array();
    for (const auto& g : p.gaps)
      gaps.push_back(g ? rational_to_json(*g) : Json(nullptr));
    partitions.push_back({{"label", p.label},
                          {"gaps", gaps},
                          {"degenerate", p.degenerate},
                          {"post_hoc", p.post_hoc}});
  }
  Json gaps = Json::array();
  for (const auto& g : report.stratum_gaps)
    gaps.push_back(g ? rational_to_json(*g) : Json(nullptr));

  return {{"name", "example1"},
          {"strata",
           {{"block=0", table_to_json(strata[0].table)},
            {"block=1", table_to_json(strata[1].table)}}},
          {"pooled", table_to_json(pooled)},
          {"stratum_gaps", gaps},
          {"pooled_gap", rational_to_json(report.pooled_gap)},
          {"verdict", to_string(report.verdict)},
          {"confounder_search", partitions},
          {"pass", tables_ok && gaps_ok && verdict_ok}};
}

inline Json builtin_appendix() {
  const auto dag = appendix_model<Rational>();
  const auto joint = joint_distribution(dag);
  constexpr std::size_t Z = 0, X = 1, Y = 2;
  const Rational px = query(joint, {{X, 1}});
  const Rational py_x1 = query(joint, {{Y, 1}}, {{X, 1}});
  const Rational py0_x0 = query(joint, {{Y, 0}}, {{X, 0}});
  const bool ci = cond_independent(joint, X, Y, {Z}, Rational(0));
  const bool marginal_dep = !cond_independent(joint, X, Y, {}, Rational(0));
  const Rational do1 = query(joint_distribution(intervene(dag, X, 1)), {{Y, 1}});
  const Rational do0 = query(joint_distribution(intervene(dag, X, 0)), {{Y, 1}});

  const Rational target(181, 200);
  const bool pass = px == Rational(1, 2) && py_x1 == target && py0_x0 == target &&
                    ci && marginal_dep && do1 == Rational(1, 2) &&
                    do0 == Rational(1, 2);
  return {{"name", "appendix"},
          {"p_x1", rational_to_json(px)},
          {"p_y1_given_x1", rational_to_json(py_x1)},
          {"p_y0_given_x0", rational_to_json(py0_x0)},
          {"x_indep_y_given_z", ci},
          {"x_dep_y_marginally", marginal_dep},
          {"p_y1_do_x1", rational_to_json(do1)},
          {"p_y1_do_x0", rational_to_json(do0)},
          {"pass", pass}};
}

/// Attribute `a` fully determines the response regardless of treatment
/// (tau = nu = a). Randomization cancels it: the treatment effect is zero
/// while the attribute's own effect is one.
inline Population cancellation_population(std::size_t per_side) {
  return expand_blocks({{per_side, {{"a", 1}}, 1.0, 1.0},
                        {per_side, {{"a", 0}}, 0.0, 0.0}});
}

inline Json builtin_cancellation(std::uint64_t seed) {
  const auto pop = cancellation_population(500);
  const auto summary = population_summary(pop);
  const auto mc = replicate_trials(pop, 400, 200, 2000, seed);
  const double lo = mc.mean_effect - 4.0 * mc.std_error;
  const double hi = mc.mean_effect + 4.0 * mc.std_error;

  const auto small = cancellation_population(3);
  const auto exact = exact_response_given_treatment(small, 4, 2);
  const Rational exact_gap = exact.p_r_given_t1() - *exact.p_r_given_t0();

  const double attr_effect = attribute_effect(pop, 0, 0.5);
  const bool pass = summary.true_effect == 0.0 && exact_gap == 0 && lo <= 0.0 &&
                    0.0 <= hi && attr_effect == 1.0 &&
                    conditional_effect(pop, 0, Side::one) == 0.0 &&
                    conditional_effect(pop, 0, Side::zero) == 0.0;
  return {{"name", "cancellation"},
          {"n", pop.size()},
          {"true_effect", summary.true_effect},
          {"exact_effect_small_population", rational_to_json(exact_gap)},
          {"attribute_effect", attr_effect},
          {"monte_carlo",
           {{"s", 400},
            {"t", 200},
            {"reps", 2000},
            {"seed", seed},
            {"mean_effect", mc.mean_effect},
            {"stderr", mc.std_error},
            {"ci", {lo, hi}}}},
          {"pass", pass}};
}

}  // namespace causim
