#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causim/errors.hpp"
#include "causim/rational.hpp"

namespace causim {

/// Treatment x response counts; c[a][b] counts units with treatment a and
/// response b.
struct Table2x2 {
  std::array<std::array<std::uint64_t, 2>, 2> c{};

  static Table2x2 of(std::uint64_t t0r0, std::uint64_t t0r1, std::uint64_t t1r0,
                     std::uint64_t t1r1) {
    Table2x2 out;
    out.c = {{{t0r0, t0r1}, {t1r0, t1r1}}};
    return out;
  }

  std::uint64_t total() const { return c[0][0] + c[0][1] + c[1][0] + c[1][1]; }
  std::uint64_t row_total(int treated) const {
    return c[treated][0] + c[treated][1];
  }
  std::uint64_t column_total(int response) const {
    return c[0][response] + c[1][response];
  }

  friend bool operator==(const Table2x2&, const Table2x2&) = default;
};

struct Stratum {
  std::string label;
  Table2x2 table;
};

using StratifiedTables = std::vector<Stratum>;

/// One unit's (treatment, response) bits.
struct TreatResponse {
  std::uint8_t treated = 0;
  std::uint8_t response = 0;
};

inline Table2x2 tabulate(std::span<const TreatResponse> pairs) {
  Table2x2 out;
  for (const auto& p : pairs) ++out.c[p.treated ? 1 : 0][p.response ? 1 : 0];
  return out;
}

/// Splits `pairs` by a binary stratifier into strata labeled
/// "<name>=0" and "<name>=1".
inline StratifiedTables stratify(std::span<const TreatResponse> pairs,
                                 std::span<const std::uint8_t> membership,
                                 const std::string& name) {
  detail::require(membership.size() == pairs.size(),
                  "stratifier length must equal the number of units");
  StratifiedTables out{{name + "=0", {}}, {name + "=1", {}}};
  for (std::size_t k = 0; k < pairs.size(); ++k)
    ++out[membership[k] ? 1 : 0]
          .table.c[pairs[k].treated ? 1 : 0][pairs[k].response ? 1 : 0];
  return out;
}

inline Table2x2 pool(const StratifiedTables& strata) {
  detail::require(!strata.empty(), "pool needs at least one stratum");
  Table2x2 out;
  for (const auto& s : strata)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out.c[a][b] += s.table.c[a][b];
  return out;
}

/// Pr(response | treated) - Pr(response | untreated); absent when either
/// treatment row is empty.
inline std::optional<Rational> independence_gap(const Table2x2& table) {
  const auto treated = table.row_total(1);
  const auto untreated = table.row_total(0);
  if (treated == 0 || untreated == 0) return std::nullopt;
  return Rational(table.c[1][1], treated) - Rational(table.c[0][1], untreated);
}

/// Cross-product ratio c11 c00 / (c10 c01); absent when the denominator is 0.
inline std::optional<Rational> odds_ratio(const Table2x2& table) {
  const BigInt den = BigInt(table.c[1][0]) * table.c[0][1];
  if (den == 0) return std::nullopt;
  return Rational(BigInt(table.c[1][1]) * table.c[0][0], den);
}

enum class SimpsonVerdict { masked, reversed, consistent };

inline const char* to_string(SimpsonVerdict v) {
  switch (v) {
    case SimpsonVerdict::masked:
      return "masked";
    case SimpsonVerdict::reversed:
      return "reversed";
    case SimpsonVerdict::consistent:
      return "consistent";
  }
  return "consistent";
}

struct SimpsonReport {
  std::vector<std::optional<Rational>> stratum_gaps;
  Rational pooled_gap;
  SimpsonVerdict verdict = SimpsonVerdict::consistent;
};

/// masked: every usable stratum gap is within tol but the pooled gap is not.
/// reversed: the pooled gap's sign opposes the sign of every usable stratum
/// gap. Strata with an empty treatment arm are reported but not used.
inline SimpsonReport simpson_check(const StratifiedTables& strata,
                                   const Rational& tol) {
  SimpsonReport report;
  std::vector<Rational> usable;
  for (const auto& s : strata) {
    report.stratum_gaps.push_back(independence_gap(s.table));
    if (report.stratum_gaps.back()) usable.push_back(*report.stratum_gaps.back());
  }
  detail::require(usable.size() >= 2,
                  "simpson_check needs at least two strata with defined gaps");
  const auto pooled = independence_gap(pool(strata));
  detail::require(pooled.has_value(), "pooled table has an empty treatment arm");
  report.pooled_gap = *pooled;

  const bool strata_flat = std::all_of(
      usable.begin(), usable.end(),
      [&](const Rational& g) { return abs(g) <= tol; });
  const bool opposed = std::all_of(usable.begin(), usable.end(), [&](const Rational& g) {
    return (g > 0 && *pooled < 0) || (g < 0 && *pooled > 0);
  });
  if (strata_flat && abs(*pooled) > tol)
    report.verdict = SimpsonVerdict::masked;
  else if (opposed)
    report.verdict = SimpsonVerdict::reversed;
  return report;
}

/// Candidate binary stratifier over the units of a sample.
struct Stratifier {
  std::string name;
  std::vector<std::uint8_t> values;
};

struct PartitionResult {
  std::string label;
  std::vector<std::uint8_t> membership;
  std::array<std::optional<Rational>, 2> gaps;
  std::optional<Rational> max_abs_gap;  // absent unless both gaps defined
  bool degenerate = false;  // some stratum lacks a treatment arm
  bool post_hoc = false;    // coincides with the treatment or response split
};

struct ConfounderReport {
  std::vector<PartitionResult> ranked;
  std::uint64_t named_evaluated = 0;   // treatment, response, candidates
  std::uint64_t subsets_evaluated = 0;  // exhaustive bipartitions
  bool exhaustive = false;
  bool cap_exceeded = false;  // exhaustive mode skipped: 2^s - 2 > cap
};

inline constexpr std::uint64_t kDefaultExhaustiveCap = (1ULL << 20) - 2;

namespace detail {

inline PartitionResult evaluate_partition(std::span<const TreatResponse> pairs,
                                          std::string label,
                                          std::vector<std::uint8_t> membership) {
  PartitionResult r;
  const auto strata = stratify(pairs, membership, label);
  r.gaps = {independence_gap(strata[0].table), independence_gap(strata[1].table)};
  r.degenerate = !r.gaps[0] || !r.gaps[1];
  if (!r.degenerate) r.max_abs_gap = std::max(abs(*r.gaps[0]), abs(*r.gaps[1]));

  auto matches = [&](auto field) {
    bool same = true;
    bool flipped = true;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const bool m = membership[k] != 0;
      const bool v = pairs[k].*field != 0;
      same = same && (m == v);
      flipped = flipped && (m != v);
    }
    return same || flipped;
  };
  r.post_hoc = matches(&TreatResponse::treated) || matches(&TreatResponse::response);
  r.label = std::move(label);
  r.membership = std::move(membership);
  return r;
}

}  // namespace detail

/// Scores bipartitions of a sample by their within-stratum treatment gaps.
/// The treatment and response splits are always evaluated and flagged
/// post-hoc; candidate stratifiers follow in input order and, when
/// 2^s - 2 <= exhaustive_cap, every nonempty proper subset of units (by
/// increasing bitmask). Partitions with both gaps defined and within tol are
/// ranked by max |gap| (stable); the treatment split is always reported.
inline ConfounderReport confounder_search(
    std::span<const TreatResponse> pairs,
    const std::vector<Stratifier>& candidates, const Rational& tol,
    std::uint64_t exhaustive_cap = kDefaultExhaustiveCap) {
  const std::size_t s = pairs.size();
  detail::require(s >= 2, "confounder_search needs at least two units");
  ConfounderReport report;
  std::vector<PartitionResult> results;

  auto column = [&](auto field) {
    std::vector<std::uint8_t> v(s);
    for (std::size_t k = 0; k < s; ++k) v[k] = pairs[k].*field ? 1 : 0;
    return v;
  };
  results.push_back(detail::evaluate_partition(pairs, "treatment",
                                               column(&TreatResponse::treated)));
  results.push_back(detail::evaluate_partition(pairs, "response",
                                               column(&TreatResponse::response)));
  for (const auto& cand : candidates) {
    detail::require(cand.values.size() == s,
                    "stratifier '" + cand.name + "' has the wrong length");
    results.push_back(detail::evaluate_partition(pairs, cand.name, cand.values));
  }
  report.named_evaluated = results.size();

  const bool fits = s < 64 && ((std::uint64_t{1} << s) - 2) <= exhaustive_cap;
  report.exhaustive = fits;
  report.cap_exceeded = !fits;
  if (fits) {
    const std::uint64_t last = (std::uint64_t{1} << s) - 2;
    for (std::uint64_t mask = 1; mask <= last; ++mask) {
      std::vector<std::uint8_t> membership(s);
      for (std::size_t k = 0; k < s; ++k) membership[k] = (mask >> k) & 1U;
      auto r = detail::evaluate_partition(pairs, "subset:" + std::to_string(mask),
                                          std::move(membership));
      ++report.subsets_evaluated;
      if (r.max_abs_gap && *r.max_abs_gap <= tol) results.push_back(std::move(r));
    }
  }

  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (i == 0 || (r.max_abs_gap && *r.max_abs_gap <= tol))
      report.ranked.push_back(std::move(r));
  }
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const PartitionResult& a, const PartitionResult& b) {
                     if (!a.max_abs_gap || !b.max_abs_gap)
                       return a.max_abs_gap.has_value() && !b.max_abs_gap;
                     return *a.max_abs_gap < *b.max_abs_gap;
                   });
  return report;
}

}  // namespace causim
