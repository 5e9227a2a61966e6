#pragma once

// Exact (rational) computations on the randomized-trial space: enumeration of
// (sample sequence, treated positions) pairs, treatment/attribute
// independence, response rates by arm, and the hypergeometric overlap law
// with its tail bounds.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causim/errors.hpp"
#include "causim/population.hpp"
#include "causim/rational.hpp"

namespace causim {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Finite distribution with exact probabilities.
template <typename Outcome>
struct ExactDist {
  std::vector<Outcome> outcomes;
  std::vector<Rational> probs;

  Rational total() const {
    Rational sum = 0;
    for (const auto& p : probs) sum += p;
    return sum;
  }
};

/// Number of (S, T) pairs: n(n-1)...(n-s+1) * C(s, t).
inline BigInt c0_size(std::size_t n, std::size_t s, std::size_t t) {
  detail::require(t >= 1 && t <= s && s <= n,
                  "c0_size requires 1 <= t <= s <= n");
  BigInt falling = 1;
  for (std::size_t i = 0; i < s; ++i) falling *= n - i;
  return falling * binomial(static_cast<std::int64_t>(s),
                            static_cast<std::int64_t>(t));
}

/// One point of the trial space: an ordered sample without replacement and
/// the set of treated positions (bit k set iff position k is treated).
struct TrialPoint {
  std::span<const std::size_t> sample;
  std::uint64_t treated_mask = 0;

  bool treated(std::size_t k) const { return (treated_mask >> k) & 1U; }
};

namespace detail {

inline void check_enumerable(std::size_t n, std::size_t s, std::size_t t,
                             std::uint64_t cap) {
  if (c0_size(n, s, t) > cap)
    throw CapExceeded("instance too large for enumeration: c0_size(" +
                      std::to_string(n) + "," + std::to_string(s) + "," +
                      std::to_string(t) + ") exceeds cap " +
                      std::to_string(cap));
}

inline std::vector<std::uint64_t> masks_with_popcount(std::size_t width,
                                                      std::size_t ones) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << width); ++m)
    if (static_cast<std::size_t>(std::popcount(m)) == ones) out.push_back(m);
  return out;
}

template <typename Visitor>
void enumerate_sequences(std::size_t n, std::vector<std::size_t>& seq,
                         std::size_t depth, std::vector<char>& used,
                         const std::vector<std::uint64_t>& masks,
                         Visitor& visit) {
  if (depth == seq.size()) {
    for (std::uint64_t m : masks) visit(TrialPoint{seq, m});
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = 1;
    seq[depth] = i;
    enumerate_sequences(n, seq, depth + 1, used, masks, visit);
    used[i] = 0;
  }
}

}  // namespace detail

/// Calls visit(TrialPoint) once for every point of the (S, T) space; each
/// point has probability 1 / c0_size(n, s, t). Samples are visited in
/// lexicographic order, treated masks in increasing order.
template <typename Visitor>
void enumerate_trials(std::size_t n, std::size_t s, std::size_t t,
                      Visitor&& visit,
                      std::uint64_t cap = kDefaultEnumerationCap) {
  detail::check_enumerable(n, s, t, cap);
  detail::require(s < 64, "enumeration supports s < 64");
  const auto masks = detail::masks_with_popcount(s, t);
  std::vector<std::size_t> seq(s);
  std::vector<char> used(n, 0);
  detail::enumerate_sequences(n, seq, 0, used, masks, visit);
}

/// Pr(T_k = 1), Pr(T_k = 1 | A_kj = 1), Pr(T_k = 1 | A_kj = 0). A conditional
/// is absent when no individual carries that attribute value.
struct TreatmentProbs {
  Rational marginal;
  std::optional<Rational> given_a1;
  std::optional<Rational> given_a0;
};

inline TreatmentProbs exact_treatment_prob(
    std::size_t n, std::size_t s, std::size_t t, std::size_t k,
    std::span<const std::uint8_t> attribute,
    std::uint64_t cap = kDefaultEnumerationCap) {
  detail::require(k < s, "position k must be < s");
  detail::require(attribute.size() == n, "attribute length must equal n");
  std::uint64_t points = 0;
  std::uint64_t treated = 0;
  std::uint64_t with_a[2] = {0, 0};
  std::uint64_t treated_with_a[2] = {0, 0};
  enumerate_trials(
      n, s, t,
      [&](const TrialPoint& p) {
        const int a = attribute[p.sample[k]] ? 1 : 0;
        const bool tk = p.treated(k);
        ++points;
        ++with_a[a];
        if (tk) {
          ++treated;
          ++treated_with_a[a];
        }
      },
      cap);
  TreatmentProbs out{Rational(treated, points), std::nullopt, std::nullopt};
  if (with_a[1] > 0) out.given_a1 = Rational(treated_with_a[1], with_a[1]);
  if (with_a[0] > 0) out.given_a0 = Rational(treated_with_a[0], with_a[0]);
  return out;
}

/// Pr(R_k = 1 | T_k = 1) and Pr(R_k = 1 | T_k = 0) for every position k,
/// with responses taken in expectation (tau_i / nu_i of the individual at k).
struct ResponseByArm {
  std::vector<Rational> given_treated;
  std::vector<std::optional<Rational>> given_control;  // absent when s = t

  const Rational& p_r_given_t1() const { return given_treated.front(); }
  const std::optional<Rational>& p_r_given_t0() const {
    return given_control.front();
  }
};

inline ResponseByArm exact_response_given_treatment(
    const Population& pop, std::size_t s, std::size_t t,
    std::uint64_t cap = kDefaultEnumerationCap) {
  const std::size_t n = pop.size();
  // hits[arm][k][i]: points where individual i sits at position k in `arm`.
  std::vector<std::vector<std::uint64_t>> hits[2];
  for (auto& arm : hits)
    arm.assign(s, std::vector<std::uint64_t>(n, 0));
  enumerate_trials(
      n, s, t,
      [&](const TrialPoint& p) {
        for (std::size_t k = 0; k < s; ++k)
          ++hits[p.treated(k) ? 1 : 0][k][p.sample[k]];
      },
      cap);

  std::vector<Rational> tau(n);
  std::vector<Rational> nu(n);
  for (std::size_t i = 0; i < n; ++i) {
    tau[i] = exact_rational(pop.tau()[i]);
    nu[i] = exact_rational(pop.nu()[i]);
  }
  auto weighted = [&](const std::vector<std::uint64_t>& counts,
                      const std::vector<Rational>& probs)
      -> std::optional<Rational> {
    BigInt total = 0;
    Rational sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total += counts[i];
      sum += probs[i] * counts[i];
    }
    if (total == 0) return std::nullopt;
    return sum / Rational(total);
  };

  ResponseByArm out;
  for (std::size_t k = 0; k < s; ++k) {
    out.given_treated.push_back(*weighted(hits[1][k], tau));
    out.given_control.push_back(weighted(hits[0][k], nu));
  }
  return out;
}

/// Mean of a probability vector as an exact rational.
inline Rational exact_mean(const std::vector<double>& values) {
  Rational sum = 0;
  for (double v : values) sum += exact_rational(v);
  return sum / static_cast<long long>(values.size());
}

/// Exhaustive attribute sweep for one (n, s, t): Pr(T_k = 1 | A_kj = v) = t/s
/// for every position k, every attribute a : N -> {0,1}, and both values v.
struct IndependenceReport {
  bool holds = true;
  std::uint64_t attributes_checked = 0;
  std::uint64_t comparisons = 0;
  Rational expected;
};

inline IndependenceReport verify_treatment_independence(
    std::size_t n, std::size_t s, std::size_t t,
    std::uint64_t cap = kDefaultEnumerationCap) {
  detail::check_enumerable(n, s, t, cap);
  if (n > 20) throw CapExceeded("attribute sweep supports n <= 20 (2^n attributes)");
  // at[k][i], treated_at[k][i]: points with individual i at position k.
  std::vector<std::vector<std::uint64_t>> at(s, std::vector<std::uint64_t>(n));
  auto treated_at = at;
  std::uint64_t points = 0;
  enumerate_trials(
      n, s, t,
      [&](const TrialPoint& p) {
        ++points;
        for (std::size_t k = 0; k < s; ++k) {
          ++at[k][p.sample[k]];
          if (p.treated(k)) ++treated_at[k][p.sample[k]];
        }
      },
      cap);

  IndependenceReport report;
  report.expected = Rational(t, s);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    ++report.attributes_checked;
    for (std::size_t k = 0; k < s; ++k) {
      std::uint64_t with[2] = {0, 0};
      std::uint64_t treated_with[2] = {0, 0};
      for (std::size_t i = 0; i < n; ++i) {
        const int a = (mask >> i) & 1U;
        with[a] += at[k][i];
        treated_with[a] += treated_at[k][i];
      }
      for (int a = 0; a < 2; ++a) {
        if (with[a] == 0) continue;
        ++report.comparisons;
        if (Rational(treated_with[a], with[a]) != report.expected)
          report.holds = false;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Hypergeometric overlap |T cap A| of a uniform size-t subset T with a fixed
// set A of size K inside a population of n.

namespace detail {

inline void check_hypergeom(std::size_t n, std::size_t K, std::size_t t) {
  require(K <= n, "hypergeometric: K must be <= n");
  require(t <= n, "hypergeometric: t must be <= n");
}

}  // namespace detail

/// Integer weights C(K, r) C(n-K, t-r) for r = 0..t and their total C(n, t).
struct OverlapCounts {
  std::size_t n = 0;
  std::size_t K = 0;
  std::size_t t = 0;
  std::vector<BigInt> ways;
  BigInt total;

  OverlapCounts(std::size_t n_, std::size_t K_, std::size_t t_)
      : n(n_), K(K_), t(t_) {
    detail::check_hypergeom(n, K, t);
    const auto in_a = binomial_row(static_cast<std::int64_t>(K));
    const auto out_a = binomial_row(static_cast<std::int64_t>(n - K));
    ways.assign(t + 1, 0);
    for (std::size_t r = 0; r <= t; ++r)
      if (r <= K && t - r <= n - K) ways[r] = in_a[r] * out_a[t - r];
    total = binomial(static_cast<std::int64_t>(n), static_cast<std::int64_t>(t));
  }

  Rational pmf(std::size_t r) const {
    return r <= t ? Rational(ways[r], total) : Rational(0);
  }
};

inline Rational hypergeom_pmf(std::size_t n, std::size_t K, std::size_t t,
                              std::size_t r) {
  detail::require(r <= t, "hypergeom_pmf: r must be <= t");
  detail::check_hypergeom(n, K, t);
  return Rational(binomial(K, r) * binomial(n - K, t - r),
                  binomial(n, t));
}

inline ExactDist<std::size_t> hypergeom_distribution(std::size_t n,
                                                     std::size_t K,
                                                     std::size_t t) {
  const OverlapCounts counts(n, K, t);
  ExactDist<std::size_t> dist;
  for (std::size_t r = 0; r <= t; ++r) {
    dist.outcomes.push_back(r);
    dist.probs.push_back(counts.pmf(r));
  }
  return dist;
}

struct Moments {
  Rational mean;
  Rational variance;
};

/// Closed forms: mean tK/n, variance t (K/n) ((n-K)/n) ((n-t)/(n-1)).
inline Moments hypergeom_moments(std::size_t n, std::size_t K, std::size_t t) {
  detail::check_hypergeom(n, K, t);
  detail::require(n >= 2, "hypergeometric variance needs n >= 2");
  const Rational nn(static_cast<long long>(n));
  const Rational mean = Rational(static_cast<long long>(t * K)) / nn;
  const Rational variance = mean * Rational(static_cast<long long>(n - K)) /
                            nn * Rational(static_cast<long long>(n - t)) /
                            Rational(static_cast<long long>(n - 1));
  return {mean, variance};
}

/// Moments by direct summation over the exact pmf.
inline Moments hypergeom_moments_from_pmf(const OverlapCounts& counts) {
  BigInt first = 0;
  BigInt second = 0;
  for (std::size_t r = 0; r <= counts.t; ++r) {
    first += counts.ways[r] * r;
    second += counts.ways[r] * (r * r);
  }
  const Rational mean(first, counts.total);
  return {mean, Rational(second, counts.total) - mean * mean};
}

/// The binomial variance t (K/n) ((n-K)/n) that strictly dominates the
/// hypergeometric variance whenever n > t >= 1 and 0 < K < n.
inline Rational binomial_variance(std::size_t n, std::size_t K,
                                  std::size_t t) {
  detail::check_hypergeom(n, K, t);
  const Rational nn(static_cast<long long>(n));
  return Rational(static_cast<long long>(t * K)) / nn *
         Rational(static_cast<long long>(n - K)) / nn;
}

struct ChernoffReport {
  Rational exact_upper_tail;  // Pr(|T cap A| > (tK/n)(1 + eps))
  Rational exact_lower_tail;  // Pr(|T cap A| < (tK/n)(1 - eps))
  double bound = 0.0;         // exp(-eps^2 n^2 / (2 t K (n - K)))
  bool holds = false;         // upper tail <= bound
  bool lower_holds = false;   // lower tail <= bound
};

inline ChernoffReport chernoff_check(const OverlapCounts& counts,
                                     const Rational& eps) {
  detail::require(eps > 0, "chernoff_check: eps must be positive");
  const std::size_t n = counts.n;
  const std::size_t K = counts.K;
  const std::size_t t = counts.t;
  detail::require(K > 0 && K < n, "chernoff_check: K must satisfy 0 < K < n");
  detail::require(t >= 1, "chernoff_check: t must be >= 1");

  const Rational mean = Rational(static_cast<long long>(t * K)) /
                        Rational(static_cast<long long>(n));
  const Rational upper = mean * (1 + eps);
  const Rational lower = mean * (1 - eps);
  BigInt upper_ways = 0;
  BigInt lower_ways = 0;
  for (std::size_t r = 0; r <= t; ++r) {
    const Rational rr(static_cast<long long>(r));
    if (rr > upper) upper_ways += counts.ways[r];
    if (rr < lower) lower_ways += counts.ways[r];
  }

  const double e = to_double(eps);
  const double nd = static_cast<double>(n);
  const double exponent =
      e * e * nd * nd /
      (2.0 * static_cast<double>(t) * static_cast<double>(K) *
       static_cast<double>(n - K));

  ChernoffReport out;
  out.exact_upper_tail = Rational(upper_ways, counts.total);
  out.exact_lower_tail = Rational(lower_ways, counts.total);
  out.bound = std::exp(-exponent);
  const Rational bound = exact_rational(out.bound);
  out.holds = out.exact_upper_tail <= bound;
  out.lower_holds = out.exact_lower_tail <= bound;
  return out;
}

inline ChernoffReport chernoff_check(std::size_t n, std::size_t K,
                                     std::size_t t, const Rational& eps) {
  return chernoff_check(OverlapCounts(n, K, t), eps);
}

/// xi = |T cap A| / t and eta = |T \ A| / (n - |A|). eta is absent when
/// A = N.
struct OverlapFractions {
  Rational xi;
  std::optional<Rational> eta;
};

inline OverlapFractions overlap_fractions(
    std::span<const std::size_t> treated_set,
    std::span<const std::size_t> attribute_set, std::size_t n) {
  detail::require(!treated_set.empty(), "overlap_fractions: T is empty");
  std::vector<char> in_a(n, 0);
  for (std::size_t i : attribute_set) {
    detail::require(i < n, "overlap_fractions: A index out of range");
    in_a[i] = 1;
  }
  std::size_t a_size = 0;
  for (char c : in_a) a_size += c;
  std::size_t inside = 0;
  for (std::size_t i : treated_set) {
    detail::require(i < n, "overlap_fractions: T index out of range");
    inside += in_a[i];
  }
  const std::size_t outside = treated_set.size() - inside;
  OverlapFractions out{Rational(inside, treated_set.size()), std::nullopt};
  if (a_size < n) out.eta = Rational(outside, n - a_size);
  return out;
}

}  // namespace causim
