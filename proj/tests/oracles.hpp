#pragma once

// Brute-force reference computations used only by tests. They deliberately
// avoid the library's enumeration and closed-form routines.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "causim/rational.hpp"

namespace causim::oracle {

/// Visits every (ordered sample, treated mask) pair by scanning all n^s
/// tuples and all 2^s position masks, keeping distinct tuples and masks with
/// popcount t.
template <typename Visitor>
void brute_trial_space(std::size_t n, std::size_t s, std::size_t t, Visitor&& visit) {
  std::vector<std::size_t> tuple(s, 0);
  while (true) {
    bool distinct = true;
    for (std::size_t a = 0; a < s && distinct; ++a)
      for (std::size_t b = a + 1; b < s; ++b)
        if (tuple[a] == tuple[b]) distinct = false;
    if (distinct)
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << s); ++m)
        if (static_cast<std::size_t>(std::popcount(m)) == t) visit(tuple, m);
    std::size_t pos = 0;
    while (pos < s && ++tuple[pos] == n) tuple[pos++] = 0;
    if (pos == s) break;
  }
}

inline std::uint64_t brute_c0_size(std::size_t n, std::size_t s, std::size_t t) {
  std::uint64_t count = 0;
  brute_trial_space(n, s, t, [&](const auto&, std::uint64_t) { ++count; });
  return count;
}

/// Distribution of |T cap A| for a uniform size-t subset T of {0..n-1},
/// A = {0..K-1}, by scanning all 2^n subsets.
inline std::vector<Rational> brute_overlap_pmf(std::size_t n, std::size_t K, std::size_t t) {
  std::vector<std::uint64_t> counts(t + 1, 0);
  std::uint64_t total = 0;
  const std::uint64_t a_mask = (std::uint64_t{1} << K) - 1;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != t) continue;
    ++total;
    ++counts[std::popcount(m & a_mask)];
  }
  std::vector<Rational> pmf;
  for (auto c : counts) pmf.emplace_back(c, total);
  return pmf;
}

}  // namespace causim::oracle
