#pragma once

// Binary DAG generative models over {0,1}^q. Vertex v contributes bit v of an
// assignment index (vertex 0 is the least significant bit). Every routine is
// templated on the probability type so the same model can be evaluated in
// double precision or exactly over Rational.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "causim/errors.hpp"
#include "causim/population.hpp"
#include "causim/rational.hpp"
#include "causim/rng.hpp"

namespace causim {

inline constexpr std::size_t kDefaultJointCap = 20;

template <typename Real>
class BasicBinaryDag {
 public:
  /// cpt[v][row] = Pr(v = 1 | parents), where row packs the parent bits with
  /// parents[v][0] as the least significant bit.
  static BasicBinaryDag build(std::vector<std::string> names,
                              std::vector<std::vector<std::size_t>> parents,
                              std::vector<std::vector<Real>> cpt) {
    const std::size_t q = names.size();
    detail::require(q >= 1, "model needs at least one vertex");
    detail::require(q <= 63, "model supports at most 63 vertices");
    detail::require(parents.size() == q && cpt.size() == q,
                    "names, parents and cpt must have one entry per vertex");
    for (std::size_t v = 0; v < q; ++v) {
      for (std::size_t l = 0; l < v; ++l)
        detail::require(names[l] != names[v],
                        "duplicate vertex name '" + names[v] + "'");
      detail::require(parents[v].size() < 32,
                      "vertex '" + names[v] + "' has too many parents");
      for (std::size_t a = 0; a < parents[v].size(); ++a) {
        detail::require(parents[v][a] < q, "parent index out of range");
        for (std::size_t b = 0; b < a; ++b)
          detail::require(parents[v][a] != parents[v][b],
                          "duplicate parent of '" + names[v] + "'");
      }
      detail::require(cpt[v].size() == (std::size_t{1} << parents[v].size()),
                      "cpt shape mismatch for vertex '" + names[v] + "'");
      for (const Real& p : cpt[v])
        detail::require(p >= 0 && p <= 1,
                        "probability out of range for vertex '" + names[v] + "'");
    }
    BasicBinaryDag dag;
    dag.names_ = std::move(names);
    dag.parents_ = std::move(parents);
    dag.cpt_ = std::move(cpt);
    dag.order_ = topological_order(dag.parents_);
    return dag;
  }

  std::size_t q() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::size_t>& parents(std::size_t v) const {
    return parents_.at(v);
  }
  const std::vector<Real>& cpt(std::size_t v) const { return cpt_.at(v); }
  const std::vector<std::size_t>& order() const { return order_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t v = 0; v < names_.size(); ++v)
      if (names_[v] == name) return v;
    return std::nullopt;
  }

  /// Pr(v = 1 | parent bits read from `assignment`).
  const Real& prob_one(std::size_t v, std::uint64_t assignment) const {
    std::size_t row = 0;
    const auto& ps = parents_[v];
    for (std::size_t a = 0; a < ps.size(); ++a)
      row |= static_cast<std::size_t>((assignment >> ps[a]) & 1U) << a;
    return cpt_[v][row];
  }

  friend bool operator==(const BasicBinaryDag&, const BasicBinaryDag&) = default;

 private:
  static std::vector<std::size_t> topological_order(
      const std::vector<std::vector<std::size_t>>& parents) {
    const std::size_t q = parents.size();
    std::vector<std::size_t> pending(q);
    std::vector<std::vector<std::size_t>> children(q);
    for (std::size_t v = 0; v < q; ++v) {
      pending[v] = parents[v].size();
      for (std::size_t p : parents[v]) children[p].push_back(v);
    }
    std::vector<std::size_t> order;
    for (std::size_t v = 0; v < q; ++v)
      if (pending[v] == 0) order.push_back(v);
    for (std::size_t head = 0; head < order.size(); ++head)
      for (std::size_t c : children[order[head]])
        if (--pending[c] == 0) order.push_back(c);
    detail::require(order.size() == q, "cycle detected in parent relation");
    return order;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<Real>> cpt_;
  std::vector<std::size_t> order_;
};

/// Distribution over {0,1}^q indexed by assignment bits.
template <typename Real>
struct BasicJointDist {
  std::size_t q = 0;
  std::vector<Real> probs;

  Real total() const {
    Real sum = 0;
    for (const auto& p : probs) sum += p;
    return sum;
  }
};

using BinaryDag = BasicBinaryDag<double>;
using JointDist = BasicJointDist<double>;
using ExactBinaryDag = BasicBinaryDag<Rational>;
using ExactJointDist = BasicJointDist<Rational>;

/// Builds a model from vertex names and parent names.
template <typename Real>
BasicBinaryDag<Real> build_dag(
    const std::vector<std::string>& names,
    const std::vector<std::vector<std::string>>& parent_names,
    std::vector<std::vector<Real>> cpt) {
  detail::require(parent_names.size() == names.size(),
                  "one parent list per vertex required");
  std::vector<std::vector<std::size_t>> parents(names.size());
  for (std::size_t v = 0; v < names.size(); ++v) {
    for (const auto& pn : parent_names[v]) {
      std::size_t idx = names.size();
      for (std::size_t u = 0; u < names.size(); ++u)
        if (names[u] == pn) idx = u;
      detail::require(idx < names.size(), "unknown parent '" + pn + "'");
      parents[v].push_back(idx);
    }
  }
  return BasicBinaryDag<Real>::build(names, std::move(parents), std::move(cpt));
}

/// Exact joint by enumerating all 2^q assignments.
template <typename Real>
BasicJointDist<Real> joint_distribution(const BasicBinaryDag<Real>& dag,
                                        std::size_t cap = kDefaultJointCap) {
  const std::size_t q = dag.q();
  if (q > cap)
    throw CapExceeded("joint enumeration over 2^" + std::to_string(q) +
                      " assignments exceeds vertex cap " + std::to_string(cap));
  BasicJointDist<Real> out;
  out.q = q;
  out.probs.resize(std::size_t{1} << q);
  for (std::uint64_t x = 0; x < out.probs.size(); ++x) {
    Real p = 1;
    for (std::size_t v = 0; v < q; ++v) {
      const Real& one = dag.prob_one(v, x);
      p *= ((x >> v) & 1U) ? one : Real(1 - one);
    }
    out.probs[x] = p;
  }
  return out;
}

/// X -> Y: Pr(X=1) = p, Pr(Y=1 | X=1) = p1, Pr(Y=1 | X=0) = p0. X is
/// vertex 0, Y vertex 1.
template <typename Real>
BasicJointDist<Real> two_variable_measure(const Real& p, const Real& p0,
                                          const Real& p1) {
  for (const Real* v : {&p, &p0, &p1})
    detail::require(*v >= 0 && *v <= 1, "probability out of range");
  BasicJointDist<Real> out;
  out.q = 2;
  out.probs.resize(4);
  out.probs[0b00] = (1 - p) * (1 - p0);
  out.probs[0b10] = (1 - p) * p0;
  out.probs[0b01] = p * (1 - p1);
  out.probs[0b11] = p * p1;
  return out;
}

/// A set of (vertex, value) constraints.
struct Fixed {
  std::size_t vertex = 0;
  std::uint8_t value = 0;
};
using PartialAssignment = std::vector<Fixed>;

namespace detail {

inline bool satisfies(std::uint64_t x, const PartialAssignment& constraint) {
  for (const auto& f : constraint)
    if (((x >> f.vertex) & 1U) != (f.value ? 1U : 0U)) return false;
  return true;
}

template <typename Real>
void check_vertices(const BasicJointDist<Real>& dist,
                    const PartialAssignment& constraint) {
  for (const auto& f : constraint)
    require(f.vertex < dist.q, "vertex index out of range");
}

}  // namespace detail

template <typename Real>
Real mass(const BasicJointDist<Real>& dist, const PartialAssignment& event) {
  detail::check_vertices(dist, event);
  Real sum = 0;
  for (std::uint64_t x = 0; x < dist.probs.size(); ++x)
    if (detail::satisfies(x, event)) sum += dist.probs[x];
  return sum;
}

/// Pr(event | given); `given` may be empty.
template <typename Real>
Real query(const BasicJointDist<Real>& dist, const PartialAssignment& event,
           const PartialAssignment& given = {}) {
  const Real denominator = mass(dist, given);
  detail::require(denominator > 0, "conditioning event has zero probability");
  PartialAssignment both = event;
  both.insert(both.end(), given.begin(), given.end());
  return mass(dist, both) / denominator;
}

/// Graph mutilation: `vertex` loses its parents and becomes constant `value`.
template <typename Real>
BasicBinaryDag<Real> intervene(const BasicBinaryDag<Real>& dag,
                               std::size_t vertex, std::uint8_t value) {
  detail::require(vertex < dag.q(), "intervention vertex out of range");
  detail::require(value <= 1, "intervention value must be 0 or 1");
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<Real>> cpt;
  for (std::size_t v = 0; v < dag.q(); ++v) {
    if (v == vertex) {
      parents.emplace_back();
      cpt.push_back({Real(value)});
    } else {
      parents.push_back(dag.parents(v));
      cpt.push_back(dag.cpt(v));
    }
  }
  return BasicBinaryDag<Real>::build(dag.names(), std::move(parents),
                                     std::move(cpt));
}

/// True iff Pr(i, j | c) = Pr(i | c) Pr(j | c) within tol for every value of
/// i, j and every assignment c of `given` with positive mass.
template <typename Real>
bool cond_independent(const BasicJointDist<Real>& dist, std::size_t i,
                      std::size_t j, const std::vector<std::size_t>& given,
                      const Real& tol) {
  detail::require(i < dist.q && j < dist.q, "vertex index out of range");
  for (std::size_t g : given) detail::require(g < dist.q, "vertex index out of range");
  detail::require(given.size() < 64, "too many conditioning vertices");
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << given.size()); ++c) {
    PartialAssignment cond;
    for (std::size_t b = 0; b < given.size(); ++b)
      cond.push_back({given[b], static_cast<std::uint8_t>((c >> b) & 1U)});
    if (!(mass(dist, cond) > 0)) continue;
    for (std::uint8_t vi = 0; vi < 2; ++vi) {
      for (std::uint8_t vj = 0; vj < 2; ++vj) {
        const Real joint = query(dist, {{i, vi}, {j, vj}}, cond);
        const Real product = query(dist, {{i, vi}}, cond) * query(dist, {{j, vj}}, cond);
        const Real diff = joint - product;
        if ((diff < 0 ? Real(-diff) : diff) > tol) return false;
      }
    }
  }
  return true;
}

/// Hidden common cause: Z -> X, Z -> Y with Pr(Z=1) = 1/2,
/// Pr(X=1 | Z=1) = Pr(X=0 | Z=0) = 0.95 and the same for Y. Vertices are
/// Z (0), X (1), Y (2).
template <typename Real = double>
BasicBinaryDag<Real> appendix_model() {
  const Real half = Real(1) / Real(2);
  const Real strong = Real(19) / Real(20);
  const Real weak = Real(1) / Real(20);
  return BasicBinaryDag<Real>::build({"Z", "X", "Y"}, {{}, {0}, {0}},
                                     {{half}, {weak, strong}, {weak, strong}});
}

template <typename Real>
struct IndependenceCheck {
  Real max_error = 0;
  bool holds = false;
};

/// Product experiment: a uniformly drawn individual i and an independent
/// model draw V ~ dist. Compares Pr(i in A, V = v), summed point by point,
/// against (|A| / n) P(v) for every v.
template <typename Real>
IndependenceCheck<Real> verify_population_model_independence(
    const Population& pop, const BasicJointDist<Real>& dist,
    std::span<const std::size_t> subset,
    std::uint64_t cap = 10'000'000) {
  const std::size_t n = pop.size();
  detail::require(static_cast<double>(n) * static_cast<double>(dist.probs.size()) <=
                      static_cast<double>(cap),
                  "product space exceeds enumeration cap");
  std::vector<char> in_a(n, 0);
  for (std::size_t i : subset) {
    detail::require(i < n, "subset index out of range");
    in_a[i] = 1;
  }
  std::size_t a_size = 0;
  for (char c : in_a) a_size += c;

  const Real per_individual = Real(1) / Real(static_cast<long long>(n));
  const Real share = Real(static_cast<long long>(a_size)) /
                     Real(static_cast<long long>(n));
  IndependenceCheck<Real> out;
  for (std::uint64_t v = 0; v < dist.probs.size(); ++v) {
    Real left = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (in_a[i]) left += per_individual * dist.probs[v];
    const Real diff = left - share * dist.probs[v];
    const Real err = diff < 0 ? Real(-diff) : diff;
    if (err > out.max_error) out.max_error = err;
  }
  if constexpr (std::is_same_v<Real, Rational>)
    out.holds = out.max_error == 0;
  else
    out.holds = out.max_error <= 1e-12;
  return out;
}

/// Ancestral sample; returns assignment bits.
template <typename Real>
std::uint64_t sample_dag(const BasicBinaryDag<Real>& dag, SeededRng& rng) {
  std::uint64_t x = 0;
  for (std::size_t v : dag.order())
    if (rng.bernoulli(to_double(dag.prob_one(v, x)))) x |= std::uint64_t{1} << v;
  return x;
}

}  // namespace causim
