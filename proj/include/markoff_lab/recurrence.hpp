#pragma once

// Second-order recurrences x_{n+2} = a x_{n+1} - eps x_n over F_p with eps^k = 1:
// value sets, closed forms over F_{p^2}, subsequences by index mod k, curve
// point counts on subgroup products, and the intersection bounds built from
// the Corvaja-Zannier estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "markoff_lab/ff.hpp"

namespace markoff_lab::recurrence {

using ff::FieldCtx;
using ff::Fp2;
using ff::Subgroup;
using ff::u64;

class RecurrenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecurrenceSpec {
  FieldCtx ctx;
  u64 a;
  u64 eps;
  u64 k;  // declared root index; kept even when a smaller exponent works
  u64 x1;
  u64 x2;

  RecurrenceSpec(FieldCtx field, u64 a_coef, u64 eps_k, u64 k_index, u64 seed1, u64 seed2)
      : ctx(field),
        a(a_coef % field.p()),
        eps(eps_k % field.p()),
        k(k_index),
        x1(seed1 % field.p()),
        x2(seed2 % field.p()) {
    if (k == 0) throw RecurrenceError("k must be positive");
    if (eps == 0 || ctx.pow(eps, k) != 1) {
      throw RecurrenceError("eps^k != 1 for eps = " + std::to_string(eps) +
                            ", k = " + std::to_string(k));
    }
  }

  u64 next(u64 prev, u64 cur) const { return ctx.sub(ctx.mul(a, cur), ctx.mul(eps, prev)); }
};

/// The Fibonacci recurrence written in this family: a = 1, eps = -1, k = 2.
inline RecurrenceSpec fibonacci_shape(const FieldCtx& ctx, u64 x1 = 1, u64 x2 = 1) {
  return RecurrenceSpec(ctx, 1, ctx.p() - 1, 2, x1, x2);
}

/// Values x_1, ..., x_L over one period of the state pair.
inline std::vector<u64> one_period(const RecurrenceSpec& s) {
  std::vector<u64> seq;
  u64 prev = s.x1;
  u64 cur = s.x2;
  seq.push_back(prev);
  const u64 limit = s.ctx.p() * s.ctx.p();
  while (true) {
    const u64 nxt = s.next(prev, cur);
    prev = cur;
    cur = nxt;
    if (prev == s.x1 && cur == s.x2) break;
    seq.push_back(prev);
    if (seq.size() > limit) throw RecurrenceError("period exceeds p^2");
  }
  return seq;
}

struct ValueSet {
  u64 p = 0;
  u64 k = 1;
  u64 period = 0;
  std::vector<u64> values;  // ascending
  // Index n = l k + r reaches residues m of n mod period with m = r (mod g),
  // g = gcd(k, period), so subsequence r depends only on r mod g.
  std::vector<std::vector<u64>> classes;

  const std::vector<u64>& subsequence(u64 r) const { return classes[r % classes.size()]; }
  std::size_t size() const { return values.size(); }
  bool contains(u64 v) const { return std::binary_search(values.begin(), values.end(), v); }
};

inline ValueSet iterate(const RecurrenceSpec& s) {
  const std::vector<u64> seq = one_period(s);
  ValueSet vs;
  vs.p = s.ctx.p();
  vs.k = s.k;
  vs.period = seq.size();
  vs.values = seq;
  std::sort(vs.values.begin(), vs.values.end());
  vs.values.erase(std::unique(vs.values.begin(), vs.values.end()), vs.values.end());
  const u64 g = std::gcd(s.k, vs.period);
  vs.classes.assign(g, {});
  for (u64 n = 1; n <= seq.size(); ++n) vs.classes[n % g].push_back(seq[n - 1]);
  for (auto& c : vs.classes) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return vs;
}

inline u64 intersect_value_sets(const ValueSet& s1, const ValueSet& s2) {
  if (s1.p != s2.p) throw RecurrenceError("modulus mismatch");
  std::vector<u64> out;
  std::set_intersection(s1.values.begin(), s1.values.end(), s2.values.begin(), s2.values.end(),
                        std::back_inserter(out));
  return out.size();
}

struct ClosedForm {
  Fp2 lambda1;
  Fp2 lambda2;
  std::optional<Fp2> alpha;  // absent when degenerate
  std::optional<Fp2> beta;
  bool degenerate = false;

  /// alpha lambda1^n + beta lambda2^n.
  Fp2 value_at(u64 n, const FieldCtx& f) const {
    if (degenerate) throw RecurrenceError("closed form unavailable for a double root");
    return f.add(f.mul(*alpha, f.pow(lambda1, n)), f.mul(*beta, f.pow(lambda2, n)));
  }
};

/// Roots of t^2 - a t + eps and the coefficients fitting x_1, x_2.
inline ClosedForm closed_form(const RecurrenceSpec& s) {
  const FieldCtx& f = s.ctx;
  const auto roots = ff::quadratic_roots(s.a, s.eps, f);
  ClosedForm cf{roots.first, roots.second, std::nullopt, std::nullopt, roots.degenerate};
  if (cf.degenerate) return cf;
  // alpha l1 + beta l2 = x1, alpha l1^2 + beta l2^2 = x2.
  const Fp2 l1 = cf.lambda1;
  const Fp2 l2 = cf.lambda2;
  const Fp2 l1sq = f.mul(l1, l1);
  const Fp2 l2sq = f.mul(l2, l2);
  const Fp2 det = f.sub(f.mul(l1, l2sq), f.mul(l2, l1sq));
  const Fp2 x1{s.x1};
  const Fp2 x2{s.x2};
  cf.alpha = f.div(f.sub(f.mul(x1, l2sq), f.mul(x2, l2)), det);
  cf.beta = f.div(f.sub(f.mul(x2, l1), f.mul(x1, l1sq)), det);
  return cf;
}

/// The subgroup generated by lambda1^k.
inline Subgroup root_subgroup(const RecurrenceSpec& s) {
  const ClosedForm cf = closed_form(s);
  return ff::subgroup_generated(s.ctx.pow(cf.lambda1, s.k), s.ctx);
}

// ---------------------------------------------------------------------------
// Bounds

struct BoundValue {
  double value = 0.0;
  int branch = 1;  // 1: cube-root branch, 2: the 12 |.||.| / p branch
};

inline BoundValue max_branch(double first, double second) {
  return first >= second ? BoundValue{first, 1} : BoundValue{second, 2};
}

/// max(3 cbrt(2) (chi |L| |H|)^{1/3}, 12 |L| |H| / p).
inline BoundValue cz_bound_detail(double chi, double size_l, double size_h, u64 p) {
  return max_branch(3.0 * std::cbrt(2.0) * std::cbrt(chi * size_l * size_h),
                    12.0 * size_l * size_h / static_cast<double>(p));
}

inline double cz_bound(double chi, double size_l, double size_h, u64 p) {
  return cz_bound_detail(chi, size_l, size_h, p).value;
}

inline constexpr double kRelativeGuard = 1e-9;

struct BoundReport {
  u64 p = 0;
  u64 lhs_exact = 0;
  double rhs_bound = 0.0;
  int branch_taken = 1;
  bool strict = false;  // '<' rather than '<='
  std::vector<std::string> flags;
  std::optional<bool> holds;  // absent whenever a flag is raised

  /// Sets `holds` from the comparison unless a flag was raised.
  void settle() {
    if (!flags.empty()) {
      holds.reset();
      return;
    }
    const double lhs = static_cast<double>(lhs_exact);
    const double rhs = rhs_bound * (1.0 + kRelativeGuard);
    holds = strict ? lhs < rhs : lhs <= rhs;
  }
  bool violated() const { return holds.has_value() && !*holds; }
};

namespace flag {
inline constexpr const char* kDegenerate = "degenerate-roots";
inline constexpr const char* kDependence = "multiplicative-dependence";
inline constexpr const char* kZeroCoefficient = "zero-coefficient";
inline constexpr const char* kSelfIntersection = "self-intersection";
inline constexpr const char* kTrivialShift = "trivial-shift";
}  // namespace flag

namespace detail {

inline bool divides_either(u64 x, u64 y) { return y % x == 0 || x % y == 0; }

/// Flags for one spec; fills the order of <lambda1^k> when not degenerate.
inline void spec_flags(const RecurrenceSpec& s, std::vector<std::string>& flags,
                       std::optional<u64>& root_order) {
  const ClosedForm cf = closed_form(s);
  if (cf.degenerate) {
    flags.emplace_back(flag::kDegenerate);
    return;
  }
  if (cf.alpha->is_zero() || cf.beta->is_zero()) flags.emplace_back(flag::kZeroCoefficient);
  root_order = ff::mul_order(s.ctx.pow(cf.lambda1, s.k), s.ctx);
}

inline void add_unique(std::vector<std::string>& flags, const char* f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.emplace_back(f);
}

}  // namespace detail

/// |C ∩ C'| <= max(3 2^{2/3} (ks)^{2/3} |C|^{1/3} |C'|^{1/3}, 12 |C||C'| / p).
inline BoundReport prop1_check(const RecurrenceSpec& s1, const RecurrenceSpec& s2) {
  if (s1.ctx.p() != s2.ctx.p()) throw RecurrenceError("modulus mismatch");
  const u64 p = s1.ctx.p();
  const ValueSet v1 = iterate(s1);
  const ValueSet v2 = iterate(s2);
  BoundReport r;
  r.p = p;
  r.lhs_exact = intersect_value_sets(v1, v2);
  const double c1 = static_cast<double>(v1.size());
  const double c2 = static_cast<double>(v2.size());
  const double ks = static_cast<double>(s1.k * s2.k);
  const BoundValue b = max_branch(3.0 * std::cbrt(4.0) * std::cbrt(ks * ks) * std::cbrt(c1 * c2),
                                  12.0 * c1 * c2 / static_cast<double>(p));
  r.rhs_bound = b.value;
  r.branch_taken = b.branch;
  std::optional<u64> o1;
  std::optional<u64> o2;
  detail::spec_flags(s1, r.flags, o1);
  detail::spec_flags(s2, r.flags, o2);
  if (v1.values == v2.values) detail::add_unique(r.flags, flag::kSelfIntersection);
  if (o1 && o2 && detail::divides_either(*o1, *o2)) {
    detail::add_unique(r.flags, flag::kDependence);
  }
  std::sort(r.flags.begin(), r.flags.end());
  r.flags.erase(std::unique(r.flags.begin(), r.flags.end()), r.flags.end());
  r.settle();
  return r;
}

/// |C ∩ G| < max(3 cbrt(4) k^{2/3} |C|^{1/3} |G|^{1/3}, 12 |C||G| / p), G ⊆ F_p^*.
inline BoundReport prop2_check(const RecurrenceSpec& s, const Subgroup& g) {
  if (!g.in_base_field()) throw RecurrenceError("G not inside F_p");
  const u64 p = s.ctx.p();
  const ValueSet v = iterate(s);
  BoundReport r;
  r.p = p;
  r.strict = true;
  for (const Fp2& e : g.elements) r.lhs_exact += v.contains(e.a) ? 1 : 0;
  const double c = static_cast<double>(v.size());
  const double gs = static_cast<double>(g.order());
  const double kk = static_cast<double>(s.k);
  const BoundValue b = max_branch(3.0 * std::cbrt(4.0) * std::cbrt(kk * kk) * std::cbrt(c * gs),
                                  12.0 * c * gs / static_cast<double>(p));
  r.rhs_bound = b.value;
  r.branch_taken = b.branch;
  std::optional<u64> order;
  detail::spec_flags(s, r.flags, order);
  if (order && detail::divides_either(*order, g.order())) {
    detail::add_unique(r.flags, flag::kDependence);
  }
  std::sort(r.flags.begin(), r.flags.end());
  r.settle();
  return r;
}

/// |C ∩ (C - q)| <= max(3 2^{2/3} k^{4/3} |C|^{2/3}, 12 |C|^2 / p).
inline BoundReport prop3_check(const RecurrenceSpec& s, u64 q) {
  const FieldCtx& f = s.ctx;
  q %= f.p();
  const ValueSet v = iterate(s);
  BoundReport r;
  r.p = f.p();
  for (u64 x : v.values) r.lhs_exact += v.contains(f.add(x, q)) ? 1 : 0;
  const double c = static_cast<double>(v.size());
  const double kk = static_cast<double>(s.k);
  const BoundValue b = max_branch(3.0 * std::cbrt(4.0) * std::cbrt(kk * kk * kk * kk) * std::cbrt(c * c),
                                  12.0 * c * c / static_cast<double>(f.p()));
  r.rhs_bound = b.value;
  r.branch_taken = b.branch;
  if (q == 0) r.flags.emplace_back(flag::kTrivialShift);
  std::optional<u64> order;
  detail::spec_flags(s, r.flags, order);
  std::sort(r.flags.begin(), r.flags.end());
  r.settle();
  return r;
}

// ---------------------------------------------------------------------------
// Curves on subgroup products

struct Monomial {
  Fp2 coef;
  unsigned deg_x = 0;
  unsigned deg_y = 0;
};

/// Sparse bivariate polynomial with F_{p^2} coefficients.
struct BivariatePoly {
  std::vector<Monomial> terms;

  Fp2 eval(const Fp2& x, const Fp2& y, const FieldCtx& f) const {
    Fp2 acc{};
    for (const Monomial& m : terms) {
      acc = f.add(acc, f.mul(m.coef, f.mul(f.pow(x, m.deg_x), f.pow(y, m.deg_y))));
    }
    return acc;
  }
};

inline constexpr u64 kCurveGuard = 100'000'000;

/// #{(x, y) in L x H : curve(x, y) = 0}, by brute force.
inline u64 curve_points_on_subgroups(const BivariatePoly& curve, const Subgroup& l,
                                     const Subgroup& h, const FieldCtx& f) {
  if (static_cast<u64>(l.order()) * h.order() > kCurveGuard) {
    throw RecurrenceError("curve point guard: |L||H| exceeds 10^8");
  }
  u64 count = 0;
  for (const Fp2& x : l.elements) {
    for (const Fp2& y : h.elements) count += curve.eval(x, y, f).is_zero() ? 1 : 0;
  }
  return count;
}

namespace detail {

/// (alpha lambda1^r, beta lambda1^{-r} eps^r): the two coefficients of the
/// subsequence x_{lk+r} = c1 u^l + c2 u^{-l}, u = lambda1^k.
inline std::pair<Fp2, Fp2> subsequence_coefs(const RecurrenceSpec& s, u64 r) {
  const FieldCtx& f = s.ctx;
  const ClosedForm cf = closed_form(s);
  if (cf.degenerate) throw RecurrenceError("curve needs distinct characteristic roots");
  const Fp2 lr = f.pow(cf.lambda1, r);
  const Fp2 c1 = f.mul(*cf.alpha, lr);
  const Fp2 c2 = f.mul(f.mul(*cf.beta, f.inv(lr)), Fp2{f.pow(s.eps, r)});
  return {c1, c2};
}

}  // namespace detail

/// c1 x^2 y + c2 y - d1 x y^2 - d2 x for subsequences r1 of s1 and r2 of s2.
inline BivariatePoly curve_p(const RecurrenceSpec& s1, u64 r1, const RecurrenceSpec& s2, u64 r2) {
  const FieldCtx& f = s1.ctx;
  auto [c1, c2] = detail::subsequence_coefs(s1, r1);
  auto [d1, d2] = detail::subsequence_coefs(s2, r2);
  return {{{c1, 2, 1}, {c2, 0, 1}, {f.neg(d1), 1, 2}, {f.neg(d2), 1, 0}}};
}

/// c1 x^2 + c2 - x y for subsequence r of s.
inline BivariatePoly curve_q(const RecurrenceSpec& s, u64 r) {
  const FieldCtx& f = s.ctx;
  auto [c1, c2] = detail::subsequence_coefs(s, r);
  return {{{c1, 2, 0}, {c2, 0, 0}, {f.neg(Fp2{1}), 1, 1}}};
}

/// curve_p(s, r1, s, r2) + q x y.
inline BivariatePoly curve_q_shift(const RecurrenceSpec& s, u64 r1, u64 r2, u64 q) {
  BivariatePoly c = curve_p(s, r1, s, r2);
  c.terms.push_back({Fp2{q % s.ctx.p()}, 1, 1});
  return c;
}

// ---------------------------------------------------------------------------
// Random specs for the proposition suites

/// A uniformly drawn spec: k in [1, 6], eps a k-th root of unity, a and the
/// seeds uniform with the seed pair nonzero.
template <class Rng>
RecurrenceSpec random_spec(const FieldCtx& f, Rng& rng) {
  const u64 p = f.p();
  std::uniform_int_distribution<u64> k_dist(1, 6);
  std::uniform_int_distribution<u64> fp(0, p - 1);
  const u64 k = k_dist(rng);
  const auto roots = ff::kth_roots_of_unity(k, f);
  std::uniform_int_distribution<std::size_t> pick(0, roots.size() - 1);
  const u64 eps = roots[pick(rng)];
  const u64 a = fp(rng);
  u64 x1 = 0;
  u64 x2 = 0;
  while (x1 == 0 && x2 == 0) {
    x1 = fp(rng);
    x2 = fp(rng);
  }
  return RecurrenceSpec(f, a, eps, k, x1, x2);
}

/// As random_spec, redrawn until the characteristic roots are distinct.
template <class Rng>
RecurrenceSpec random_nondegenerate_spec(const FieldCtx& f, Rng& rng) {
  while (true) {
    RecurrenceSpec s = random_spec(f, rng);
    if (!ff::quadratic_roots(s.a, s.eps, f).degenerate) return s;
  }
}

}  // namespace markoff_lab::recurrence
