#pragma once

// Markoff-Hurwitz equation x_1^2 + ... + x_n^2 = a x_1 ... x_n over F_p:
// enumeration, the move graph, reduced three-variable equations obtained by
// freezing n - 3 coordinates, fiber counts shared by overlapping reductions,
// and reduction paths between reduced equations.
//
// Indices are 0-based throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "markoff_lab/ff.hpp"
#include "markoff_lab/graph.hpp"
#include "markoff_lab/markoff.hpp"

namespace markoff_lab::hurwitz {

using ff::FieldCtx;
using ff::Fp2;
using ff::u64;

inline constexpr int kMaxVariables = 6;
inline constexpr u64 kEnumerationGuard = 100'000'000;  // p^(n-1)

class HurwitzError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HurwitzParams {
  FieldCtx ctx;
  int n;
  u64 a;

  HurwitzParams(FieldCtx field, int vars, u64 coef)
      : ctx(field), n(vars), a(coef % field.p()) {
    if (n < 3 || n > kMaxVariables) {
      throw HurwitzError("n must lie in [3, " + std::to_string(kMaxVariables) + "]");
    }
    if (a == 0) throw HurwitzError("a must be nonzero");
  }
};

using TupleN = std::vector<u64>;

inline u64 pack(const TupleN& t, u64 p) {
  u64 key = 0;
  for (auto it = t.rbegin(); it != t.rend(); ++it) key = key * p + *it;
  return key;
}

inline TupleN unpack(u64 key, u64 p, int n) {
  TupleN t(static_cast<std::size_t>(n));
  for (auto& c : t) {
    c = key % p;
    key /= p;
  }
  return t;
}

inline bool is_zero(const TupleN& t) {
  return std::all_of(t.begin(), t.end(), [](u64 c) { return c == 0; });
}

inline bool is_solution(const TupleN& t, const HurwitzParams& params) {
  if (static_cast<int>(t.size()) != params.n) {
    throw HurwitzError("arity mismatch: expected " + std::to_string(params.n) +
                       " coordinates, got " + std::to_string(t.size()));
  }
  const FieldCtx& f = params.ctx;
  u64 squares = 0;
  u64 prod = params.a;
  for (u64 c : t) {
    squares = f.add(squares, f.mul(c, c));
    prod = f.mul(prod, c);
  }
  return squares == prod;
}

/// Adjacent transpositions, pairwise double sign flips and the n Vieta moves.
inline std::vector<TupleN> neighbors(const TupleN& t, const HurwitzParams& params) {
  if (!is_solution(t, params)) throw HurwitzError("input is not a solution");
  const FieldCtx& f = params.ctx;
  const std::size_t n = t.size();
  std::vector<TupleN> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    TupleN u = t;
    std::swap(u[i], u[i + 1]);
    out.push_back(std::move(u));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      TupleN u = t;
      u[i] = f.neg(u[i]);
      u[j] = f.neg(u[j]);
      out.push_back(std::move(u));
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    u64 prod = params.a;
    for (std::size_t m = 0; m < n; ++m) {
      if (m != l) prod = f.mul(prod, t[m]);
    }
    TupleN u = t;
    u[l] = f.sub(prod, t[l]);
    out.push_back(std::move(u));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct SolutionSet {
  std::vector<TupleN> tuples;  // ascending packed key
  bool contains_zero = false;
};

/// Loops over the first n - 1 coordinates and solves the quadratic in the last.
inline std::vector<u64> enumerate_keys(const HurwitzParams& params, unsigned threads = 1) {
  const FieldCtx& f = params.ctx;
  const u64 p = f.p();
  const int n = params.n;
  u64 cells = 1;
  for (int i = 0; i < n - 1; ++i) {
    cells *= p;
    if (cells > kEnumerationGuard) {
      throw HurwitzError("enumeration guard: p^(n-1) exceeds 10^8");
    }
  }
  const auto root = markoff::detail::sqrt_table(f);
  const u64 half = f.inv(2);
  const u64 top = cells / p;  // p^(n-2) prefixes below the leading coordinate

  auto slice = [&](u64 lead_begin, u64 lead_step, std::vector<u64>& keys) {
    TupleN t(static_cast<std::size_t>(n), 0);
    for (u64 lead = lead_begin; lead < p; lead += lead_step) {
      for (u64 rest = 0; rest < top; ++rest) {
        t[0] = lead;
        u64 r = rest;
        for (int i = 1; i < n - 1; ++i) {
          t[static_cast<std::size_t>(i)] = r % p;
          r /= p;
        }
        u64 squares = 0;
        u64 prod = params.a;
        for (int i = 0; i < n - 1; ++i) {
          const u64 c = t[static_cast<std::size_t>(i)];
          squares = f.add(squares, f.mul(c, c));
          prod = f.mul(prod, c);
        }
        markoff::detail::roots_in_fp(prod, squares, f, half, root, [&](u64 last) {
          t[static_cast<std::size_t>(n - 1)] = last;
          keys.push_back(pack(t, p));
        });
      }
    }
  };

  std::vector<u64> keys;
  threads = std::max(1u, threads);
  if (threads == 1) {
    slice(0, 1, keys);
  } else {
    std::vector<std::vector<u64>> parts(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] { slice(t, threads, parts[t]); });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts) keys.insert(keys.end(), part.begin(), part.end());
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

inline SolutionSet enumerate_solutions(const HurwitzParams& params, unsigned threads = 1) {
  SolutionSet out;
  const u64 p = params.ctx.p();
  for (u64 k : enumerate_keys(params, threads)) out.tuples.push_back(unpack(k, p, params.n));
  out.contains_zero = !out.tuples.empty() && is_zero(out.tuples.front());
  return out;
}

/// Components of H*(p), the graph on nonzero solutions.
inline Decomposition decompose_solutions(const HurwitzParams& params, unsigned threads = 1) {
  const u64 p = params.ctx.p();
  std::vector<u64> keys = enumerate_keys(params, threads);
  if (!keys.empty() && keys.front() == 0) keys.erase(keys.begin());
  return decompose(std::move(keys), [&](u64 key, auto&& sink) {
    for (const TupleN& u : neighbors(unpack(key, p, params.n), params)) {
      if (!is_zero(u)) sink(pack(u, p));
    }
  });
}

inline ComponentReport components(const HurwitzParams& params, unsigned threads = 1) {
  return decompose_solutions(params, threads).report;
}

/// (p - 3 - 2 sqrt p) p^(n-2) and (p + 1 + 2 sqrt p) p^(n-2).
struct Sandwich {
  double low;
  double high;
  bool holds(u64 count) const {
    const auto c = static_cast<double>(count);
    return low < c && c < high;
  }
};

inline Sandwich sandwich_bounds(u64 p, int n) {
  const double pd = static_cast<double>(p);
  const double scale = std::pow(pd, n - 2);
  return {(pd - 3.0 - 2.0 * std::sqrt(pd)) * scale, (pd + 1.0 + 2.0 * std::sqrt(pd)) * scale};
}

// ---------------------------------------------------------------------------
// Reduced equations

/// x_i1^2 + x_i2^2 + x_i3^2 + sum c_j^2 = a (prod c_j) x_i1 x_i2 x_i3, i.e. the
/// three-variable equation with A = a prod c_j and B = -sum c_j^2.
struct ReducedSpec {
  std::array<int, 3> free{};        // ascending
  std::vector<int> frozen;          // ascending, complement of `free`
  std::vector<u64> values;          // aligned with `frozen`
  u64 A = 0;
  u64 B = 0;

  bool all_frozen_nonzero() const {
    return std::all_of(values.begin(), values.end(), [](u64 v) { return v != 0; });
  }
  std::optional<u64> value_at(int index) const {
    for (std::size_t k = 0; k < frozen.size(); ++k) {
      if (frozen[k] == index) return values[k];
    }
    return std::nullopt;
  }
  bool is_free(int index) const {
    return std::find(free.begin(), free.end(), index) != free.end();
  }
  friend bool operator==(const ReducedSpec& x, const ReducedSpec& y) {
    return x.free == y.free && x.frozen == y.frozen && x.values == y.values;
  }
};

/// `values` are listed in ascending order of the frozen indices.
inline ReducedSpec reduced_equation(const HurwitzParams& params, std::array<int, 3> free,
                                    std::vector<u64> values) {
  const int n = params.n;
  std::sort(free.begin(), free.end());
  for (int i : free) {
    if (i < 0 || i >= n) throw HurwitzError("free index out of range");
  }
  if (free[0] == free[1] || free[1] == free[2]) throw HurwitzError("index overlap");
  if (static_cast<int>(values.size()) != n - 3) {
    throw HurwitzError("expected " + std::to_string(n - 3) + " frozen values");
  }
  const FieldCtx& f = params.ctx;
  ReducedSpec s;
  s.free = free;
  for (int i = 0; i < n; ++i) {
    if (!s.is_free(i)) s.frozen.push_back(i);
  }
  s.values = std::move(values);
  s.A = params.a;
  s.B = 0;
  for (u64& v : s.values) {
    v %= f.p();
    s.A = f.mul(s.A, v);
    s.B = f.sub(s.B, f.mul(v, v));
  }
  return s;
}

/// The reduced spec as a generalized Markoff equation; requires A != 0.
inline markoff::MarkoffParams as_markoff(const ReducedSpec& spec, const HurwitzParams& params) {
  return markoff::MarkoffParams(params.ctx, spec.A, spec.B);
}

/// Places the free triple at the free indices and the frozen values elsewhere.
inline TupleN embed(const ReducedSpec& spec, const markoff::Triple& t, int n) {
  TupleN out(static_cast<std::size_t>(n), 0);
  out[static_cast<std::size_t>(spec.free[0])] = t.x;
  out[static_cast<std::size_t>(spec.free[1])] = t.y;
  out[static_cast<std::size_t>(spec.free[2])] = t.z;
  for (std::size_t k = 0; k < spec.frozen.size(); ++k) {
    out[static_cast<std::size_t>(spec.frozen[k])] = spec.values[k];
  }
  return out;
}

/// All C(n,3) p^(n-3) reduced specs, in (free triple, values) lexicographic order.
inline std::vector<ReducedSpec> all_reduced_specs(const HurwitzParams& params) {
  const int n = params.n;
  const u64 p = params.ctx.p();
  std::vector<ReducedSpec> out;
  u64 combos = 1;
  for (int i = 0; i < n - 3; ++i) combos *= p;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        for (u64 c = 0; c < combos; ++c) {
          std::vector<u64> vals(static_cast<std::size_t>(n - 3));
          u64 r = c;
          for (auto& v : vals) {
            v = r % p;
            r /= p;
          }
          out.push_back(reduced_equation(params, {i, j, k}, std::move(vals)));
        }
      }
    }
  }
  return out;
}

inline u64 binomial(u64 n, u64 k) {
  u64 r = 1;
  for (u64 i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------
// Irreducibility of x1^2 + x2^2 - b x1 x2 + c = 0

struct IrreducibilityCheck {
  bool lemma_says_irreducible;  // c != 0
  bool factorizes;              // (x1 + al x2 + be)(x1 + ga x2 + de) exists over F_{p^2}
  bool irreducible() const { return !factorizes; }
  bool agrees() const { return lemma_says_irreducible == !factorizes; }
};

/// Exhaustive search over the ansatz's free parameters (alpha, beta) in F_{p^2};
/// matching x1 coefficients forces gamma = -b - alpha and delta = -beta.
inline IrreducibilityCheck check_irreducibility(u64 b, u64 c, const FieldCtx& f) {
  b %= f.p();
  c %= f.p();
  const u64 p = f.p();
  const Fp2 minus_b{f.neg(b)};
  const Fp2 target_c{c};
  bool found = false;
  for (u64 a0 = 0; a0 < p && !found; ++a0) {
    for (u64 a1 = 0; a1 < p && !found; ++a1) {
      const Fp2 alpha{a0, a1};
      const Fp2 gamma = f.sub(minus_b, alpha);
      if (f.mul(alpha, gamma) != Fp2{1}) continue;
      for (u64 b0 = 0; b0 < p && !found; ++b0) {
        for (u64 b1 = 0; b1 < p && !found; ++b1) {
          const Fp2 beta{b0, b1};
          const Fp2 delta = f.neg(beta);
          const bool x2_term = f.add(f.mul(alpha, delta), f.mul(beta, gamma)).is_zero();
          if (x2_term && f.mul(beta, delta) == target_c) found = true;
        }
      }
    }
  }
  return {c != 0, found};
}

inline bool is_irreducible_conic(u64 b, u64 c, const FieldCtx& f) {
  return check_irreducibility(b, c, f).irreducible();
}

// ---------------------------------------------------------------------------
// Fibers

struct FiberCount {
  u64 count = 0;
  double bound = 0.0;               // p - 2 sqrt p - 3
  bool hypothesis_holds = false;    // every shared frozen value nonzero
  std::optional<bool> exceeds_bound;  // set only when hypothesis_holds

  bool nonempty() const { return count > 0; }
};

inline double fiber_bound(u64 p) {
  const double pd = static_cast<double>(p);
  return pd - 2.0 * std::sqrt(pd) - 3.0;
}

/// Solutions (x, y) of x^2 + y^2 + sum c^2 = a (prod c) x y for the n - 2 shared
/// frozen values c: the common solutions of two overlapping reduced equations.
inline FiberCount fiber_count(const HurwitzParams& params, const std::vector<u64>& shared) {
  if (static_cast<int>(shared.size()) != params.n - 2) {
    throw HurwitzError("fiber needs " + std::to_string(params.n - 2) + " shared values");
  }
  const FieldCtx& f = params.ctx;
  const u64 p = f.p();
  u64 prod = params.a;
  u64 squares = 0;
  bool nonzero = true;
  for (u64 v : shared) {
    v %= p;
    nonzero = nonzero && v != 0;
    prod = f.mul(prod, v);
    squares = f.add(squares, f.mul(v, v));
  }
  // For each x: y^2 - (prod x) y + (x^2 + squares) = 0.
  const auto root = markoff::detail::sqrt_table(f);
  const u64 half = f.inv(2);
  FiberCount fc;
  for (u64 x = 0; x < p; ++x) {
    markoff::detail::roots_in_fp(f.mul(prod, x), f.add(f.mul(x, x), squares), f, half, root,
                                 [&](u64) { ++fc.count; });
  }
  fc.bound = fiber_bound(p);
  fc.hypothesis_holds = nonzero;
  if (nonzero) fc.exceeds_bound = static_cast<double>(fc.count) > fc.bound;
  return fc;
}

// ---------------------------------------------------------------------------
// Reduction paths

struct ReductionStep {
  ReducedSpec from;
  ReducedSpec to;
  std::vector<u64> shared;  // values of the n - 2 coordinates fixed in both
  u64 shared_fiber_size = 0;
};

struct ReductionPath {
  std::vector<ReductionStep> steps;
  std::size_t length() const { return steps.size(); }
};

namespace detail {

/// Replace free index `out_index` (frozen at `value`) by frozen index `in_index`.
inline ReducedSpec swap_spec(const HurwitzParams& params, const ReducedSpec& s, int out_index,
                             u64 value, int in_index) {
  std::array<int, 3> free = s.free;
  for (int& i : free) {
    if (i == out_index) i = in_index;
  }
  std::sort(free.begin(), free.end());
  std::vector<u64> vals;
  for (int i = 0; i < params.n; ++i) {
    if (std::find(free.begin(), free.end(), i) != free.end()) continue;
    vals.push_back(i == out_index ? value : *s.value_at(i));
  }
  return reduced_equation(params, free, std::move(vals));
}

/// Frozen values shared by `s` and its swap (out_index frozen at value).
inline std::vector<u64> shared_values(const ReducedSpec& s, int out_index, u64 value) {
  std::vector<int> idx = s.frozen;
  std::vector<u64> vals = s.values;
  idx.push_back(out_index);
  vals.push_back(value);
  std::vector<std::size_t> order(idx.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return idx[x] < idx[y]; });
  std::vector<u64> out;
  for (std::size_t k : order) out.push_back(vals[k]);
  return out;
}

}  // namespace detail

/// Moves from one reduced equation to another through reduced equations with
/// nonzero frozen values, each consecutive pair sharing a nonempty fiber.
/// Index swaps run first (left to right), then frozen values are rewritten
/// with the two-step swap-out / swap-back maneuver. Throws when some step has
/// no admissible intermediate value.
inline ReductionPath reduction_path(const HurwitzParams& params, const ReducedSpec& from,
                                   const ReducedSpec& to) {
  if (!from.all_frozen_nonzero() || !to.all_frozen_nonzero()) {
    throw HurwitzError("reduction paths require nonzero frozen values");
  }
  const u64 p = params.ctx.p();
  ReductionPath path;
  ReducedSpec cur = from;

  auto push_step = [&](int out_index, u64 value, int in_index) {
    std::vector<u64> shared = detail::shared_values(cur, out_index, value);
    FiberCount fc = fiber_count(params, shared);
    ReducedSpec next = detail::swap_spec(params, cur, out_index, value, in_index);
    path.steps.push_back({cur, next, std::move(shared), fc.count});
    cur = std::move(next);
  };
  auto fiber_ok = [&](const ReducedSpec& s, int out_index, u64 value) {
    return fiber_count(params, detail::shared_values(s, out_index, value)).nonempty();
  };

  // Index phase.
  std::vector<int> leaving;
  std::vector<int> entering;
  for (int i : from.free) {
    if (!to.is_free(i)) leaving.push_back(i);
  }
  for (int i : to.free) {
    if (!from.is_free(i)) entering.push_back(i);
  }
  for (std::size_t k = 0; k < leaving.size(); ++k) {
    const int out_index = leaving[k];
    const int in_index = entering[k];
    u64 value = *to.value_at(out_index);
    if (!fiber_ok(cur, out_index, value)) {
      std::optional<u64> alt;
      for (u64 v = 1; v < p && !alt; ++v) {
        if (fiber_ok(cur, out_index, v)) alt = v;
      }
      if (!alt) {
        throw HurwitzError("no nonempty fiber for index swap at p = " + std::to_string(p));
      }
      value = *alt;
    }
    push_step(out_index, value, in_index);
  }

  // Value phase.
  for (int j : to.frozen) {
    const u64 target = *to.value_at(j);
    const u64 current = *cur.value_at(j);
    if (current == target) continue;
    const int pivot = cur.free[0];
    std::optional<u64> mid;
    for (u64 v = 1; v < p && !mid; ++v) {
      if (!fiber_ok(cur, pivot, v)) continue;
      ReducedSpec probe = detail::swap_spec(params, cur, pivot, v, j);
      if (fiber_ok(probe, j, target)) mid = v;
    }
    if (!mid) {
      throw HurwitzError("no intermediate value rewrites frozen coordinate " +
                         std::to_string(j) + " at p = " + std::to_string(p));
    }
    push_step(pivot, *mid, j);
    push_step(j, target, pivot);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Giant union

struct GiantUnionReport {
  u64 reduced_spec_count = 0;      // C(n,3) p^(n-3)
  u64 checked_specs = 0;           // specs with every frozen value nonzero
  u64 hypothesis_violated = 0;     // specs with a zero frozen value (skipped)
  u64 specs_outside_giant = 0;     // reduced giants not inside the global giant
  u64 residual = 0;                // |H*(p) \ C(p)|
  double residual_budget = 0.0;    // C(n,3) p^(n-3), reported only
  bool passed() const { return specs_outside_giant == 0; }
};

/// For every reduced equation with nonzero frozen values, embeds the largest
/// component of its solution graph and checks it lies in the global giant.
inline GiantUnionReport giant_union_check(const HurwitzParams& params,
                                          const Decomposition& global) {
  const u64 p = params.ctx.p();
  GiantUnionReport r;
  r.reduced_spec_count = binomial(static_cast<u64>(params.n), 3);
  for (int i = 0; i < params.n - 3; ++i) r.reduced_spec_count *= p;
  r.residual_budget = static_cast<double>(r.reduced_spec_count);
  r.residual = global.report.residual;
  for (const ReducedSpec& spec : all_reduced_specs(params)) {
    if (!spec.all_frozen_nonzero()) {
      ++r.hypothesis_violated;
      continue;
    }
    ++r.checked_specs;
    const auto mp = as_markoff(spec, params);
    const Decomposition local = markoff::decompose_solutions(mp);
    if (local.keys.empty()) continue;
    bool inside = true;
    for (std::size_t v = 0; v < local.keys.size() && inside; ++v) {
      if (local.component_of[v] != 0) continue;
      const TupleN t = embed(spec, markoff::unpack(local.keys[v], p), params.n);
      inside = global.component_of_key(pack(t, p)) == 0;
    }
    if (!inside) ++r.specs_outside_giant;
  }
  return r;
}

inline GiantUnionReport giant_union_check(const HurwitzParams& params) {
  return giant_union_check(params, decompose_solutions(params));
}

}  // namespace markoff_lab::hurwitz
