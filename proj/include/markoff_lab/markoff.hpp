#pragma once

// Solutions of x^2 + y^2 + z^2 = A xyz + B over F_p and the graph generated by
// coordinate permutations, double sign flips and Vieta moves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "markoff_lab/ff.hpp"
#include "markoff_lab/graph.hpp"

namespace markoff_lab::markoff {

using ff::FieldCtx;
using ff::u64;

inline constexpr u64 kMaxEnumerationPrime = u64{1} << 20;

class MarkoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MarkoffParams {
  FieldCtx ctx;
  u64 A;
  u64 B;

  MarkoffParams(FieldCtx field, u64 a_coef, u64 b_coef)
      : ctx(field), A(a_coef % field.p()), B(b_coef % field.p()) {
    if (A == 0) throw MarkoffError("A must be nonzero");
  }

  bool classical() const { return A == 3 % ctx.p() && B == 0; }
};

struct Triple {
  u64 x = 0;
  u64 y = 0;
  u64 z = 0;
  friend constexpr bool operator==(const Triple&, const Triple&) = default;
  friend constexpr auto operator<=>(const Triple&, const Triple&) = default;
};

/// Which move families generate the graph. All three by default.
struct Generators {
  bool permutations = true;
  bool sign_flips = true;
  bool vieta = true;
};

inline u64 pack(const Triple& t, u64 p) { return t.x + p * (t.y + p * t.z); }

inline Triple unpack(u64 key, u64 p) { return {key % p, key / p % p, key / (p * p)}; }

inline bool is_solution(const Triple& t, const MarkoffParams& params) {
  const FieldCtx& f = params.ctx;
  u64 lhs = f.add(f.add(f.mul(t.x, t.x), f.mul(t.y, t.y)), f.mul(t.z, t.z));
  u64 rhs = f.add(f.mul(f.mul(params.A, t.x), f.mul(t.y, t.z)), params.B);
  return lhs == rhs;
}

/// Every image of t under one generator, sorted and deduplicated.
inline std::vector<Triple> neighbors(const Triple& t, const MarkoffParams& params,
                                     const Generators& gens = {}) {
  if (!is_solution(t, params)) throw MarkoffError("input is not a solution");
  const FieldCtx& f = params.ctx;
  std::vector<Triple> out;
  out.reserve(12);
  if (gens.permutations) {
    out.push_back({t.x, t.y, t.z});
    out.push_back({t.x, t.z, t.y});
    out.push_back({t.y, t.x, t.z});
    out.push_back({t.y, t.z, t.x});
    out.push_back({t.z, t.x, t.y});
    out.push_back({t.z, t.y, t.x});
  }
  if (gens.sign_flips) {
    out.push_back({f.neg(t.x), f.neg(t.y), t.z});
    out.push_back({f.neg(t.x), t.y, f.neg(t.z)});
    out.push_back({t.x, f.neg(t.y), f.neg(t.z)});
  }
  if (gens.vieta) {
    out.push_back({f.sub(f.mul(params.A, f.mul(t.y, t.z)), t.x), t.y, t.z});
    out.push_back({t.x, f.sub(f.mul(params.A, f.mul(t.x, t.z)), t.y), t.z});
    out.push_back({t.x, t.y, f.sub(f.mul(params.A, f.mul(t.x, t.y)), t.z)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct SolutionSet {
  std::vector<Triple> triples;  // ascending packed key
  bool contains_zero = false;
};

namespace detail {

/// Square-root table for F_p: root[x] = canonical sqrt or -1.
inline std::vector<std::int64_t> sqrt_table(const FieldCtx& f) {
  std::vector<std::int64_t> root(f.p(), -1);
  for (u64 r = 0; r <= f.p() / 2; ++r) root[f.mul(r, r)] = static_cast<std::int64_t>(r);
  return root;
}

/// F_p roots of t^2 - b t + c using a precomputed sqrt table.
template <class Sink>
void roots_in_fp(u64 b, u64 c, const FieldCtx& f, u64 half,
                 const std::vector<std::int64_t>& root, Sink&& sink) {
  u64 disc = f.sub(f.mul(b, b), f.mul(4, c));
  std::int64_t s = root[disc];
  if (s < 0) return;
  u64 r1 = f.mul(f.add(b, static_cast<u64>(s)), half);
  sink(r1);
  if (s != 0) sink(f.mul(f.sub(b, static_cast<u64>(s)), half));
}

}  // namespace detail

/// O(p^2): for each (x, y) solve z^2 - (Axy) z + (x^2 + y^2 - B) = 0.
inline SolutionSet enumerate_solutions(const MarkoffParams& params, unsigned threads = 1) {
  const FieldCtx& f = params.ctx;
  const u64 p = f.p();
  if (p > kMaxEnumerationPrime) {
    throw MarkoffError("enumeration guard: p = " + std::to_string(p) + " exceeds 2^20");
  }
  const auto root = detail::sqrt_table(f);
  const u64 half = f.inv(2);
  auto slice = [&](u64 x_begin, u64 x_step, std::vector<u64>& keys) {
    for (u64 x = x_begin; x < p; x += x_step) {
      const u64 xx = f.mul(x, x);
      const u64 ax = f.mul(params.A, x);
      for (u64 y = 0; y < p; ++y) {
        const u64 b = f.mul(ax, y);
        const u64 c = f.sub(f.add(xx, f.mul(y, y)), params.B);
        detail::roots_in_fp(b, c, f, half, root,
                            [&](u64 z) { keys.push_back(pack({x, y, z}, p)); });
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
  SolutionSet out;
  out.triples.reserve(keys.size());
  for (u64 k : keys) out.triples.push_back(unpack(k, p));
  std::sort(out.triples.begin(), out.triples.end());
  out.contains_zero = !keys.empty() && keys.front() == 0;
  return out;
}

/// Components of X*(p): the solution graph without the zero triple.
inline Decomposition decompose_solutions(const MarkoffParams& params,
                                         const Generators& gens = {},
                                         unsigned threads = 1) {
  const u64 p = params.ctx.p();
  SolutionSet sols = enumerate_solutions(params, threads);
  std::vector<u64> keys;
  keys.reserve(sols.triples.size());
  for (const Triple& t : sols.triples) {
    if (t != Triple{}) keys.push_back(pack(t, p));
  }
  return decompose(std::move(keys), [&](u64 key, auto&& sink) {
    for (const Triple& u : neighbors(unpack(key, p), params, gens)) {
      if (u != Triple{}) sink(pack(u, p));
    }
  });
}

inline ComponentReport components(const MarkoffParams& params, const Generators& gens = {},
                                  unsigned threads = 1) {
  return decompose_solutions(params, gens, threads).report;
}

/// One flag per component: does p divide its size. Only meaningful for the
/// classical equation A = 3, B = 0.
inline std::vector<bool> chen_divisibility(const ComponentReport& report,
                                           const MarkoffParams& params) {
  if (!params.classical()) {
    throw MarkoffError("divisibility check cited only for the classical equation");
  }
  std::vector<bool> out;
  out.reserve(report.component_sizes.size());
  for (u64 s : report.component_sizes) out.push_back(s % params.ctx.p() == 0);
  return out;
}

struct Normalization {
  u64 b_prime;  // A^2 B / 9
  u64 scale;    // A / 3
};

/// Scaling by A/3 carries solutions of (A, B) onto solutions of (3, A^2 B / 9).
inline Normalization normalize(u64 A, u64 B, const FieldCtx& ctx) {
  if (ctx.p() == 3) throw MarkoffError("normalization divides by 3");
  A %= ctx.p();
  B %= ctx.p();
  if (A == 0) throw MarkoffError("A must be nonzero");
  const u64 inv3 = ctx.inv(3);
  const u64 inv9 = ctx.mul(inv3, inv3);
  return {ctx.mul(ctx.mul(ctx.mul(A, A), inv9), B), ctx.mul(A, inv3)};
}

struct GiantReport {
  ComponentReport components;
  double giant_fraction = 0.0;
  // Comparison values for the asymptotic statements; tabulated, never asserted.
  double log_pow_one_third = 0.0;    // (log p)^{1/3}
  double log_pow_seven_ninths = 0.0; // (log p)^{7/9}
  double exp_sqrt_log = 0.0;         // exp((log p)^{1/2})
};

inline GiantReport giant_report(const ComponentReport& report, u64 p) {
  GiantReport g;
  g.components = report;
  g.giant_fraction = report.total_nonzero == 0
                         ? 0.0
                         : static_cast<double>(report.giant_size) /
                               static_cast<double>(report.total_nonzero);
  const double lp = std::log(static_cast<double>(p));
  g.log_pow_one_third = std::pow(lp, 1.0 / 3.0);
  g.log_pow_seven_ninths = std::pow(lp, 7.0 / 9.0);
  g.exp_sqrt_log = std::exp(std::sqrt(lp));
  return g;
}

inline GiantReport giant_report(const MarkoffParams& params) {
  return giant_report(components(params), params.ctx.p());
}

}  // namespace markoff_lab::markoff
