#pragma once

// Fibonacci residues modulo N: Pisano periods, the Binet formula over F_p or
// F_{p^2}, and the subgroup / shift intersection corollaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "markoff_lab/ff.hpp"
#include "markoff_lab/recurrence.hpp"

namespace markoff_lab::fibonacci {

using ff::FieldCtx;
using ff::Fp2;
using ff::u64;
using recurrence::BoundReport;

inline constexpr u64 kMaxModulus = 1'000'000'000;

class FibonacciError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PisanoRecord {
  u64 modulus = 0;
  u64 period = 0;
  std::vector<u64> residues;  // ascending

  bool contains(u64 v) const { return std::binary_search(residues.begin(), residues.end(), v); }
};

inline PisanoRecord pisano(u64 n) {
  if (n < 2) throw FibonacciError("modulus must be at least 2");
  if (n > kMaxModulus) throw FibonacciError("modulus exceeds 10^9");
  std::vector<bool> seen(n, false);
  u64 prev = 0;
  u64 cur = 1;
  u64 period = 0;
  do {
    seen[prev] = true;
    const u64 nxt = (prev + cur) % n;
    prev = cur;
    cur = nxt;
    ++period;
    if (period > 6 * n) throw FibonacciError("period exceeds 6N");
  } while (!(prev == 0 && cur == 1));
  PisanoRecord r{n, period, {}};
  for (u64 v = 0; v < n; ++v) {
    if (seen[v]) r.residues.push_back(v);
  }
  return r;
}

inline bool pisano_lcm_check(u64 m, u64 n) {
  if (m < 2 || n < 2) throw FibonacciError("moduli must be at least 2");
  if (std::gcd(m, n) != 1) {
    throw FibonacciError("moduli " + std::to_string(m) + " and " + std::to_string(n) +
                         " are not coprime");
  }
  return pisano(m * n).period == std::lcm(pisano(m).period, pisano(n).period);
}

/// pi(p^{k+1}) is either pi(p^k) or p pi(p^k).
inline bool pisano_prime_power_check(u64 p, unsigned k) {
  if (!ff::is_prime(p)) throw FibonacciError(std::to_string(p) + " is not prime");
  if (k < 1) throw FibonacciError("exponent must be at least 1");
  u64 pk = 1;
  for (unsigned i = 0; i < k; ++i) pk *= p;
  if (pk > kMaxModulus / p) throw FibonacciError("p^(k+1) exceeds 10^9");
  const u64 lower = pisano(pk).period;
  const u64 upper = pisano(pk * p).period;
  return upper == lower || upper == p * lower;
}

struct BinetResult {
  std::vector<u64> residues;  // ascending
  bool fallback = false;      // p in {2, 5}: computed by iteration
};

/// f_n = 5^{-1/2} (lambda^n - (-lambda)^{-n}) with lambda = (1 + sqrt 5) / 2.
/// For h = lambda^i in H = <lambda>, (-1)^n is fixed by h when |H| is even and
/// takes both values when |H| is odd.
inline BinetResult binet_residue_set(u64 p) {
  if (p == 2 || p == 5) return {pisano(p).residues, true};
  const FieldCtx f(p, FieldCtx::Mode::relaxed);
  const auto roots = ff::quadratic_roots(1, p - 1, f);  // t^2 - t - 1
  const Fp2 lambda = roots.first;
  const Fp2 sqrt5 = f.sub(f.mul(Fp2{2}, lambda), Fp2{1});
  const Fp2 inv_sqrt5 = f.inv(sqrt5);
  const ff::Subgroup h = ff::subgroup_generated(lambda, f);
  const bool both_parities = h.order() % 2 == 1;
  std::vector<u64> out;
  auto emit = [&](const Fp2& hv, bool odd) {
    const Fp2 hinv = f.inv(hv);
    const Fp2 v = f.mul(inv_sqrt5, odd ? f.add(hv, hinv) : f.sub(hv, hinv));
    if (!v.in_base_field()) throw FibonacciError("Binet value left F_p");
    out.push_back(v.a);
  };
  for (std::size_t i = 0; i < h.order(); ++i) {
    emit(h.elements[i], i % 2 == 1);
    if (both_parities) emit(h.elements[i], i % 2 == 0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return {out, false};
}

/// |F_p ∩ G| < max(6 cbrt(2) pi(p)^{1/3} |G|^{1/3}, 12 pi(p) |G| / p).
inline BoundReport corollary2_check(u64 p, const ff::Subgroup& g) {
  if (p < 7) throw FibonacciError("corollary checks need p >= 7");
  if (!g.in_base_field()) throw FibonacciError("G not inside F_p");
  const PisanoRecord rec = pisano(p);
  BoundReport r;
  r.p = p;
  r.strict = true;
  for (const Fp2& e : g.elements) r.lhs_exact += rec.contains(e.a) ? 1 : 0;
  const double pi = static_cast<double>(rec.period);
  const double gs = static_cast<double>(g.order());
  const auto b = recurrence::max_branch(6.0 * std::cbrt(2.0) * std::cbrt(pi * gs),
                                        12.0 * pi * gs / static_cast<double>(p));
  r.rhs_bound = b.value;
  r.branch_taken = b.branch;
  r.settle();
  return r;
}

/// |F_p ∩ (F_p + q)| < max(12 pi(p)^{2/3}, 12 pi(p)^2 / p).
inline BoundReport corollary3_check(u64 p, u64 q) {
  if (p < 7) throw FibonacciError("corollary checks need p >= 7");
  q %= p;
  const PisanoRecord rec = pisano(p);
  BoundReport r;
  r.p = p;
  r.strict = true;
  for (u64 x : rec.residues) r.lhs_exact += rec.contains((x + p - q) % p) ? 1 : 0;
  const double pi = static_cast<double>(rec.period);
  const auto b = recurrence::max_branch(12.0 * std::cbrt(pi * pi),
                                        12.0 * pi * pi / static_cast<double>(p));
  r.rhs_bound = b.value;
  r.branch_taken = b.branch;
  if (q == 0) r.flags.emplace_back(recurrence::flag::kTrivialShift);
  r.settle();
  return r;
}

}  // namespace markoff_lab::fibonacci
