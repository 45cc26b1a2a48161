#pragma once

// Arithmetic in F_p and F_{p^2} = F_p(w), w^2 = d for the least quadratic
// non-residue d. Moduli are capped at 2^31 so every product of two residues
// fits in 64 bits.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace markoff_lab::ff {

using u64 = std::uint64_t;
using i64 = std::int64_t;

inline constexpr u64 kMaxModulus = u64{1} << 31;
inline constexpr std::size_t kDefaultSubgroupCap = 10'000'000;

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline u64 mulmod64(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 powmod64(u64 base, u64 e, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, base, m);
    base = mulmod64(base, base, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Deterministic Miller-Rabin, exact for every n < 2^64.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = detail::powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Distinct prime factors by trial division; fine for n up to ~2^40.
inline std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// a + b*w. Elements with b == 0 are the embedded copy of F_p.
struct Fp2 {
  u64 a = 0;
  u64 b = 0;

  constexpr Fp2() = default;
  constexpr Fp2(u64 re) : a(re) {}  // NOLINT(google-explicit-constructor)
  constexpr Fp2(u64 re, u64 im) : a(re), b(im) {}

  constexpr bool in_base_field() const { return b == 0; }
  constexpr bool is_zero() const { return a == 0 && b == 0; }
  friend constexpr bool operator==(const Fp2&, const Fp2&) = default;
  friend constexpr auto operator<=>(const Fp2&, const Fp2&) = default;
};

inline std::string to_string(const Fp2& x) {
  if (x.b == 0) return std::to_string(x.a);
  return std::to_string(x.a) + "+" + std::to_string(x.b) + "*w";
}

struct QuadraticRoots {
  Fp2 first;
  Fp2 second;
  bool degenerate = false;  // discriminant is zero, first == second
};

class FieldCtx {
 public:
  enum class Mode { strict, relaxed };

  explicit FieldCtx(u64 p, Mode mode = Mode::strict) : p_(p) {
    if (p >= kMaxModulus) {
      throw FieldError("modulus " + std::to_string(p) + " exceeds 2^31");
    }
    if (!is_prime(p)) {
      throw FieldError("modulus " + std::to_string(p) + " is not prime");
    }
    if (mode == Mode::strict && p < 5) {
      throw FieldError("p = " + std::to_string(p) +
                       " rejected: p must be at least 5 (use relaxed mode)");
    }
    if (p == 2) {
      nonresidue_ = 0;  // every element of F_2 is a square; no extension
    } else {
      nonresidue_ = 2;
      while (legendre(nonresidue_) != -1) ++nonresidue_;
    }
  }

  u64 p() const { return p_; }
  u64 nonresidue() const { return nonresidue_; }
  bool has_extension() const { return p_ != 2; }

  // ---- F_p ----
  u64 reduce(i64 v) const {
    i64 r = v % static_cast<i64>(p_);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(p_) : r);
  }
  u64 add(u64 x, u64 y) const {
    u64 s = x + y;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 x, u64 y) const { return x >= y ? x - y : x + p_ - y; }
  u64 neg(u64 x) const { return x == 0 ? 0 : p_ - x; }
  u64 mul(u64 x, u64 y) const { return x * y % p_; }
  u64 pow(u64 x, u64 e) const {
    u64 r = 1 % p_;
    x %= p_;
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 x) const {
    if (x % p_ == 0) throw FieldError("inverse of zero");
    return pow(x, p_ - 2);
  }
  u64 div(u64 x, u64 y) const { return mul(x, inv(y)); }

  /// Euler's criterion, normalized to {-1, 0, 1}.
  int legendre(u64 x) const {
    x %= p_;
    if (x == 0) return 0;
    if (p_ == 2) return 1;
    return pow(x, (p_ - 1) / 2) == 1 ? 1 : -1;
  }

  /// Tonelli-Shanks. Returns the root r with r <= p - r, or nullopt.
  std::optional<u64> sqrt(u64 x) const {
    x %= p_;
    if (x == 0) return 0;
    if (p_ == 2) return x;
    if (legendre(x) != 1) return std::nullopt;
    u64 q = p_ - 1;
    int s = 0;
    while ((q & 1) == 0) {
      q >>= 1;
      ++s;
    }
    u64 z = nonresidue_;
    u64 m = static_cast<u64>(s);
    u64 c = pow(z, q);
    u64 t = pow(x, q);
    u64 r = pow(x, (q + 1) / 2);
    while (t != 1) {
      u64 i = 0;
      u64 tt = t;
      while (tt != 1) {
        tt = mul(tt, tt);
        ++i;
      }
      u64 b = c;
      for (u64 j = 0; j + 1 < m - i; ++j) b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      r = mul(r, b);
    }
    return std::min(r, p_ - r);
  }

  // ---- F_{p^2} ----
  Fp2 embed(u64 x) const { return Fp2{x % p_}; }
  Fp2 add(const Fp2& x, const Fp2& y) const { return {add(x.a, y.a), add(x.b, y.b)}; }
  Fp2 sub(const Fp2& x, const Fp2& y) const { return {sub(x.a, y.a), sub(x.b, y.b)}; }
  Fp2 neg(const Fp2& x) const { return {neg(x.a), neg(x.b)}; }
  Fp2 mul(const Fp2& x, const Fp2& y) const {
    // (a + bw)(c + dw) = (ac + bd*d0) + (ad + bc)w
    u64 re = add(mul(x.a, y.a), mul(mul(x.b, y.b), nonresidue_));
    u64 im = add(mul(x.a, y.b), mul(x.b, y.a));
    return {re, im};
  }
  Fp2 pow(Fp2 x, u64 e) const {
    Fp2 r{1 % p_};
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }
  u64 norm(const Fp2& x) const {
    return sub(mul(x.a, x.a), mul(mul(x.b, x.b), nonresidue_));
  }
  Fp2 conj(const Fp2& x) const { return {x.a, neg(x.b)}; }
  Fp2 inv(const Fp2& x) const {
    if (x.is_zero()) throw FieldError("inverse of zero");
    u64 n_inv = inv(norm(x));
    Fp2 c = conj(x);
    return {mul(c.a, n_inv), mul(c.b, n_inv)};
  }
  Fp2 div(const Fp2& x, const Fp2& y) const { return mul(x, inv(y)); }

  /// Order of the multiplicative group containing x: p-1 for embedded F_p
  /// elements, p^2-1 otherwise.
  u64 group_order(const Fp2& x) const {
    return x.in_base_field() ? p_ - 1 : (p_ - 1) * (p_ + 1);
  }

  /// Distinct prime factors of p^2 - 1 (or p - 1), factored piecewise.
  std::vector<u64> group_order_factors(bool base_field) const {
    std::vector<u64> f = prime_factors(p_ - 1);
    if (!base_field) {
      for (u64 q : prime_factors(p_ + 1)) f.push_back(q);
      std::sort(f.begin(), f.end());
      f.erase(std::unique(f.begin(), f.end()), f.end());
    }
    return f;
  }

 private:
  u64 p_;
  u64 nonresidue_ = 0;
};

inline int legendre(u64 x, const FieldCtx& ctx) { return ctx.legendre(x); }

inline std::optional<u64> sqrt_mod(u64 x, const FieldCtx& ctx) { return ctx.sqrt(x); }

/// Roots of t^2 - b t + c. first = (b + s)/2, second = (b - s)/2 where s is the
/// canonical square root of the discriminant (s = r*w when it is a non-residue).
inline QuadraticRoots quadratic_roots(u64 b, u64 c, const FieldCtx& ctx) {
  if (ctx.p() == 2) throw FieldError("quadratic_roots requires odd p");
  b %= ctx.p();
  c %= ctx.p();
  const u64 disc = ctx.sub(ctx.mul(b, b), ctx.mul(4 % ctx.p(), c));
  const u64 half = ctx.inv(2);
  Fp2 s;
  if (auto r = ctx.sqrt(disc)) {
    s = Fp2{*r};
  } else {
    // disc = d * t^2, so sqrt(disc) = t * w.
    auto t = ctx.sqrt(ctx.div(disc, ctx.nonresidue()));
    s = Fp2{0, *t};
  }
  const Fp2 hb{ctx.mul(b, half)};
  const Fp2 hs{ctx.mul(s.a, half), ctx.mul(s.b, half)};
  return {ctx.add(hb, hs), ctx.sub(hb, hs), disc == 0};
}

/// Smallest t >= 1 with x^t = 1.
inline u64 mul_order(const Fp2& x, const FieldCtx& ctx) {
  if (x.is_zero()) throw FieldError("order of zero undefined");
  u64 order = ctx.group_order(x);
  for (u64 q : ctx.group_order_factors(x.in_base_field())) {
    while (order % q == 0 && ctx.pow(x, order / q) == Fp2{1}) order /= q;
  }
  return order;
}

inline u64 primitive_root(const FieldCtx& ctx) {
  const u64 p = ctx.p();
  if (p == 2) return 1;
  const auto factors = prime_factors(p - 1);
  for (u64 g = 2;; ++g) {
    bool ok = std::all_of(factors.begin(), factors.end(),
                          [&](u64 q) { return ctx.pow(g, (p - 1) / q) != 1; });
    if (ok) return g;
  }
}

/// All x in F_p^* with x^k = 1, ascending.
inline std::vector<u64> kth_roots_of_unity(u64 k, const FieldCtx& ctx) {
  if (k == 0) throw FieldError("k must be positive");
  const u64 p = ctx.p();
  const u64 d = std::gcd(k, p - 1);
  const u64 step = ctx.pow(primitive_root(ctx), (p - 1) / d);
  std::vector<u64> out;
  out.reserve(d);
  u64 cur = 1;
  for (u64 i = 0; i < d; ++i) {
    out.push_back(cur);
    cur = ctx.mul(cur, step);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Subgroup {
  Fp2 generator;
  std::vector<Fp2> elements;  // generator^0, generator^1, ...

  std::size_t order() const { return elements.size(); }
  bool in_base_field() const {
    return std::all_of(elements.begin(), elements.end(),
                       [](const Fp2& e) { return e.in_base_field(); });
  }
  /// Linear scan; callers that probe often should build their own index.
  bool contains(const Fp2& x) const {
    return std::find(elements.begin(), elements.end(), x) != elements.end();
  }
};

inline Subgroup subgroup_generated(const Fp2& x, const FieldCtx& ctx,
                                   std::size_t cap = kDefaultSubgroupCap) {
  if (x.is_zero()) throw FieldError("order of zero undefined");
  const u64 order = mul_order(x, ctx);
  if (order > cap) {
    throw FieldError("subgroup order " + std::to_string(order) + " exceeds cap " +
                     std::to_string(cap));
  }
  Subgroup g{x, {}};
  g.elements.reserve(order);
  Fp2 cur{1};
  for (u64 i = 0; i < order; ++i) {
    g.elements.push_back(cur);
    cur = ctx.mul(cur, x);
  }
  return g;
}

/// The unique subgroup of F_p^* of the given order (order must divide p - 1).
inline Subgroup subgroup_of_order(u64 order, const FieldCtx& ctx) {
  const u64 p = ctx.p();
  if (order == 0 || (p - 1) % order != 0) {
    throw FieldError("order " + std::to_string(order) + " does not divide p - 1");
  }
  return subgroup_generated(Fp2{ctx.pow(primitive_root(ctx), (p - 1) / order)}, ctx);
}

}  // namespace markoff_lab::ff
