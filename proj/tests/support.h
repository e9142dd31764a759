#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hnn/checks.h"
#include "hnn/engine.h"
#include "hnn/expression.h"
#include "hnn/group.h"
#include "hnn/matrix.h"
#include "hnn/scenario_config.h"
#include "hnn/torus.h"

namespace hnn::test {

inline std::string scenario_path(const std::string& name) { return std::string(HNN_SCENARIO_DIR) + "/" + name; }

inline ScenarioPtr load(const std::string& name, std::uint64_t seed = 0) {
  LoadOptions o;
  o.seed = seed;
  return load_scenario_file(scenario_path(name), o);
}

inline HnnElement ex(const ScenarioPtr& s, const std::string& src) { return evaluate(src, s); }

inline long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of +-1 strings of length 2k with zero sum, by enumeration.
inline long long balanced_strings(int len) {
  long long count = 0;
  for (unsigned long mask = 0; mask < (1ul << len); ++mask) {
    if (2 * __builtin_popcountl(mask) == len) ++count;
  }
  return count;
}

// Orthogonal projection onto span(basis) for <x, y> = phi(x* y), by Gram-Schmidt
// on coefficient vectors. Independent of the library's projection code.
inline AlgebraElement gram_schmidt_projection(const std::vector<AlgebraElement>& basis, const State& phi,
                                              const AlgebraElement& x) {
  auto inner = [&](const AlgebraElement& a, const AlgebraElement& b) { return phi.evaluate(adjoint(a) * b); };
  std::vector<AlgebraElement> ortho;
  for (const auto& b : basis) {
    AlgebraElement v = b;
    for (const auto& q : ortho) v = v - inner(q, v) * q;
    const double n = std::sqrt(inner(v, v).real());
    if (n > 1e-12) ortho.push_back(Complex(1.0 / n) * v);
  }
  AlgebraElement out = AlgebraElement::zero(x.backend_ptr());
  for (const auto& q : ortho) out = out + inner(q, x) * q;
  return out;
}

// Exact rationals for the affine representation a: x -> x + 1, t: x -> (n/m) x.
struct Rational {
  long long p = 0, q = 1;
  static long long gcd(long long a, long long b) { return b == 0 ? (a < 0 ? -a : a) : gcd(b, a % b); }
  Rational(long long p_ = 0, long long q_ = 1) : p(p_), q(q_) {
    if (q < 0) p = -p, q = -q;
    const long long g = gcd(p, q);
    if (g > 1) p /= g, q /= g;
  }
  friend Rational operator+(Rational a, Rational b) { return {a.p * b.q + b.p * a.q, a.q * b.q}; }
  friend Rational operator*(Rational a, Rational b) { return {a.p * b.p, a.q * b.q}; }
  friend bool operator==(Rational a, Rational b) { return a.p == b.p && a.q == b.q; }
};

// Word acting as x -> slope * x + shift; letters compose left to right as functions g1 o g2 o ...
struct Affine {
  Rational slope{1}, shift{0};
  friend bool operator==(const Affine&, const Affine&) = default;
};

inline Affine affine_image(int m, int n, const GroupWord& w) {
  Affine f;
  for (int code : w) {
    Affine g;
    if (code == 1) g = {Rational(1), Rational(1)};
    if (code == -1) g = {Rational(1), Rational(-1)};
    if (code == 2) g = {Rational(n, m), Rational(0)};
    if (code == -2) g = {Rational(m, n), Rational(0)};
    // f o g
    f = {f.slope * g.slope, f.slope * g.shift + f.shift};
  }
  return f;
}

// Random element of the base algebra built from backend-level random terms.
inline AlgebraElement random_base(const ScenarioPtr& s, Rng& rng) { return AlgebraElement::random(s->base(), rng); }

}  // namespace hnn::test
