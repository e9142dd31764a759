#pragma once

// Base-algebra contract: unital *-algebras whose elements are finite linear
// combinations of totally ordered basis symbols, plus the structure maps
// (embeddings, conditional expectations, states) an HNN datum is built from.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hnn/error.h"

namespace hnn {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

// Backend-specific basis symbol. Group backends store a normal-form letter
// string, the torus stores (n, m), the matrix backend stores (block, i, j).
using Basis = std::vector<int>;
using Terms = std::map<Basis, Complex>;

class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string id() const = 0;
  // Coefficients with magnitude at or below this are dropped. Zero for exact backends.
  virtual double zero_threshold() const = 0;
  virtual bool is_exact() const { return zero_threshold() == 0.0; }

  virtual Terms identity() const = 0;
  virtual Terms basis_product(const Basis& a, const Basis& b) const = 0;
  // (basis symbol, scalar) with b* = scalar * symbol.
  virtual std::pair<Basis, Complex> basis_adjoint(const Basis& b) const = 0;

  // Bilinear extension of basis_product. Backends with a faster dense
  // representation override this.
  virtual Terms multiply(const Terms& a, const Terms& b) const;

  // Text form of a basis symbol that the expression parser reads back.
  virtual std::string format_basis(const Basis& b) const = 0;
  // Identifier bindings the expression language gets for free (generators, matrix units).
  virtual std::vector<std::pair<std::string, Basis>> default_bindings() const = 0;

  // Finite set of basis symbols used by sampled checks.
  virtual std::vector<Basis> probe_basis() const = 0;
  virtual Terms random_terms(Rng& rng) const = 0;
};

using BackendPtr = std::shared_ptr<const Backend>;

class AlgebraElement {
 public:
  AlgebraElement(BackendPtr backend, Terms terms = {});

  static AlgebraElement zero(BackendPtr backend) { return AlgebraElement(std::move(backend)); }
  static AlgebraElement one(BackendPtr backend);
  static AlgebraElement basis(BackendPtr backend, Basis b, Complex c = 1.0);
  static AlgebraElement scalar(BackendPtr backend, Complex c);
  static AlgebraElement random(BackendPtr backend, Rng& rng);

  const Backend& backend() const { return *backend_; }
  const BackendPtr& backend_ptr() const { return backend_; }
  const Terms& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  Complex coefficient(const Basis& b) const;
  // Largest coefficient magnitude; 0 for the zero element.
  double max_abs() const;

  AlgebraElement operator-() const;
  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex c);

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    return a.backend_ == b.backend_ && a.terms_ == b.terms_;
  }

 private:
  void prune();

  BackendPtr backend_;
  Terms terms_;
};

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement adjoint(const AlgebraElement& a);
AlgebraElement scale(Complex c, const AlgebraElement& a);

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) { return add(a, b); }
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return add(a, -b); }
inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) { return multiply(a, b); }
inline AlgebraElement operator*(Complex c, const AlgebraElement& a) { return scale(c, a); }

// max |a_b - b_b| over all basis symbols.
double distance(const AlgebraElement& a, const AlgebraElement& b);
bool approx_equal(const AlgebraElement& a, const AlgebraElement& b, double tol);

// Readable and re-parseable: "(2*a^3 + (0.5-1i)*a^-1)".
std::string to_string(const AlgebraElement& a);

// Applies a basis-level map and extends it linearly.
AlgebraElement map_linearly(const AlgebraElement& x, BackendPtr target,
                            const std::function<AlgebraElement(const Basis&)>& on_basis);

using ElementMap = std::function<AlgebraElement(const AlgebraElement&)>;

// A unital injective *-homomorphism defined on a subalgebra of its source and
// its inverse on the image.
class Embedding {
 public:
  Embedding(std::string name, ElementMap forward, ElementMap inverse)
      : name_(std::move(name)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

  static Embedding from_basis_maps(std::string name, BackendPtr backend,
                                   std::function<AlgebraElement(const Basis&)> forward,
                                   std::function<AlgebraElement(const Basis&)> inverse);
  static Embedding identity(std::string name);

  const std::string& name() const { return name_; }
  AlgebraElement apply(const AlgebraElement& x) const { return forward_(x); }
  AlgebraElement apply_inverse(const AlgebraElement& x) const { return inverse_(x); }

 private:
  std::string name_;
  ElementMap forward_;
  ElementMap inverse_;
};

class ConditionalExpectation {
 public:
  ConditionalExpectation(std::string name, std::string range, ElementMap action)
      : name_(std::move(name)), range_(std::move(range)), action_(std::move(action)) {}

  // Kills every basis symbol outside the range predicate, keeps the rest.
  static ConditionalExpectation from_basis_filter(std::string name, std::string range,
                                                  std::function<bool(const Basis&)> in_range);

  const std::string& name() const { return name_; }
  const std::string& range() const { return range_; }
  AlgebraElement apply(const AlgebraElement& x) const { return action_(x); }

 private:
  std::string name_;
  std::string range_;
  ElementMap action_;
};

AlgebraElement ce_apply(const ConditionalExpectation& e, const AlgebraElement& x);
// x - E(x)
AlgebraElement kernel_part(const ConditionalExpectation& e, const AlgebraElement& x);

class State {
 public:
  using Functional = std::function<Complex(const AlgebraElement&)>;

  State(std::string name, Functional action) : name_(std::move(name)), action_(std::move(action)) {}

  // Linear extension of a basis-level functional.
  static State from_basis(std::string name, std::function<Complex(const Basis&)> on_basis);

  const std::string& name() const { return name_; }
  Complex evaluate(const AlgebraElement& x) const { return action_(x); }

 private:
  std::string name_;
  Functional action_;
};

Complex state_eval(const State& phi, const AlgebraElement& x);

struct ValidationReport {
  std::string subject;
  std::size_t samples = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

using Sampler = std::function<AlgebraElement(Rng&)>;

// Idempotence, unitality, bimodule law over the range, and positivity of
// the given states composed with E, on `samples` random draws.
ValidationReport validate_expectation(const ConditionalExpectation& e, BackendPtr backend,
                                      const std::vector<State>& range_states, std::size_t samples,
                                      double tol, std::uint64_t seed);

// Unitality, multiplicativity, *-preservation and injectivity (inverse after
// forward) on elements drawn from `domain_sampler`.
ValidationReport validate_embedding(const Embedding& theta, BackendPtr backend,
                                    const Sampler& domain_sampler, std::size_t samples, double tol,
                                    std::uint64_t seed);

// phi(1) = 1 and phi(x* x) >= -tol with negligible imaginary part.
ValidationReport validate_state(const State& phi, BackendPtr backend, const Sampler& sampler,
                                std::size_t samples, double tol, std::uint64_t seed);

std::string format_complex(Complex c);
// Parenthesized scalar literal the expression parser reads back exactly.
std::string format_scalar_literal(Complex c);

}  // namespace hnn
