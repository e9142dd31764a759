#pragma once

// Rotation algebra: polynomials in unitaries u, v with u v = e^{2 pi i alpha} v u.
// Basis symbol (n, m) stands for the monomial u^n v^m, so
//   (n1, m1) . (n2, m2) = e^{-2 pi i alpha m1 n2} (n1 + n2, m1 + m2).

#include <optional>
#include <string>
#include <utility>

#include "hnn/algebra.h"

namespace hnn {

class RotationAngle {
 public:
  // alpha = p / q, phases computed from the residue of the integer multiplier mod q.
  static RotationAngle rational(long p, long q);
  static RotationAngle real(double alpha);

  bool is_rational() const { return rational_.has_value(); }
  double value() const { return value_; }
  std::string describe() const;
  // e^{2 pi i alpha k}
  Complex phase(long k) const;

 private:
  std::optional<std::pair<long, long>> rational_;
  double value_ = 0.0;
};

class RotationAlgebra : public Backend {
 public:
  explicit RotationAlgebra(RotationAngle alpha) : alpha_(alpha) {}

  const RotationAngle& alpha() const { return alpha_; }

  std::string id() const override { return "torus:alpha=" + alpha_.describe(); }
  double zero_threshold() const override { return 1e-12; }
  Terms identity() const override { return {{Basis{0, 0}, 1.0}}; }
  Terms basis_product(const Basis& a, const Basis& b) const override;
  std::pair<Basis, Complex> basis_adjoint(const Basis& b) const override;
  std::string format_basis(const Basis& b) const override;
  std::vector<std::pair<std::string, Basis>> default_bindings() const override {
    return {{"u", {1, 0}}, {"v", {0, 1}}};
  }
  std::vector<Basis> probe_basis() const override;
  Terms random_terms(Rng& rng) const override;

  // (u^a v^b)^k = phase * u^{ka} v^{kb}; returns the phase.
  Complex power_phase(long a, long b, long k) const;

 private:
  RotationAngle alpha_;
};

// tau(u^n v^m) = [n == 0 && m == 0]
State torus_trace_state();

// Trace-preserving expectation onto the subalgebra generated by u^a v^b.
ConditionalExpectation monomial_expectation(long a, long b);

// theta: (u^a v^b)^k -> (u^c v^d)^k on the subalgebra generated by u^a v^b.
Embedding monomial_embedding(std::shared_ptr<const RotationAlgebra> algebra, Basis from, Basis to,
                             std::string name);

}  // namespace hnn
