#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>

#include "support.h"

using namespace hnn;
using namespace hnn::test;

namespace {

std::shared_ptr<const RotationAlgebra> rational_torus(long p, long q) {
  return std::make_shared<const RotationAlgebra>(RotationAngle::rational(p, q));
}

// Clock and shift matrices: U e_k = w^k e_k, V e_k = e_{k+1}, w = e^{2 pi i p/q}, so U V = w V U.
Eigen::MatrixXcd represent(const AlgebraElement& x, long p, int q) {
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) / q);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(q, q);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(q, q);
  for (int k = 0; k < q; ++k) {
    u(k, k) = std::pow(w, k);
    v((k + 1) % q, k) = 1.0;
  }
  auto power = [](const Eigen::MatrixXcd& m, int e) {
    Eigen::MatrixXcd base = e < 0 ? Eigen::MatrixXcd(m.adjoint()) : m;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    for (int i = 0; i < std::abs(e); ++i) out = out * base;
    return out;
  };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
  for (const auto& [b, c] : x.terms()) out += c * power(u, b[0]) * power(v, b[1]);
  return out;
}

}  // namespace

TEST(Torus, CommutationPhase) {
  auto t = rational_torus(1, 7);
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);
  const AlgebraElement u = AlgebraElement::basis(t, {1, 0});
  const AlgebraElement v = AlgebraElement::basis(t, {0, 1});
  EXPECT_TRUE(approx_equal(v * u, std::conj(w) * (u * v), 1e-14));
  EXPECT_TRUE(approx_equal(u * v, w * (v * u), 1e-14));
}

TEST(Torus, UnitaryGenerators) {
  auto t = rational_torus(2, 5);
  for (const Basis& b : {Basis{1, 0}, Basis{0, 1}, Basis{2, -3}}) {
    const AlgebraElement x = AlgebraElement::basis(t, b);
    EXPECT_TRUE(approx_equal(x * adjoint(x), AlgebraElement::one(t), 1e-14));
    EXPECT_TRUE(approx_equal(adjoint(x) * x, AlgebraElement::one(t), 1e-14));
  }
}

TEST(Torus, MatchesClockShiftRepresentation) {
  auto t = rational_torus(1, 7);
  const AlgebraElement uv = AlgebraElement::basis(t, {1, 1});
  EXPECT_TRUE((represent(uv * uv, 1, 7) - represent(uv, 1, 7) * represent(uv, 1, 7)).norm() < 1e-12);
  Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    const AlgebraElement x = AlgebraElement::random(t, rng);
    const AlgebraElement y = AlgebraElement::random(t, rng);
    EXPECT_LT((represent(x * y, 1, 7) - represent(x, 1, 7) * represent(y, 1, 7)).norm(), 1e-12);
    EXPECT_LT((represent(adjoint(x), 1, 7) - represent(x, 1, 7).adjoint()).norm(), 1e-12);
  }
}

TEST(Torus, TraceMatchesNormalizedMatrixTrace) {
  auto t = rational_torus(3, 7);
  const State tau = torus_trace_state();
  for (int n = -3; n <= 3; ++n) {
    for (int m = -3; m <= 3; ++m) {
      const AlgebraElement x = AlgebraElement::basis(t, {n, m});
      const Complex oracle = represent(x, 3, 7).trace() / 7.0;
      EXPECT_NEAR(std::abs(tau.evaluate(x) - oracle), 0.0, 1e-12);
    }
  }
}

TEST(Torus, RationalPhasesAreExactRootsOfUnity) {
  const RotationAngle a = RotationAngle::rational(1, 7);
  EXPECT_EQ(a.phase(7), Complex(1.0));
  EXPECT_EQ(a.phase(-14), Complex(1.0));
  EXPECT_EQ(a.phase(3), a.phase(10));
  EXPECT_EQ(a.describe(), "1/7");
  EXPECT_THROW(RotationAngle::rational(1, 0), DomainError);
}

TEST(Torus, IrrationalAlgebraProperties) {
  auto t = std::make_shared<const RotationAlgebra>(RotationAngle::real(std::numbers::sqrt2 - 1.0));
  const State tau = torus_trace_state();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    for (int i = 0; i < 30; ++i) {
      const AlgebraElement x = AlgebraElement::random(t, rng);
      const AlgebraElement y = AlgebraElement::random(t, rng);
      const AlgebraElement z = AlgebraElement::random(t, rng);
      ASSERT_TRUE(approx_equal((x * y) * z, x * (y * z), 1e-12));
      ASSERT_TRUE(approx_equal(adjoint(x * y), adjoint(y) * adjoint(x), 1e-12));
      ASSERT_NEAR(std::abs(tau.evaluate(x * y) - tau.evaluate(y * x)), 0.0, 1e-12);
      ASSERT_GE(tau.evaluate(adjoint(x) * x).real(), -1e-12);
    }
  }
}

TEST(Torus, PowerPhase) {
  auto t = rational_torus(1, 7);
  const AlgebraElement uv = AlgebraElement::basis(t, {1, 1});
  AlgebraElement p = AlgebraElement::one(t);
  for (int k = 1; k <= 9; ++k) {
    p = p * uv;
    EXPECT_TRUE(approx_equal(p, AlgebraElement::basis(t, {k, k}, t->power_phase(1, 1, k)), 1e-12)) << k;
  }
}

TEST(Torus, MonomialExpectationAndEmbedding) {
  auto t = rational_torus(1, 7);
  const auto e = monomial_expectation(1, 0);
  const AlgebraElement x = AlgebraElement::basis(t, {2, 0}) + AlgebraElement::basis(t, {1, 1});
  EXPECT_EQ(e.apply(x), AlgebraElement::basis(t, {2, 0}));
  std::vector<AlgebraElement> basis;
  for (int k = -4; k <= 4; ++k) basis.push_back(AlgebraElement::basis(t, {k, 0}));
  EXPECT_TRUE(approx_equal(e.apply(x), gram_schmidt_projection(basis, torus_trace_state(), x), 1e-12));

  const Embedding theta = monomial_embedding(t, {1, 0}, {1, 1}, "theta");
  const AlgebraElement u = AlgebraElement::basis(t, {1, 0});
  const AlgebraElement uv = AlgebraElement::basis(t, {1, 1});
  EXPECT_TRUE(approx_equal(theta.apply(u * u * u), uv * uv * uv, 1e-12));
  EXPECT_TRUE(approx_equal(theta.apply_inverse(theta.apply(u * u)), u * u, 1e-12));
  EXPECT_THROW(theta.apply(AlgebraElement::basis(t, {0, 1})), DomainError);
}

TEST(Torus, Format) {
  auto t = rational_torus(1, 7);
  EXPECT_EQ(t->format_basis({0, 0}), "1");
  EXPECT_EQ(t->format_basis({1, 1}), "u*v");
  EXPECT_EQ(t->format_basis({-2, 3}), "u^-2*v^3");
}
