#include "hnn/torus.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hnn {

RotationAngle RotationAngle::rational(long p, long q) {
  if (q <= 0) throw DomainError("rotation angle denominator must be positive");
  const long g = std::gcd(p, q);
  RotationAngle a;
  a.rational_ = std::make_pair(p / g, q / g);
  a.value_ = static_cast<double>(p) / static_cast<double>(q);
  return a;
}

RotationAngle RotationAngle::real(double alpha) {
  RotationAngle a;
  a.value_ = alpha;
  return a;
}

std::string RotationAngle::describe() const {
  if (rational_) return std::to_string(rational_->first) + "/" + std::to_string(rational_->second);
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

Complex RotationAngle::phase(long k) const {
  if (rational_) {
    const auto [p, q] = *rational_;
    // Residue r of p*k mod q; cos/sin of 2 pi r / q.
    const long r = (((p % q) * (k % q)) % q + q) % q;
    if (r == 0) return 1.0;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
    return {std::cos(angle), std::sin(angle)};
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * value_ * static_cast<double>(k));
}

Terms RotationAlgebra::basis_product(const Basis& a, const Basis& b) const {
  return {{Basis{a[0] + b[0], a[1] + b[1]}, alpha_.phase(-static_cast<long>(a[1]) * b[0])}};
}

std::pair<Basis, Complex> RotationAlgebra::basis_adjoint(const Basis& b) const {
  // (u^n v^m)* = v^-m u^-n = e^{-2 pi i alpha m n} u^-n v^-m
  return {Basis{-b[0], -b[1]}, alpha_.phase(-static_cast<long>(b[0]) * b[1])};
}

std::string RotationAlgebra::format_basis(const Basis& b) const {
  if (b[0] == 0 && b[1] == 0) return "1";
  std::string s;
  if (b[0] != 0) s += b[0] == 1 ? "u" : "u^" + std::to_string(b[0]);
  if (b[1] != 0) {
    if (!s.empty()) s += "*";
    s += b[1] == 1 ? "v" : "v^" + std::to_string(b[1]);
  }
  return s;
}

std::vector<Basis> RotationAlgebra::probe_basis() const {
  std::vector<Basis> out;
  for (int n = -4; n <= 4; ++n) {
    for (int m = -4; m <= 4; ++m) out.push_back({n, m});
  }
  return out;
}

Terms RotationAlgebra::random_terms(Rng& rng) const {
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_int_distribution<int> exp(-2, 2);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Terms out;
  const int k = nterms(rng);
  for (int i = 0; i < k; ++i) {
    Basis b{exp(rng), exp(rng)};
    out[b] += Complex(coef(rng), coef(rng));
  }
  return out;
}

Complex RotationAlgebra::power_phase(long a, long b, long k) const {
  return alpha_.phase(-a * b * (k * (k - 1) / 2));
}

State torus_trace_state() {
  return State::from_basis("tau_alpha", [](const Basis& b) {
    return b[0] == 0 && b[1] == 0 ? Complex(1.0) : Complex(0.0);
  });
}

namespace {

// k with (n, m) = k (a, b), if any.
std::optional<long> multiple_of(const Basis& nm, long a, long b) {
  const long n = nm[0];
  const long m = nm[1];
  if (n * b != m * a) return std::nullopt;
  if (a != 0) {
    if (n % a != 0) return std::nullopt;
    return n / a;
  }
  if (m % b != 0) return std::nullopt;
  return m / b;
}

}  // namespace

ConditionalExpectation monomial_expectation(long a, long b) {
  if (a == 0 && b == 0) throw DomainError("monomial generator must be nontrivial");
  RotationAlgebra fmt(RotationAngle::real(0.0));
  const std::string gen = fmt.format_basis({static_cast<int>(a), static_cast<int>(b)});
  return ConditionalExpectation::from_basis_filter("E_<" + gen + ">", "C*(" + gen + ")",
                                                   [a, b](const Basis& nm) { return multiple_of(nm, a, b).has_value(); });
}

Embedding monomial_embedding(std::shared_ptr<const RotationAlgebra> algebra, Basis from, Basis to,
                             std::string name) {
  if ((from[0] == 0 && from[1] == 0) || (to[0] == 0 && to[1] == 0)) {
    throw DomainError("monomial embedding needs nontrivial generators");
  }
  BackendPtr backend = algebra;
  // u^{ka} v^{kb} = phase_k(a,b)^{-1} (u^a v^b)^k  ->  phase_k(a,b)^{-1} phase_k(c,d) u^{kc} v^{kd}
  auto make = [algebra, backend](Basis src, Basis dst) {
    return [algebra, backend, src, dst](const Basis& nm) {
      auto k = multiple_of(nm, src[0], src[1]);
      if (!k) throw DomainError("element outside the domain of the monomial map");
      const Complex c = algebra->power_phase(dst[0], dst[1], *k) / algebra->power_phase(src[0], src[1], *k);
      return AlgebraElement::basis(backend, {static_cast<int>(*k * dst[0]), static_cast<int>(*k * dst[1])}, c);
    };
  };
  return Embedding::from_basis_maps(std::move(name), backend, make(from, to), make(to, from));
}

}  // namespace hnn
