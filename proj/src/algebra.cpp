#include "hnn/algebra.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace hnn {

Terms Backend::multiply(const Terms& a, const Terms& b) const {
  Terms out;
  for (const auto& [ba, ca] : a) {
    for (const auto& [bb, cb] : b) {
      for (const auto& [bc, cc] : basis_product(ba, bb)) out[bc] += ca * cb * cc;
    }
  }
  return out;
}

AlgebraElement::AlgebraElement(BackendPtr backend, Terms terms)
    : backend_(std::move(backend)), terms_(std::move(terms)) {
  if (!backend_) throw Error("algebra element without a backend");
  prune();
}

AlgebraElement AlgebraElement::one(BackendPtr backend) {
  Terms t = backend->identity();
  return AlgebraElement(std::move(backend), std::move(t));
}

AlgebraElement AlgebraElement::basis(BackendPtr backend, Basis b, Complex c) {
  Terms t;
  t.emplace(std::move(b), c);
  return AlgebraElement(std::move(backend), std::move(t));
}

AlgebraElement AlgebraElement::scalar(BackendPtr backend, Complex c) {
  return scale(c, one(std::move(backend)));
}

AlgebraElement AlgebraElement::random(BackendPtr backend, Rng& rng) {
  Terms t = backend->random_terms(rng);
  return AlgebraElement(std::move(backend), std::move(t));
}

Complex AlgebraElement::coefficient(const Basis& b) const {
  auto it = terms_.find(b);
  return it == terms_.end() ? Complex{} : it->second;
}

double AlgebraElement::max_abs() const {
  double m = 0.0;
  for (const auto& [b, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void AlgebraElement::prune() {
  const double threshold = backend_->zero_threshold();
  std::erase_if(terms_, [threshold](const auto& kv) { return std::abs(kv.second) <= threshold; });
  if (threshold == 0.0) return;
  for (auto& [b, c] : terms_) {
    if (std::abs(c.real()) <= threshold) c.real(0.0);
    if (std::abs(c.imag()) <= threshold) c.imag(0.0);
  }
}

AlgebraElement AlgebraElement::operator-() const {
  AlgebraElement out = *this;
  for (auto& [b, c] : out.terms_) c = -c;
  return out;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  if (backend_ != other.backend_) {
    throw BackendMismatch("cannot add elements of " + backend_->id() + " and " + other.backend_->id());
  }
  for (const auto& [b, c] : other.terms_) terms_[b] += c;
  prune();
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) { return *this += -other; }

AlgebraElement& AlgebraElement::operator*=(Complex c) {
  for (auto& [b, v] : terms_) v *= c;
  prune();
  return *this;
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out = a;
  out += b;
  return out;
}

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.backend_ptr() != b.backend_ptr()) {
    throw BackendMismatch("cannot multiply elements of " + a.backend().id() + " and " + b.backend().id());
  }
  return AlgebraElement(a.backend_ptr(), a.backend().multiply(a.terms(), b.terms()));
}

AlgebraElement adjoint(const AlgebraElement& a) {
  Terms out;
  for (const auto& [b, c] : a.terms()) {
    auto [bs, s] = a.backend().basis_adjoint(b);
    out[bs] += std::conj(c) * s;
  }
  return AlgebraElement(a.backend_ptr(), std::move(out));
}

AlgebraElement scale(Complex c, const AlgebraElement& a) {
  AlgebraElement out = a;
  out *= c;
  return out;
}

double distance(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.backend_ptr() != b.backend_ptr()) throw BackendMismatch("distance across backends");
  double d = 0.0;
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && ia->first < ib->first)) {
      d = std::max(d, std::abs(ia->second));
      ++ia;
    } else if (ia == a.terms().end() || ib->first < ia->first) {
      d = std::max(d, std::abs(ib->second));
      ++ib;
    } else {
      d = std::max(d, std::abs(ia->second - ib->second));
      ++ia;
      ++ib;
    }
  }
  return d;
}

bool approx_equal(const AlgebraElement& a, const AlgebraElement& b, double tol) {
  return distance(a, b) <= tol;
}

namespace {

std::string shortest(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_one(Complex c) { return c == Complex(1.0, 0.0); }

}  // namespace

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return shortest(c.real());
  if (c.real() == 0.0) return shortest(c.imag()) + "i";
  std::string im = shortest(c.imag());
  if (im.front() != '-') im = "+" + im;
  return shortest(c.real()) + im + "i";
}

std::string format_scalar_literal(Complex c) {
  if (c.imag() == 0.0 && c.real() >= 0.0) return shortest(c.real());
  return "(" + format_complex(c) + ")";
}

std::string to_string(const AlgebraElement& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [b, c] : a.terms()) {
    if (!first) os << " + ";
    first = false;
    const std::string basis = a.backend().format_basis(b);
    if (basis == "1") {
      os << format_scalar_literal(c);
    } else if (is_one(c)) {
      os << basis;
    } else {
      os << format_scalar_literal(c) << "*" << basis;
    }
  }
  if (a.terms().size() == 1) return os.str();
  return "(" + os.str() + ")";
}

AlgebraElement map_linearly(const AlgebraElement& x, BackendPtr target,
                            const std::function<AlgebraElement(const Basis&)>& on_basis) {
  AlgebraElement out = AlgebraElement::zero(std::move(target));
  for (const auto& [b, c] : x.terms()) out += scale(c, on_basis(b));
  return out;
}

Embedding Embedding::from_basis_maps(std::string name, BackendPtr backend,
                                     std::function<AlgebraElement(const Basis&)> forward,
                                     std::function<AlgebraElement(const Basis&)> inverse) {
  return Embedding(
      std::move(name),
      [backend, forward](const AlgebraElement& x) { return map_linearly(x, backend, forward); },
      [backend, inverse](const AlgebraElement& x) { return map_linearly(x, backend, inverse); });
}

Embedding Embedding::identity(std::string name) {
  auto id = [](const AlgebraElement& x) { return x; };
  return Embedding(std::move(name), id, id);
}

ConditionalExpectation ConditionalExpectation::from_basis_filter(
    std::string name, std::string range, std::function<bool(const Basis&)> in_range) {
  return ConditionalExpectation(std::move(name), std::move(range),
                                [in_range](const AlgebraElement& x) {
                                  Terms kept;
                                  for (const auto& [b, c] : x.terms()) {
                                    if (in_range(b)) kept.emplace(b, c);
                                  }
                                  return AlgebraElement(x.backend_ptr(), std::move(kept));
                                });
}

AlgebraElement ce_apply(const ConditionalExpectation& e, const AlgebraElement& x) { return e.apply(x); }

AlgebraElement kernel_part(const ConditionalExpectation& e, const AlgebraElement& x) {
  return x - e.apply(x);
}

State State::from_basis(std::string name, std::function<Complex(const Basis&)> on_basis) {
  return State(std::move(name), [on_basis](const AlgebraElement& x) {
    Complex sum{};
    for (const auto& [b, c] : x.terms()) sum += c * on_basis(b);
    return sum;
  });
}

Complex state_eval(const State& phi, const AlgebraElement& x) { return phi.evaluate(x); }

namespace {

std::string fmt_fail(const std::string& what, std::size_t sample, double err) {
  std::ostringstream os;
  os << what << " (sample " << sample << ", error " << err << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_expectation(const ConditionalExpectation& e, BackendPtr backend,
                                      const std::vector<State>& range_states, std::size_t samples,
                                      double tol, std::uint64_t seed) {
  ValidationReport report;
  report.subject = e.name();
  report.samples = samples;
  Rng rng(seed);

  const AlgebraElement one = AlgebraElement::one(backend);
  if (double err = distance(e.apply(one), one); err > tol) {
    report.failures.push_back(fmt_fail("E(1) != 1", 0, err));
  }
  for (std::size_t i = 0; i < samples && report.failures.size() < 8; ++i) {
    const AlgebraElement x = AlgebraElement::random(backend, rng);
    const AlgebraElement ex = e.apply(x);
    const double scale_x = std::max(1.0, x.max_abs());
    if (double err = distance(e.apply(ex), ex); err > tol * scale_x) {
      report.failures.push_back(fmt_fail("E(E(x)) != E(x)", i, err));
    }
    const AlgebraElement d1 = e.apply(AlgebraElement::random(backend, rng));
    const AlgebraElement d2 = e.apply(AlgebraElement::random(backend, rng));
    const AlgebraElement lhs = e.apply(d1 * x * d2);
    const AlgebraElement rhs = d1 * ex * d2;
    const double scale_b = std::max(1.0, std::max(lhs.max_abs(), rhs.max_abs()));
    if (double err = distance(lhs, rhs); err > tol * scale_b) {
      report.failures.push_back(fmt_fail("E(d x d') != d E(x) d'", i, err));
    }
    const AlgebraElement exx = e.apply(adjoint(x) * x);
    for (const State& phi : range_states) {
      const Complex v = phi.evaluate(exx);
      const double scale_p = std::max(1.0, std::abs(v));
      if (v.real() < -tol * scale_p || std::abs(v.imag()) > tol * scale_p) {
        report.failures.push_back(fmt_fail(phi.name() + "(E(x* x)) not >= 0", i, std::abs(v)));
      }
    }
  }
  return report;
}

ValidationReport validate_embedding(const Embedding& theta, BackendPtr backend,
                                    const Sampler& domain_sampler, std::size_t samples, double tol,
                                    std::uint64_t seed) {
  ValidationReport report;
  report.subject = theta.name();
  report.samples = samples;
  Rng rng(seed);

  const AlgebraElement one = AlgebraElement::one(backend);
  if (double err = distance(theta.apply(one), one); err > tol) {
    report.failures.push_back(fmt_fail("theta(1) != 1", 0, err));
  }
  for (std::size_t i = 0; i < samples && report.failures.size() < 8; ++i) {
    const AlgebraElement x = domain_sampler(rng);
    const AlgebraElement y = domain_sampler(rng);
    const AlgebraElement tx = theta.apply(x);
    const AlgebraElement ty = theta.apply(y);
    const AlgebraElement lhs = theta.apply(x * y);
    const AlgebraElement rhs = tx * ty;
    const double s = std::max(1.0, std::max(lhs.max_abs(), rhs.max_abs()));
    if (double err = distance(lhs, rhs); err > tol * s) {
      report.failures.push_back(fmt_fail("theta(xy) != theta(x)theta(y)", i, err));
    }
    if (double err = distance(theta.apply(adjoint(x)), adjoint(tx)); err > tol * std::max(1.0, x.max_abs())) {
      report.failures.push_back(fmt_fail("theta(x*) != theta(x)*", i, err));
    }
    if (double err = distance(theta.apply_inverse(tx), x); err > tol * std::max(1.0, x.max_abs())) {
      report.failures.push_back(fmt_fail("theta^-1(theta(x)) != x", i, err));
    }
  }
  return report;
}

ValidationReport validate_state(const State& phi, BackendPtr backend, const Sampler& sampler,
                                std::size_t samples, double tol, std::uint64_t seed) {
  ValidationReport report;
  report.subject = phi.name();
  report.samples = samples;
  Rng rng(seed);
  if (double err = std::abs(phi.evaluate(AlgebraElement::one(backend)) - 1.0); err > tol) {
    report.failures.push_back(fmt_fail("phi(1) != 1", 0, err));
  }
  for (std::size_t i = 0; i < samples && report.failures.size() < 8; ++i) {
    const AlgebraElement x = sampler(rng);
    const Complex v = phi.evaluate(adjoint(x) * x);
    const double s = std::max(1.0, std::abs(v));
    if (v.real() < -tol * s || std::abs(v.imag()) > tol * s) {
      report.failures.push_back(fmt_fail("phi(x* x) not >= 0", i, std::abs(v)));
    }
  }
  return report;
}

}  // namespace hnn
