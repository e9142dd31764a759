#include "hnn/engine.h"

#include <cmath>
#include <set>
#include <sstream>

#include "hnn/matrix.h"

namespace hnn {

namespace {

class MatrixModular : public ModularCalculus {
 public:
  MatrixModular(ModularData reference, std::vector<ModularData> transported)
      : reference_(std::move(reference)), transported_(std::move(transported)) {}

  AlgebraElement sigma(const AlgebraElement& n, double t) const override {
    return modular_auto(reference_, t, n);
  }
  AlgebraElement cocycle(std::size_t theta, double t) const override {
    return connes_cocycle(transported_.at(theta), reference_, t);
  }
  std::string describe() const override { return "matrix densities"; }

 private:
  ModularData reference_;                // density of phi o E_D
  std::vector<ModularData> transported_;  // densities of phi o theta^-1 o E_theta(D)
};

// phi o E_D and every phi o theta^-1 o E_theta(D) coincide with a trace, so
// the modular group is trivial and every cocycle is 1.
class TracialModular : public ModularCalculus {
 public:
  explicit TracialModular(BackendPtr base) : base_(std::move(base)) {}

  AlgebraElement sigma(const AlgebraElement& n, double) const override { return n; }
  AlgebraElement cocycle(std::size_t, double) const override { return AlgebraElement::one(base_); }
  std::string describe() const override { return "tracial"; }

 private:
  BackendPtr base_;
};

State compose(std::string name, const State& phi, const ElementMap& map) {
  return State(std::move(name), [phi, map](const AlgebraElement& x) { return phi.evaluate(map(x)); });
}

State transported_state(const Scenario& s, std::size_t i) {
  const ThetaData& th = s.theta(i);
  return compose("phi o " + th.name + "^-1 o E_" + th.name + "(D)", s.phi(),
                 [th](const AlgebraElement& x) { return th.map.apply_inverse(th.expectation.apply(x)); });
}

std::shared_ptr<const ModularCalculus> build_modular(const Scenario& s) {
  if (auto alg = std::dynamic_pointer_cast<const MultiMatrixAlgebra>(s.base())) {
    try {
      const State reference = compose("phi o E_D", s.phi(), [&s](const AlgebraElement& x) { return s.e_d().apply(x); });
      ModularData ref(DensityState::from_functional(alg, reference));
      std::vector<ModularData> transported;
      for (std::size_t i = 0; i < s.thetas().size(); ++i) {
        transported.emplace_back(DensityState::from_functional(alg, transported_state(s, i)));
      }
      return std::make_shared<MatrixModular>(std::move(ref), std::move(transported));
    } catch (const DomainError&) {
      return nullptr;  // composite states not faithful
    }
  }
  if (s.trace() && trace_preservation_failures(s).empty()) return std::make_shared<TracialModular>(s.base());
  return nullptr;
}

bool negligible(const Complex& v, double tol, double scale) { return std::abs(v) <= tol * std::max(1.0, scale); }

}  // namespace

ScenarioPtr Scenario::create(ScenarioParts parts) {
  if (!parts.base) throw ScenarioError("scenario without a base algebra");
  if (parts.thetas.empty()) throw ScenarioError("scenario needs at least one theta");
  auto s = std::shared_ptr<Scenario>(new Scenario(std::move(parts)));
  s->validate();
  s->modular_ = build_modular(*s);
  return s;
}

AlgebraElement Scenario::random_d(Rng& rng) const {
  std::vector<AlgebraElement> pool;
  for (const Basis& b : parts_.base->probe_basis()) {
    AlgebraElement d = parts_.e_d.apply(AlgebraElement::basis(parts_.base, b));
    if (!d.is_zero()) pool.push_back(std::move(d));
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  auto coefficient = [&]() {
    Complex c = parts_.base->is_exact() ? Complex(small(rng), small(rng)) : Complex(real(rng), real(rng));
    return c == Complex{} ? Complex(1.0) : c;
  };
  AlgebraElement out = AlgebraElement::scalar(parts_.base, coefficient());
  if (pool.empty()) return out;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) out += coefficient() * pool[pick(rng)];
  return out.is_zero() ? AlgebraElement::one(parts_.base) : out;
}

void Scenario::validate() const {
  const auto& opt = parts_.options;
  const BackendPtr& base = parts_.base;
  const Sampler d_sampler = [this](Rng& rng) { return random_d(rng); };
  std::vector<ValidationReport> reports;

  reports.push_back(validate_state(parts_.phi, base, d_sampler, opt.validation_samples, opt.validation_tolerance,
                                   opt.seed));
  reports.push_back(validate_expectation(parts_.e_d, base, {parts_.phi}, opt.validation_samples,
                                         opt.validation_tolerance, opt.seed + 1));
  for (std::size_t i = 0; i < parts_.thetas.size(); ++i) {
    const ThetaData& th = parts_.thetas[i];
    reports.push_back(validate_embedding(th.map, base, d_sampler, opt.validation_samples, opt.validation_tolerance,
                                         opt.seed + 2 + 2 * i));
    reports.push_back(validate_expectation(th.expectation, base, {transported_state(*this, i)},
                                           opt.validation_samples, opt.validation_tolerance, opt.seed + 3 + 2 * i));
    // The expectation's range must be the image theta(D).
    ValidationReport range{th.expectation.name() + " range", opt.validation_samples, {}};
    Rng rng(opt.seed + 100 + i);
    for (std::size_t k = 0; k < opt.validation_samples && range.failures.empty(); ++k) {
      const AlgebraElement td = th.map.apply(random_d(rng));
      if (distance(th.expectation.apply(td), td) > opt.validation_tolerance * std::max(1.0, td.max_abs())) {
        range.failures.push_back("E_" + th.name + "(D) does not fix " + th.name + "(D)");
      }
    }
    reports.push_back(std::move(range));
  }

  std::ostringstream os;
  bool failed = false;
  for (const auto& r : reports) {
    for (const auto& f : r.failures) {
      os << "\n  " << r.subject << ": " << f;
      failed = true;
    }
  }
  if (failed) throw ScenarioError("scenario '" + parts_.name + "' failed validation:" + os.str());
}

std::vector<std::string> trace_preservation_failures(const Scenario& s) {
  std::vector<std::string> failures;
  if (!s.trace()) return {"scenario supplies no candidate trace"};
  const State& tau = *s.trace();
  const double tol = 1e-9;

  std::vector<AlgebraElement> probes;
  for (const Basis& b : s.base()->probe_basis()) probes.push_back(AlgebraElement::basis(s.base(), b));
  Rng rng(s.options().seed + 7);
  for (int i = 0; i < 20; ++i) probes.push_back(AlgebraElement::random(s.base(), rng));

  auto check = [&](const std::string& what, const std::function<Complex(const AlgebraElement&)>& lhs) {
    for (const auto& x : probes) {
      const Complex expected = tau.evaluate(x);
      if (!negligible(lhs(x) - expected, tol, std::abs(expected) + x.max_abs())) {
        failures.push_back(what);
        return;
      }
    }
  };
  check("tau = tau|_D o E_D", [&](const AlgebraElement& x) { return tau.evaluate(s.e_d().apply(x)); });
  for (const ThetaData& th : s.thetas()) {
    check("tau = tau|_D o " + th.name + "^-1 o E_" + th.name + "(D)", [&](const AlgebraElement& x) {
      return tau.evaluate(th.map.apply_inverse(th.expectation.apply(x)));
    });
  }
  check("phi = tau|_D", [&](const AlgebraElement& x) { return s.phi().evaluate(s.e_d().apply(x)); });
  return failures;
}

HnnWord::HnnWord(std::vector<AlgebraElement> coeffs, std::vector<StableLetter> lets)
    : coefficients(std::move(coeffs)), letters(std::move(lets)) {
  if (coefficients.size() != letters.size() + 1) {
    throw DomainError("an HNN word needs exactly one more coefficient than letters");
  }
  for (const auto& l : letters) {
    if (l.exponent != 1 && l.exponent != -1) throw DomainError("stable letter exponent must be +1 or -1");
  }
  reduced.assign(letters.empty() ? 0 : letters.size() - 1, 0);
}

bool HnnWord::is_zero() const {
  for (const auto& c : coefficients) {
    if (c.is_zero()) return true;
  }
  return false;
}

HnnElement::HnnElement(ScenarioPtr scenario, std::vector<HnnWord> words)
    : scenario_(std::move(scenario)), words_(std::move(words)) {
  if (!scenario_) throw Error("HNN element without a scenario");
  std::erase_if(words_, [](const HnnWord& w) { return w.is_zero(); });
}

HnnElement HnnElement::one(ScenarioPtr s) {
  AlgebraElement n = AlgebraElement::one(s->base());
  return HnnElement::base(std::move(s), std::move(n));
}

HnnElement HnnElement::base(ScenarioPtr s, AlgebraElement n) {
  if (n.backend_ptr() != s->base()) throw BackendMismatch("coefficient from " + n.backend().id());
  std::vector<HnnWord> words;
  words.emplace_back(std::move(n));
  return HnnElement(std::move(s), std::move(words));
}

HnnElement HnnElement::scalar(ScenarioPtr s, Complex c) {
  AlgebraElement n = AlgebraElement::scalar(s->base(), c);
  return HnnElement::base(std::move(s), std::move(n));
}

HnnElement HnnElement::letter(ScenarioPtr s, std::size_t theta, int exponent) {
  if (theta >= s->thetas().size()) throw DomainError("no stable letter t" + std::to_string(theta + 1));
  const AlgebraElement one = AlgebraElement::one(s->base());
  std::vector<HnnWord> words;
  words.emplace_back(std::vector<AlgebraElement>{one, one}, std::vector<StableLetter>{{theta, exponent}});
  return HnnElement(std::move(s), std::move(words));
}

HnnElement& HnnElement::operator+=(const HnnElement& other) {
  if (scenario_ != other.scenario_) throw BackendMismatch("elements of different scenarios");
  words_.insert(words_.end(), other.words_.begin(), other.words_.end());
  return *this;
}

HnnElement& HnnElement::operator*=(Complex c) {
  for (auto& w : words_) w.coefficients.front() *= c;
  std::erase_if(words_, [](const HnnWord& w) { return w.is_zero(); });
  return *this;
}

HnnElement operator+(const HnnElement& a, const HnnElement& b) {
  HnnElement out = a;
  out += b;
  return out;
}

HnnElement operator-(const HnnElement& a, const HnnElement& b) { return a + Complex(-1.0) * b; }

HnnElement operator*(Complex c, const HnnElement& a) {
  HnnElement out = a;
  out *= c;
  return out;
}

bool is_pinchable(const HnnWord& w, std::size_t junction) {
  if (junction + 1 >= w.letters.size()) return false;
  const auto& l = w.letters[junction];
  const auto& r = w.letters[junction + 1];
  return l.theta == r.theta && l.exponent == -r.exponent;
}

bool is_reduced(const Scenario& s, const HnnWord& w, double tol) {
  for (std::size_t j = 0; j + 1 < w.letters.size(); ++j) {
    if (!is_pinchable(w, j)) continue;
    const AlgebraElement& c = w.coefficients[j + 1];
    const ConditionalExpectation& e =
        w.letters[j].exponent == 1 ? s.theta(w.letters[j].theta).expectation : s.e_d();
    if (e.apply(c).max_abs() > tol * std::max(1.0, c.max_abs())) return false;
  }
  return true;
}

std::vector<HnnWord> pinch(const Scenario& s, const HnnWord& w, std::size_t j) {
  if (!is_pinchable(w, j)) throw DomainError("junction " + std::to_string(j) + " is not pinchable");
  const ThetaData& th = s.theta(w.letters[j].theta);
  const bool plus_minus = w.letters[j].exponent == 1;
  const AlgebraElement& c = w.coefficients[j + 1];
  const AlgebraElement ec = (plus_minus ? th.expectation : s.e_d()).apply(c);
  const AlgebraElement kc = c - ec;

  std::vector<HnnWord> branches;
  if (!ec.is_zero()) {
    // u theta(d) u* = d and u* d u = theta(d)
    const AlgebraElement d = plus_minus ? th.map.apply_inverse(ec) : th.map.apply(ec);
    const AlgebraElement merged = w.coefficients[j] * d * w.coefficients[j + 2];
    if (!merged.is_zero()) {
      std::vector<AlgebraElement> coeffs(w.coefficients.begin(), w.coefficients.begin() + static_cast<long>(j));
      coeffs.push_back(merged);
      coeffs.insert(coeffs.end(), w.coefficients.begin() + static_cast<long>(j) + 3, w.coefficients.end());
      std::vector<StableLetter> letters(w.letters.begin(), w.letters.begin() + static_cast<long>(j));
      letters.insert(letters.end(), w.letters.begin() + static_cast<long>(j) + 2, w.letters.end());
      HnnWord b(std::move(coeffs), std::move(letters));
      // Junctions left of j-1 and right of j+1 keep their coefficients; the
      // merged junction j-1 starts unmarked.
      for (std::size_t k = 0; k + 1 < j; ++k) b.reduced[k] = w.reduced[k];
      for (std::size_t k = j + 2; k < w.reduced.size(); ++k) b.reduced[k - 2] = w.reduced[k];
      branches.push_back(std::move(b));
    }
  }
  if (!kc.is_zero()) {
    HnnWord b = w;
    b.coefficients[j + 1] = kc;
    b.reduced[j] = 1;
    branches.push_back(std::move(b));
  }
  return branches;
}

namespace {

std::optional<std::size_t> next_junction(const HnnWord& w, ScanOrder order) {
  const std::size_t n = w.reduced.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = order == ScanOrder::LeftToRight ? i : n - 1 - i;
    if (!w.reduced[j] && is_pinchable(w, j)) return j;
  }
  return std::nullopt;
}

}  // namespace

HnnElement normalize(const HnnElement& x, ScanOrder order) {
  const Scenario& s = *x.scenario();
  const std::size_t cap = s.options().term_cap;
  std::vector<HnnWord> work(x.words().rbegin(), x.words().rend());
  std::vector<HnnWord> done;
  AlgebraElement base_part = AlgebraElement::zero(s.base());

  while (!work.empty()) {
    HnnWord w = std::move(work.back());
    work.pop_back();
    if (w.is_zero()) continue;
    if (w.length() == 0) {
      base_part += w.coefficients.front();
      continue;
    }
    const auto j = next_junction(w, order);
    if (!j) {
      done.push_back(std::move(w));
      continue;
    }
    auto branches = pinch(s, w, *j);
    // Push in reverse so the E-branch is processed first.
    for (auto it = branches.rbegin(); it != branches.rend(); ++it) work.push_back(std::move(*it));
    if (work.size() + done.size() > cap) throw TermCapExceeded(cap);
  }

  std::vector<HnnWord> out;
  if (!base_part.is_zero()) out.emplace_back(std::move(base_part));
  for (auto& w : done) out.push_back(std::move(w));
  return HnnElement(x.scenario(), std::move(out));
}

HnnElement concatenate(const HnnElement& x, const HnnElement& y) {
  if (x.scenario() != y.scenario()) throw BackendMismatch("elements of different scenarios");
  std::vector<HnnWord> out;
  out.reserve(x.words().size() * y.words().size());
  for (const auto& a : x.words()) {
    for (const auto& b : y.words()) {
      std::vector<AlgebraElement> coeffs(a.coefficients.begin(), a.coefficients.end() - 1);
      coeffs.push_back(a.coefficients.back() * b.coefficients.front());
      coeffs.insert(coeffs.end(), b.coefficients.begin() + 1, b.coefficients.end());
      std::vector<StableLetter> letters = a.letters;
      letters.insert(letters.end(), b.letters.begin(), b.letters.end());
      HnnWord w(std::move(coeffs), std::move(letters));
      std::vector<char> marks = a.reduced;
      if (a.length() > 0 && b.length() > 0) marks.push_back(0);
      marks.insert(marks.end(), b.reduced.begin(), b.reduced.end());
      w.reduced = std::move(marks);
      out.push_back(std::move(w));
    }
  }
  return HnnElement(x.scenario(), std::move(out));
}

HnnElement multiply(const HnnElement& x, const HnnElement& y) { return normalize(concatenate(x, y)); }

HnnElement adjoint(const HnnElement& x) {
  std::vector<HnnWord> out;
  for (const auto& w : x.words()) {
    std::vector<AlgebraElement> coeffs;
    for (auto it = w.coefficients.rbegin(); it != w.coefficients.rend(); ++it) coeffs.push_back(adjoint(*it));
    std::vector<StableLetter> letters;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) letters.push_back({it->theta, -it->exponent});
    HnnWord a(std::move(coeffs), std::move(letters));
    a.reduced.assign(w.reduced.rbegin(), w.reduced.rend());
    out.push_back(std::move(a));
  }
  return HnnElement(x.scenario(), std::move(out));
}

bool is_unitary(const HnnElement& x, double tol) {
  const HnnElement one = HnnElement::one(x.scenario());
  const HnnElement xs = adjoint(x);
  return l2_distance(multiply(x, xs), one) <= tol && l2_distance(multiply(xs, x), one) <= tol;
}

HnnElement power(const HnnElement& x, int k) {
  if (k < 0) {
    if (!is_unitary(x)) throw NotUnitary("negative power of a non-unitary element");
    return power(adjoint(x), -k);
  }
  HnnElement out = HnnElement::one(x.scenario());
  for (int i = 0; i < k; ++i) out = multiply(out, x);
  return out;
}

AlgebraElement expect_onto_base(const HnnElement& x) {
  AlgebraElement out = AlgebraElement::zero(x.scenario()->base());
  // Reduced words of positive length have zero expectation.
  const HnnElement n = normalize(x);
  for (const auto& w : n.words()) {
    if (w.length() == 0) out += w.coefficients.front();
  }
  return out;
}

Complex state_moment(const HnnElement& x) {
  const Scenario& s = *x.scenario();
  return s.phi().evaluate(s.e_d().apply(expect_onto_base(x)));
}

double l2_distance(const HnnElement& x, const HnnElement& y) {
  const HnnElement z = normalize(x - y);
  const ScenarioPtr& s = z.scenario();
  double sum = 0.0;
  for (const auto& wi : z.words()) {
    const HnnElement left = adjoint(HnnElement(s, {wi}));
    for (const auto& wj : z.words()) sum += state_moment(concatenate(left, HnnElement(s, {wj}))).real();
  }
  return std::sqrt(std::max(0.0, sum));
}

double probe_distance(const HnnElement& x, const HnnElement& y, std::size_t max_probes) {
  const HnnElement z = normalize(x - y);
  const ScenarioPtr& s = z.scenario();
  const BackendPtr& backend = s->base();
  const std::vector<Basis> symbols = backend->probe_basis();
  std::set<std::vector<std::pair<std::size_t, int>>> sequences;
  for (const auto& w : z.words()) {
    std::vector<std::pair<std::size_t, int>> seq;
    for (const auto& l : w.letters) seq.emplace_back(l.theta, l.exponent);
    sequences.insert(std::move(seq));
  }
  Rng rng(s->options().seed);
  std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
  double worst = 0.0;
  for (const auto& seq : sequences) {
    const std::size_t slots = seq.size() + 1;
    double combos = 1.0;
    for (std::size_t k = 0; k < slots; ++k) combos *= static_cast<double>(symbols.size());
    const bool exhaustive = combos <= static_cast<double>(max_probes);
    const std::size_t count = exhaustive ? static_cast<std::size_t>(combos) : max_probes;
    std::vector<StableLetter> letters;
    for (const auto& [theta, e] : seq) letters.push_back({theta, e});
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<AlgebraElement> coeffs;
      std::size_t code = i;
      for (std::size_t k = 0; k < slots; ++k) {
        const std::size_t idx = exhaustive ? code % symbols.size() : pick(rng);
        code /= symbols.size();
        coeffs.push_back(AlgebraElement::basis(backend, symbols[idx]));
      }
      const HnnElement probe(s, {HnnWord(std::move(coeffs), letters)});
      worst = std::max(worst, std::abs(state_moment(concatenate(adjoint(probe), z))));
    }
  }
  return worst;
}

std::size_t shadow_length(const HnnWord& w) {
  std::vector<StableLetter> stack;
  for (const auto& l : w.letters) {
    if (!stack.empty() && stack.back().theta == l.theta && stack.back().exponent == -l.exponent) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return stack.size();
}

HnnElement modular_apply(const HnnElement& x, double t) {
  const Scenario& s = *x.scenario();
  if (!s.modular()) {
    throw UnsupportedOperation("scenario '" + s.name() +
                               "' has no modular calculus: needs a matrix backend or a tracial reference state");
  }
  const ModularCalculus& mc = *s.modular();
  std::vector<AlgebraElement> cocycles;
  for (std::size_t i = 0; i < s.thetas().size(); ++i) cocycles.push_back(mc.cocycle(i, t));

  std::vector<HnnWord> out;
  for (const auto& w : x.words()) {
    std::vector<AlgebraElement> coeffs;
    for (const auto& c : w.coefficients) coeffs.push_back(mc.sigma(c, t));
    // sigma_t(u) = u U_t and sigma_t(u*) = U_t* u*
    for (std::size_t k = 0; k < w.letters.size(); ++k) {
      const AlgebraElement& u = cocycles[w.letters[k].theta];
      if (w.letters[k].exponent == 1) {
        coeffs[k + 1] = u * coeffs[k + 1];
      } else {
        coeffs[k] = coeffs[k] * adjoint(u);
      }
    }
    out.emplace_back(std::move(coeffs), w.letters);
  }
  return normalize(HnnElement(x.scenario(), std::move(out)));
}

HnnElement random_word(const ScenarioPtr& s, Rng& rng, int max_letters) {
  std::uniform_int_distribution<int> len(0, max_letters);
  std::uniform_int_distribution<std::size_t> theta(0, s->thetas().size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> kind(0, 3);
  auto coefficient = [&]() {
    switch (kind(rng)) {
      case 0:
        return s->random_d(rng);
      case 1:
        return s->theta(theta(rng)).map.apply(s->random_d(rng));
      case 2:
        return s->random_d(rng) + AlgebraElement::random(s->base(), rng);
      default:
        return AlgebraElement::random(s->base(), rng);
    }
  };
  const int l = len(rng);
  std::vector<AlgebraElement> coeffs{coefficient()};
  std::vector<StableLetter> letters;
  for (int i = 0; i < l; ++i) {
    letters.push_back({theta(rng), coin(rng) ? 1 : -1});
    coeffs.push_back(coefficient());
  }
  std::vector<HnnWord> words;
  words.emplace_back(std::move(coeffs), std::move(letters));
  return HnnElement(s, std::move(words));
}

HnnElement letter_word(const ScenarioPtr& s, const GroupWord& letters) {
  HnnElement out = HnnElement::one(s);
  for (int code : letters) {
    out = concatenate(out, HnnElement::letter(s, static_cast<std::size_t>(std::abs(code) - 1), code > 0 ? 1 : -1));
  }
  return out;
}

std::string to_string(const HnnElement& x) {
  if (x.is_zero()) return "0";
  const Scenario& s = *x.scenario();
  const AlgebraElement one = AlgebraElement::one(s.base());
  std::ostringstream os;
  for (std::size_t i = 0; i < x.words().size(); ++i) {
    const HnnWord& w = x.words()[i];
    if (i) os << " + ";
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < w.coefficients.size(); ++k) {
      if (!(w.coefficients[k] == one)) parts.push_back(to_string(w.coefficients[k]));
      if (k < w.letters.size()) {
        const auto& l = w.letters[k];
        parts.push_back(s.theta(l.theta).name + (l.exponent == 1 ? "" : "'"));
      }
    }
    if (parts.empty()) parts.push_back("1");
    for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? "*" : "") << parts[k];
  }
  return os.str();
}

}  // namespace hnn
