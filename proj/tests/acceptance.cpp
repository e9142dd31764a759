// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.h"

using namespace hnn;
using namespace hnn::test;

namespace {

constexpr double kOracleTol = 1e-10;
constexpr int kOracleLength = 8;
constexpr double kOracleSeconds = 60.0;
constexpr double kHaarTol = 1e-9;
constexpr int kHaarPowers = 10;
constexpr int kBinomialMax = 5;
constexpr int kFreeWordLength = 6;
constexpr std::size_t kTracePairs = 200;
constexpr int kFullHypothesisPowers = 10;
constexpr double kModularTol = 1e-8;
constexpr std::size_t kModularWords = 50;
constexpr double kCocycleTol = 1e-10;
constexpr double kCaseOneTol = 1e-10;
constexpr double kSuiteSeconds = 300.0;
const double kTimes[] = {0.3, 1.0, -2.5};

const std::vector<std::string> kAllScenarios = {
    "bs23.json",           "free2.json",           "torus_rational.json", "torus_irrational.json", "tensor_case1.json",
    "tensor_generic.json", "tensor_perturbed.json", "tensor_tracial.json", "blocks.json"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Outcome criterion1() {
  Outcome o;
  const auto s = load("bs23.json");
  const auto start = Clock::now();
  const CheckReport r = oracle_compare(s, kOracleLength, kOracleTol);
  const double secs = seconds_since(start);
  if (!r.passed()) o.fail(r.failures.front());
  if (secs > kOracleSeconds) o.fail("took " + fmt(secs) + " s");
  if (o.pass) o.detail = r.notes.back() + " in " + fmt(secs) + " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (const char* name : {"free2.json", "bs23.json"}) {
    const auto s = load(name);
    const HnnElement u = HnnElement::letter(s, 0, 1);
    for (int n = 1; n <= kHaarPowers; ++n) {
      for (int k : {n, -n}) {
        const Complex m = state_moment(power(u, k));
        if (!near(m, 0.0, kHaarTol)) o.fail(std::string(name) + ": moment(u^" + std::to_string(k) + ") = " + format_complex(m));
      }
    }
    if (!near(state_moment(multiply(u, adjoint(u))), 1.0, kHaarTol)) o.fail(std::string(name) + ": moment(u u*) != 1");
    const HnnElement h = u + adjoint(u);
    for (int k = 1; k <= kBinomialMax; ++k) {
      const Complex m = state_moment(power(h, 2 * k));
      const double expected = static_cast<double>(balanced_strings(2 * k));
      if (!near(m, expected, kHaarTol)) {
        o.fail(std::string(name) + ": moment((u+u*)^" + std::to_string(2 * k) + ") = " + format_complex(m));
      }
    }
  }
  if (o.pass) o.detail = "powers to " + std::to_string(kHaarPowers) + ", central binomial to k=" + std::to_string(kBinomialMax);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto s = load("free2.json");
  const GroupSpec f2 = GroupSpec::free(2);
  std::size_t count = 0;
  std::vector<GroupWord> layer{{}};
  for (int len = 1; len <= kFreeWordLength; ++len) {
    std::vector<GroupWord> next;
    for (const auto& p : layer) {
      for (int c : {1, -1, 2, -2}) {
        GroupWord w = p;
        w.push_back(c);
        const Complex m = state_moment(letter_word(s, w));
        const Complex expected = group_trace(normal_form(f2, w));
        ++count;
        if (!near(m, expected, kHaarTol)) o.fail(format_group_word(f2, w) + ": " + format_complex(m));
        next.push_back(std::move(w));
      }
    }
    layer = std::move(next);
  }
  if (o.pass) o.detail = std::to_string(count) + " letter words agree with the free group trace";
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const char* name : {"torus_rational.json", "torus_irrational.json"}) {
    const auto s = load(name);
    const CheckReport trace = check_trace_hypothesis(s, kTracePairs, 3);
    if (!trace.passed()) o.fail(std::string(name) + ": " + trace.failures.front());
    if (trace.checked != kTracePairs + 1) o.fail(std::string(name) + ": wrong number of traciality pairs");
    const AlgebraElement v = evaluate_base(*parse_expression("u*v"), s->base(), base_bindings(s->base()));
    const CheckReport full = check_full_hypothesis(s, v, kFullHypothesisPowers);
    if (!full.passed()) o.fail(std::string(name) + ": " + full.failures.front());
  }
  if (o.pass) o.detail = "both tori: trace, " + std::to_string(kTracePairs) + " pairs, full hypothesis to n=" +
                         std::to_string(kFullHypothesisPowers);
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const char* name : {"tensor_generic.json", "blocks.json"}) {
    const auto s = load(name);
    const auto a = std::dynamic_pointer_cast<const MultiMatrixAlgebra>(s->base());
    const ModularCalculus& mc = *s->modular();
    const AlgebraElement one = AlgebraElement::one(a);
    const DensityState reference = DensityState::from_functional(
        a, State("ref", [&](const AlgebraElement& x) { return s->phi().evaluate(s->e_d().apply(x)); }));
    const DensityState tracial = DensityState::tracial(a);
    Rng rng(0);
    std::vector<HnnElement> words;
    for (std::size_t i = 0; i < kModularWords; ++i) words.push_back(normalize(random_word(s, rng, 3)));
    for (double t : kTimes) {
      const std::string at = std::string(name) + " t=" + fmt(t) + ": ";
      for (std::size_t k = 0; k < s->thetas().size(); ++k) {
        const ThetaData& th = s->theta(k);
        const DensityState transported = DensityState::from_functional(
            a, State("tr", [&](const AlgebraElement& x) { return s->phi().evaluate(th.map.apply_inverse(th.expectation.apply(x))); }));
        const AlgebraElement u = mc.cocycle(k, t);
        if (distance(u * adjoint(u), one) > kModularTol || distance(adjoint(u) * u, one) > kModularTol) o.fail(at + "cocycle not unitary");
        if (distance(connes_cocycle(transported, tracial, t) * connes_cocycle(tracial, reference, t), u) > kModularTol) {
          o.fail(at + "chain rule");
        }
        if (distance(mc.cocycle(k, t + 0.45), mc.cocycle(k, 0.45) * mc.sigma(u, 0.45)) > kModularTol) o.fail(at + "cocycle identity");
      }
      for (std::size_t i = 0; i < words.size(); ++i) {
        const Complex before = state_moment(words[i]);
        const Complex after = state_moment(modular_apply(words[i], t));
        if (!near(after, before, kModularTol)) o.fail(at + "state not invariant on word " + std::to_string(i));
        const HnnElement p = words[(i + 1) % words.size()];
        const Complex m1 = state_moment(modular_apply(multiply(adjoint(p), words[i]), t));
        const Complex m2 = state_moment(multiply(adjoint(modular_apply(p, t)), modular_apply(words[i], t)));
        if (!near(m1, m2, kModularTol)) o.fail(at + "probe moment on word " + std::to_string(i));
      }
    }
  }
  if (o.pass) o.detail = "tensor_generic, blocks: unitarity, chain rule, cocycle identity, " + std::to_string(kModularWords) + " words";
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::size_t tracial = 0;
  for (const auto& name : kAllScenarios) {
    const auto s = load(name);
    if (!check_trace_hypothesis(s, 20, 3).passed()) continue;
    ++tracial;
    if (!s->modular()) {
      o.fail(name + ": no modular calculus");
      continue;
    }
    const AlgebraElement one = AlgebraElement::one(s->base());
    for (std::size_t k = 0; k < s->thetas().size(); ++k) {
      for (double t : kTimes) {
        const double d = distance(s->modular()->cocycle(k, t), one);
        if (d > kCocycleTol) o.fail(name + ": |U_t - 1| = " + fmt(d));
      }
    }
  }
  if (tracial == 0) o.fail("no scenario passed the trace check");
  if (o.pass) o.detail = std::to_string(tracial) + " tracial scenarios with trivial cocycle";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto c1 = load("tensor_case1.json");
  const auto pert = load("tensor_perturbed.json");
  double broken = 1.0;
  for (double t : kTimes) {
    const HnnElement u = HnnElement::letter(c1, 0, 1);
    const double d = probe_distance(modular_apply(u, t), u);
    if (d > kCaseOneTol) o.fail("case 1 t=" + fmt(t) + ": |sigma(u) - u| = " + fmt(d));
    const HnnElement v = HnnElement::letter(pert, 0, 1);
    broken = std::min(broken, probe_distance(modular_apply(v, t), v));
  }
  if (broken <= 1e-3) o.fail("perturbed scenario keeps sigma(u) = u");
  if (o.pass) o.detail = "case 1 fixes u; perturbed moves it by >= " + fmt(broken);
  return o;
}

Outcome criterion8(Clock::time_point run_start) {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& name : kAllScenarios) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = load(name, seed);
      Rng rng(seed);
      const std::string at = name + " seed " + std::to_string(seed) + ": ";
      for (int i = 0; i < 5; ++i) {
        const HnnElement x = random_word(s, rng, 3);
        const AlgebraElement a = random_base(s, rng);
        const AlgebraElement b = random_base(s, rng);
        const AlgebraElement lhs = expect_onto_base(concatenate(concatenate(HnnElement::base(s, a), x), HnnElement::base(s, b)));
        const AlgebraElement rhs = a * expect_onto_base(x) * b;
        if (distance(lhs, rhs) > 1e-9 * std::max({1.0, lhs.max_abs(), rhs.max_abs()})) o.fail(at + "bimodule law");
        const AlgebraElement e1 = expect_onto_base(adjoint(x));
        const AlgebraElement e2 = adjoint(expect_onto_base(x));
        if (distance(e1, e2) > 1e-9 * std::max({1.0, e1.max_abs(), e2.max_abs()})) o.fail(at + "involution");
        const Complex pos = state_moment(concatenate(adjoint(x), x));
        if (pos.real() < -1e-9 * std::max(1.0, std::abs(pos))) o.fail(at + "positivity");
        if (s->modular()) {
          const Complex m = state_moment(x);
          if (!near(state_moment(modular_apply(x, 0.3)), m, kModularTol)) o.fail(at + "modular invariance");
        }
      }
      const CheckReport conf = check_confluence(s, 5, 4, 5);
      if (!conf.passed()) o.fail(at + "confluence: " + conf.failures.front());
      for (std::size_t k = 0; k < s->thetas().size(); ++k) {
        if (!is_unitary(HnnElement::letter(s, k, 1))) o.fail(at + "letter not unitary");
      }
      ++runs;
    }
  }
  const double secs = seconds_since(run_start);
  if (secs > kSuiteSeconds) o.fail("acceptance run took " + fmt(secs) + " s");
  if (o.pass) o.detail = std::to_string(runs) + " scenario/seed runs; total " + fmt(secs) + " s";
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, [start] { return criterion8(start); }}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
