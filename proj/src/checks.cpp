#include "hnn/checks.h"

#include <cmath>
#include <sstream>

namespace hnn {

namespace {

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// Calls f on every word of length 0..max_len over the given letter codes.
template <class F>
void for_each_word(const std::vector<int>& alphabet, int max_len, F&& f) {
  GroupWord w;
  for (int len = 0; len <= max_len; ++len) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(len), 0);
    while (true) {
      w.resize(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) w[i] = alphabet[idx[i]];
      f(w);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == alphabet.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
}

std::string word_text(const std::vector<std::string>& names, const GroupWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += "*";
    out += names[static_cast<std::size_t>(std::abs(w[i]) - 1)];
    if (w[i] < 0) out += "'";
  }
  return out;
}

}  // namespace

CheckReport check_trace_hypothesis(const ScenarioPtr& s, std::size_t pairs, int max_letters) {
  CheckReport r{"trace", 0, {}, {}};
  r.failures = trace_preservation_failures(*s);
  ++r.checked;
  if (!r.passed()) return r;
  r.notes.push_back("tau o E_D = tau and tau o theta^-1 o E_theta(D) = tau hold on probes");

  const State& tau = *s->trace();
  Rng rng(s->options().seed);
  for (std::size_t i = 0; i < pairs; ++i) {
    const HnnElement x = random_word(s, rng, max_letters);
    const HnnElement y = random_word(s, rng, max_letters);
    const Complex xy = tau.evaluate(expect_onto_base(concatenate(x, y)));
    const Complex yx = tau.evaluate(expect_onto_base(concatenate(y, x)));
    ++r.checked;
    if (!close(xy, yx, 1e-9)) {
      r.failures.push_back("pair " + std::to_string(i) + ": tau(E(xy)) = " + format_complex(xy) +
                           ", tau(E(yx)) = " + format_complex(yx));
    }
  }
  return r;
}

CheckReport check_haar(const ScenarioPtr& s, std::optional<std::size_t> theta, int n_max, int mixed_len) {
  CheckReport r{"haar", 0, {}, {}};
  std::vector<std::size_t> letters;
  if (theta) {
    if (*theta >= s->thetas().size()) throw DomainError("no stable letter t" + std::to_string(*theta + 1));
    letters.push_back(*theta);
  } else {
    for (std::size_t i = 0; i < s->thetas().size(); ++i) letters.push_back(i);
  }

  for (std::size_t th : letters) {
    const std::string& name = s->theta(th).name;
    const HnnElement u = HnnElement::letter(s, th, 1);
    const HnnElement us = HnnElement::letter(s, th, -1);
    HnnElement pos = HnnElement::one(s);
    HnnElement neg = HnnElement::one(s);
    for (int n = 1; n <= n_max; ++n) {
      pos = multiply(pos, u);
      neg = multiply(neg, us);
      for (const auto& [k, x] : {std::pair{n, &pos}, std::pair{-n, &neg}}) {
        const Complex m = state_moment(*x);
        ++r.checked;
        if (!close(m, 0.0, 1e-9)) {
          r.failures.push_back("moment(" + name + "^" + std::to_string(k) + ") = " + format_complex(m));
        }
      }
    }
    const Complex m = state_moment(multiply(u, us));
    ++r.checked;
    if (!close(m, 1.0, 1e-9)) r.failures.push_back("moment(" + name + "*" + name + "') = " + format_complex(m));
  }

  // Letter-only words against the trace of the free group on the letters.
  std::vector<int> alphabet;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    alphabet.push_back(static_cast<int>(i) + 1);
    alphabet.push_back(-static_cast<int>(i) - 1);
    names.push_back(s->theta(letters[i]).name);
  }
  const GroupSpec free = GroupSpec::free(static_cast<int>(letters.size()));
  std::size_t words = 0;
  for_each_word(alphabet, mixed_len, [&](const GroupWord& w) {
    GroupWord engine_letters;
    for (int c : w) {
      const int code = static_cast<int>(letters[static_cast<std::size_t>(std::abs(c) - 1)]) + 1;
      engine_letters.push_back(c > 0 ? code : -code);
    }
    const Complex engine = state_moment(letter_word(s, engine_letters));
    const Complex oracle = group_trace(normal_form(free, w));
    ++r.checked;
    ++words;
    if (!close(engine, oracle, 1e-9)) {
      r.failures.push_back("moment(" + word_text(names, w) + ") = " + format_complex(engine) + ", free group " +
                           format_complex(oracle));
    }
  });
  r.notes.push_back(std::to_string(words) + " letter words of length <= " + std::to_string(mixed_len) +
                    " compared with the free group on " + std::to_string(letters.size()) + " generators");
  return r;
}

CheckReport oracle_compare(const ScenarioPtr& s, int length_bound, double tol) {
  CheckReport r{"oracle", 0, {}, {}};
  const auto& oracle = s->group_oracle();
  auto base = std::dynamic_pointer_cast<const GroupAlgebra>(s->base());
  if (!oracle || oracle->kind != GroupSpec::Kind::HnnOfZ) {
    throw UnsupportedOperation("scenario '" + s->name() + "' declares no hnn-of-Z group oracle");
  }
  if (!base || base->spec().kind != GroupSpec::Kind::FreeAbelian || base->spec().rank != 1) {
    throw UnsupportedOperation("oracle comparison needs the group algebra of Z as base");
  }
  const GroupSpec& z = base->spec();
  auto a_power = [&](int k) {
    return AlgebraElement::basis(base, normal_form(z, GroupWord(static_cast<std::size_t>(std::abs(k)), k > 0 ? 1 : -1)));
  };

  std::size_t words = 0;
  for_each_word({1, -1, 2, -2}, length_bound, [&](const GroupWord& w) {
    std::vector<int> powers{0};
    std::vector<StableLetter> letters;
    for (int c : w) {
      if (std::abs(c) == 1) {
        powers.back() += c;
      } else {
        letters.push_back({0, c > 0 ? 1 : -1});
        powers.push_back(0);
      }
    }
    std::vector<AlgebraElement> coeffs;
    for (int k : powers) coeffs.push_back(a_power(k));
    std::vector<HnnWord> single;
    single.emplace_back(std::move(coeffs), std::move(letters));
    const Complex engine = state_moment(HnnElement(s, std::move(single)));
    const Complex expected = group_trace(normal_form(*oracle, w));
    ++r.checked;
    ++words;
    if (!close(engine, expected, tol)) {
      r.failures.push_back(format_group_word(*oracle, w) + ": engine " + format_complex(engine) + ", group " +
                           format_complex(expected));
    }
  });
  r.notes.push_back(std::to_string(r.failures.size()) + " mismatches / " + std::to_string(words) + " words");
  return r;
}

std::vector<std::string> power_conditions(const Scenario& s, const AlgebraElement& vn, double tol) {
  std::vector<std::string> failed;
  if (s.e_d().apply(vn).max_abs() > tol) failed.push_back(s.e_d().name());
  for (const ThetaData& th : s.thetas()) {
    if (th.expectation.apply(vn).max_abs() > tol) failed.push_back(th.expectation.name());
  }
  return failed;
}

CheckReport check_full_hypothesis(const ScenarioPtr& s, const AlgebraElement& v, int n_max) {
  CheckReport r{"full-hypothesis", 0, {}, {}};
  const AlgebraElement one = AlgebraElement::one(s->base());
  const AlgebraElement vs = adjoint(v);
  if (distance(v * vs, one) > 1e-9 || distance(vs * v, one) > 1e-9) {
    throw NotUnitary("v = " + to_string(v) + " is not unitary");
  }
  AlgebraElement pos = one;
  AlgebraElement neg = one;
  for (int n = 1; n <= n_max; ++n) {
    pos = pos * v;
    neg = neg * vs;
    for (const auto& [k, x] : {std::pair{n, &pos}, std::pair{-n, &neg}}) {
      const auto failed = power_conditions(*s, *x);
      ++r.checked;
      if (failed.empty()) {
        r.notes.push_back("n=" + std::to_string(k) + ": pass");
        continue;
      }
      std::string msg = "n=" + std::to_string(k) + ":";
      for (std::size_t i = 0; i < failed.size(); ++i) {
        msg += (i ? ", " : " ") + failed[i] + "(v^" + std::to_string(k) + ") != 0";
      }
      r.failures.push_back(msg);
    }
  }
  return r;
}

CheckReport check_confluence(const ScenarioPtr& s, std::size_t samples, int max_letters, std::size_t probes) {
  CheckReport r{"confluence", 0, {}, {}};
  Rng rng(s->options().seed);
  std::vector<std::pair<HnnElement, HnnElement>> probe_pairs;
  for (std::size_t i = 0; i < probes; ++i) probe_pairs.emplace_back(random_word(s, rng, 2), random_word(s, rng, 2));

  for (std::size_t i = 0; i < samples; ++i) {
    const HnnElement x = random_word(s, rng, max_letters);
    const HnnElement lr = normalize(x, ScanOrder::LeftToRight);
    const HnnElement rl = normalize(x, ScanOrder::RightToLeft);
    for (std::size_t p = 0; p < probe_pairs.size(); ++p) {
      const auto& [a, b] = probe_pairs[p];
      const HnnElement as = adjoint(a);
      const Complex m1 = state_moment(concatenate(concatenate(as, lr), b));
      const Complex m2 = state_moment(concatenate(concatenate(as, rl), b));
      ++r.checked;
      if (!close(m1, m2, 1e-9)) {
        r.failures.push_back("word " + std::to_string(i) + ", probe " + std::to_string(p) + ": " +
                             format_complex(m1) + " vs " + format_complex(m2));
      }
    }
  }
  return r;
}

}  // namespace hnn
