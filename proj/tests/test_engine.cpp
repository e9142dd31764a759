#include <gtest/gtest.h>

#include <cmath>

#include "support.h"

using namespace hnn;
using namespace hnn::test;

namespace {

AlgebraElement base(const ScenarioPtr& s, const std::string& src) {
  return evaluate_base(*parse_expression(src), s->base(), base_bindings(s->base(), s->bindings()));
}

std::string nf(const ScenarioPtr& s, const std::string& src) { return to_string(normalize(ex(s, src))); }

}  // namespace

TEST(Pinch, SplitsIntoExpectationAndKernelBranches) {
  const auto s = load("bs23.json");
  const HnnWord w({base(s, "1"), base(s, "a^2 + a"), base(s, "1")}, {{0, 1}, {0, -1}});
  ASSERT_TRUE(is_pinchable(w, 0));
  EXPECT_FALSE(is_reduced(*s, w));
  const auto branches = pinch(*s, w, 0);
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_EQ(branches[0].length(), 0u);
  EXPECT_EQ(branches[0].coefficients[0], base(s, "a^3"));
  EXPECT_EQ(branches[1].length(), 2u);
  EXPECT_EQ(branches[1].coefficients[1], base(s, "a"));
  EXPECT_TRUE(branches[1].reduced[0]);
  EXPECT_TRUE(is_reduced(*s, branches[1]));
}

TEST(Pinch, DropsZeroBranches) {
  const auto s = load("bs23.json");
  const HnnWord inside({base(s, "1"), base(s, "a^4"), base(s, "1")}, {{0, 1}, {0, -1}});
  EXPECT_EQ(pinch(*s, inside, 0).size(), 1u);
  EXPECT_EQ(pinch(*s, inside, 0)[0].coefficients[0], base(s, "a^6"));
  const HnnWord outside({base(s, "1"), base(s, "a"), base(s, "1")}, {{0, 1}, {0, -1}});
  EXPECT_EQ(pinch(*s, outside, 0).size(), 1u);
  EXPECT_EQ(pinch(*s, outside, 0)[0].length(), 2u);
}

TEST(Pinch, MergedJunctionStartsUnmarked) {
  const auto s = load("bs23.json");
  // t1 * 1 * t1 * a^2 * t1' * a * t1'
  HnnWord w({base(s, "1"), base(s, "1"), base(s, "a^2"), base(s, "a"), base(s, "1")},
            {{0, 1}, {0, 1}, {0, -1}, {0, -1}});
  const auto branches = pinch(*s, w, 1);
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_EQ(branches[0].length(), 2u);
  EXPECT_EQ(branches[0].coefficients[1], base(s, "a^4"));
  EXPECT_FALSE(branches[0].reduced[0]);
  EXPECT_THROW(pinch(*s, w, 0), DomainError);
}

TEST(Normalize, BaumslagSolitarExamples) {
  const auto s = load("bs23.json");
  EXPECT_EQ(nf(s, "t1*a^2*t1'"), "a^3");
  EXPECT_EQ(nf(s, "t1*a^3*t1'"), "t1*a^3*t1'");
  EXPECT_EQ(nf(s, "t1*(a^2 + a)*t1'"), "a^3 + t1*a*t1'");
  EXPECT_EQ(nf(s, "t1'*a^3*t1"), "a^2");
  EXPECT_EQ(nf(s, "t1'*(a^3 + a^5)*t1"), "a^2 + t1'*a^5*t1");
  EXPECT_EQ(nf(s, "t1*t1'"), "1");
}

TEST(Normalize, Idempotent) {
  for (const char* name : {"bs23.json", "free2.json", "torus_rational.json", "blocks.json"}) {
    const auto s = load(name);
    Rng rng(21);
    for (int i = 0; i < 10; ++i) {
      const HnnElement x = normalize(random_word(s, rng, 4));
      for (const auto& w : x.words()) EXPECT_TRUE(is_reduced(*s, w, 1e-8)) << name;
      EXPECT_LT(l2_distance(normalize(x), x), 1e-9) << name;
    }
  }
}

TEST(Normalize, OrdersAgree) {
  const auto s = load("bs23.json");
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const HnnElement x = random_word(s, rng, 4);
    EXPECT_LT(l2_distance(normalize(x, ScanOrder::LeftToRight), normalize(x, ScanOrder::RightToLeft)), 1e-9);
  }
}

TEST(Normalize, TermCap) {
  LoadOptions o;
  o.term_cap = 5;
  const auto s = load_scenario_file(scenario_path("free2.json"), o);
  EXPECT_THROW(normalize(ex(s, "(t1 + t1')^6")), TermCapExceeded);
}

TEST(Multiply, CollapsesInnerJunction) {
  const auto s = load("bs23.json");
  const HnnElement x = ex(s, "t1*a*t1'");
  EXPECT_EQ(to_string(multiply(x, x)), "a^3");
  EXPECT_EQ(to_string(multiply(x, ex(s, "t1*a^2*t1'"))), "t1*a^3*t1'");
  EXPECT_EQ(to_string(multiply(ex(s, "t1"), ex(s, "t1'"))), "1");
}

TEST(Multiply, Associative) {
  const auto s = load("bs23.json");
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const HnnElement x = random_word(s, rng, 3);
    const HnnElement y = random_word(s, rng, 3);
    const HnnElement z = random_word(s, rng, 3);
    const HnnElement l = multiply(multiply(x, y), z);
    EXPECT_LT(l2_distance(l, multiply(x, multiply(y, z))), 1e-9 * std::max(1.0, l2_distance(l, HnnElement::zero(s))));
  }
}

TEST(Adjoint, ReversesWords) {
  const auto s = load("bs23.json");
  EXPECT_EQ(to_string(adjoint(ex(s, "t1*a*t1'"))), "t1*a^-1*t1'");
  EXPECT_EQ(to_string(adjoint(ex(s, "2i*a^2*t1"))), "t1'*(-2.0i)*a^-2");
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const HnnElement x = random_word(s, rng, 4);
    EXPECT_EQ(to_string(adjoint(adjoint(x))), to_string(x));
  }
}

TEST(Unitary, LettersAndPowers) {
  const auto s = load("free2.json");
  EXPECT_TRUE(is_unitary(ex(s, "t1")));
  EXPECT_TRUE(is_unitary(ex(s, "t1*a*t2'")));
  EXPECT_FALSE(is_unitary(ex(s, "t1 + t2")));
  EXPECT_THROW(power(ex(s, "t1 + t2"), -1), NotUnitary);
  EXPECT_EQ(to_string(normalize(power(ex(s, "t1"), -2))), "t1'*t1'");
  EXPECT_EQ(to_string(normalize(power(ex(s, "t1"), 0))), "1");
}

TEST(Shadow, FreeGroupLength) {
  const auto s = load("free2.json");
  const auto one = AlgebraElement::one(s->base());
  EXPECT_EQ(shadow_length(HnnWord({one, one, one, one}, {{0, 1}, {1, 1}, {1, -1}})), 1u);
  EXPECT_EQ(shadow_length(HnnWord({one, one, one}, {{0, 1}, {1, -1}})), 2u);
  EXPECT_EQ(shadow_length(HnnWord(one)), 0u);
}

TEST(Expect, OntoBase) {
  const auto s = load("bs23.json");
  EXPECT_EQ(expect_onto_base(ex(s, "t1'*(a^3 + a^5)*t1 + 2*a")), base(s, "2*a + a^2"));
  EXPECT_TRUE(expect_onto_base(ex(s, "t1*a*t1'")).is_zero());
  EXPECT_EQ(state_moment(ex(s, "t1*a^2*t1'*a^-3")), Complex(1.0));
  EXPECT_EQ(state_moment(ex(s, "t1*a^2*t1'*a^-2")), Complex(0.0));
}

TEST(Haar, CentralBinomialMoments) {
  const auto s = load("free2.json");
  for (int k = 1; k <= 5; ++k) {
    const HnnElement x = power(ex(s, "t1 + t1'"), 2 * k);
    const Complex m = state_moment(x);
    EXPECT_NEAR(m.real(), static_cast<double>(balanced_strings(2 * k)), 1e-9) << k;
    EXPECT_EQ(balanced_strings(2 * k), binomial(2 * k, k));
    EXPECT_NEAR(m.imag(), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(state_moment(power(ex(s, "t1 + t1'"), 2 * k - 1))), 0.0, 1e-9);
  }
}

TEST(Haar, LetterPowersVanish) {
  const auto s = load("free2.json");
  for (int n = 1; n <= 10; ++n) {
    EXPECT_EQ(state_moment(power(ex(s, "t1"), n)), Complex(0.0)) << n;
    EXPECT_EQ(state_moment(power(ex(s, "t2"), -n)), Complex(0.0)) << n;
  }
}

TEST(Haar, LetterWordsMatchFreeGroupTrace) {
  const auto s = load("free2.json");
  const GroupSpec f2 = GroupSpec::free(2);
  std::vector<GroupWord> layer{{}};
  for (int len = 1; len <= 5; ++len) {
    std::vector<GroupWord> next;
    for (const auto& p : layer) {
      for (int c : {1, -1, 2, -2}) {
        GroupWord q = p;
        q.push_back(c);
        EXPECT_EQ(state_moment(letter_word(s, q)), group_trace(normal_form(f2, q))) << format_group_word(f2, q);
        next.push_back(std::move(q));
      }
    }
    layer = std::move(next);
  }
}

TEST(Modular, TracialScenarioIsIdentity) {
  for (const char* name : {"bs23.json", "torus_rational.json", "tensor_tracial.json"}) {
    const auto s = load(name);
    ASSERT_TRUE(s->modular()) << name;
    Rng rng(1);
    const HnnElement x = normalize(random_word(s, rng, 3));
    EXPECT_LT(probe_distance(modular_apply(x, 0.7), x), 1e-10) << name;
  }
}

TEST(Modular, CaseOneFixesStableLetter) {
  const auto s = load("tensor_case1.json");
  for (double t : {0.3, 1.0, -2.5}) {
    EXPECT_LT(probe_distance(modular_apply(ex(s, "t1"), t), ex(s, "t1")), 1e-10);
    const HnnElement sx = modular_apply(ex(s, "x"), t);
    EXPECT_GT(probe_distance(sx, ex(s, "x")), 1e-3);
    EXPECT_LT(probe_distance(modular_apply(ex(s, "t1*x*t1'"), t), concatenate(concatenate(ex(s, "t1"), sx), ex(s, "t1'"))),
              1e-10);
  }
}

TEST(Modular, PerturbedCocycle) {
  const auto s = load("tensor_perturbed.json");
  const auto a = std::dynamic_pointer_cast<const MultiMatrixAlgebra>(s->base());
  ASSERT_TRUE(a);
  for (double t : {0.3, 1.0, -2.5}) {
    // h_transported h_reference^{-1} = 1 (x) diag(0.3/0.6, 0.7/0.4)
    const Complex p = std::exp(Complex(0.0, t * std::log(0.5)));
    const Complex q = std::exp(Complex(0.0, t * std::log(1.75)));
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = p;
    u(1, 1) = q;
    u(2, 2) = p;
    u(3, 3) = q;
    const HnnElement expected = multiply(ex(s, "t1"), HnnElement::base(s, a->from_blocks({u})));
    const HnnElement got = modular_apply(ex(s, "t1"), t);
    EXPECT_LT(probe_distance(got, expected), 1e-10) << t;
    EXPECT_GT(probe_distance(got, ex(s, "t1")), 1e-3) << t;
    EXPECT_TRUE(approx_equal(s->modular()->cocycle(0, t), a->from_blocks({u}), 1e-10));
  }
}

TEST(Modular, AdjointLetter) {
  const auto s = load("tensor_perturbed.json");
  const HnnElement x = ex(s, "t1'");
  const HnnElement y = modular_apply(x, 0.4);
  EXPECT_LT(probe_distance(y, adjoint(modular_apply(ex(s, "t1"), 0.4))), 1e-10);
}

TEST(ProbeDistance, DetectsDifferences) {
  const auto s = load("bs23.json");
  EXPECT_EQ(probe_distance(ex(s, "t1*a*t1'"), ex(s, "t1*a*t1'")), 0.0);
  EXPECT_EQ(probe_distance(ex(s, "t1*a^2*t1'"), ex(s, "a^3")), 0.0);
  EXPECT_EQ(probe_distance(ex(s, "t1*a*t1'"), ex(s, "t1*a^-1*t1'")), 1.0);
  EXPECT_NEAR(probe_distance(ex(s, "1.5*t1"), ex(s, "t1")), 0.5, 1e-15);
}

TEST(Format, RoundTrip) {
  for (const char* name : {"bs23.json", "torus_irrational.json", "blocks.json"}) {
    const auto s = load(name);
    Rng rng(5);
    for (int i = 0; i < 5; ++i) {
      const HnnElement x = normalize(random_word(s, rng, 3));
      const HnnElement back = ex(s, to_string(x));
      EXPECT_LT(l2_distance(x, back), 1e-9) << name << ": " << to_string(x);
    }
  }
}
