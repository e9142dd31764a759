#pragma once

// Elements of the reduced HNN extension M = N *_D Theta as finite sums of
// alternating words n_0 u(theta_1)^{e_1} n_1 ... u(theta_l)^{e_l} n_l, their
// normalization to reduced words, the canonical expectation E^M onto N and
// the modular action on stable unitaries.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hnn/algebra.h"
#include "hnn/group.h"

namespace hnn {

struct ThetaData {
  std::string name;  // expression-language letter, "t1", "t2", ...
  Embedding map;     // theta : D -> N
  ConditionalExpectation expectation;  // E_{theta(D)}
};

// sigma_t of phi o E_D on N together with the cocycles
// [D phi o theta^-1 o E_theta(D) : D phi o E_D]_t.
class ModularCalculus {
 public:
  virtual ~ModularCalculus() = default;
  virtual AlgebraElement sigma(const AlgebraElement& n, double t) const = 0;
  virtual AlgebraElement cocycle(std::size_t theta, double t) const = 0;
  virtual std::string describe() const = 0;
};

struct ScenarioOptions {
  std::size_t term_cap = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t validation_samples = 100;
  double validation_tolerance = 1e-9;
};

struct ScenarioParts {
  std::string name;
  BackendPtr base;
  ConditionalExpectation e_d;
  std::vector<ThetaData> thetas;
  State phi;                   // reference state on D (evaluated on elements of N lying in D)
  std::optional<State> trace;  // candidate trace on N, if the backend has one
  std::optional<GroupSpec> group_oracle;  // group HNN extension whose L(G) this scenario models
  std::vector<std::pair<std::string, AlgebraElement>> bindings;
  ScenarioOptions options;
};

class Scenario;
using ScenarioPtr = std::shared_ptr<const Scenario>;

class Scenario {
 public:
  // Validates every structure map with the algebra-core suites and sets up the
  // modular calculus. Throws ScenarioError when a suite fails.
  static ScenarioPtr create(ScenarioParts parts);

  const std::string& name() const { return parts_.name; }
  const BackendPtr& base() const { return parts_.base; }
  const ConditionalExpectation& e_d() const { return parts_.e_d; }
  const std::vector<ThetaData>& thetas() const { return parts_.thetas; }
  const ThetaData& theta(std::size_t i) const { return parts_.thetas.at(i); }
  const State& phi() const { return parts_.phi; }
  const std::optional<State>& trace() const { return parts_.trace; }
  const std::optional<GroupSpec>& group_oracle() const { return parts_.group_oracle; }
  const std::vector<std::pair<std::string, AlgebraElement>>& bindings() const { return parts_.bindings; }
  const ScenarioOptions& options() const { return parts_.options; }
  // Null when the backend has no modular support (non-tracial symbolic scenarios).
  const std::shared_ptr<const ModularCalculus>& modular() const { return modular_; }
  // Draws a random element of D.
  AlgebraElement random_d(Rng& rng) const;

 private:
  explicit Scenario(ScenarioParts parts) : parts_(std::move(parts)) {}
  void validate() const;

  ScenarioParts parts_;
  std::shared_ptr<const ModularCalculus> modular_;
};

// Violated identities among tau o E_D = tau and tau o theta^-1 o E_theta(D) = tau
// (and phi = tau on D), sampled on probe basis symbols and random elements.
std::vector<std::string> trace_preservation_failures(const Scenario& s);

struct StableLetter {
  std::size_t theta = 0;
  int exponent = 1;  // +1 or -1

  friend bool operator==(const StableLetter&, const StableLetter&) = default;
};

struct HnnWord {
  std::vector<AlgebraElement> coefficients;  // letters.size() + 1 entries
  std::vector<StableLetter> letters;
  // One flag per interior junction k (between letters k and k+1): set once
  // the junction is known to satisfy the reduced-word condition.
  std::vector<char> reduced;

  explicit HnnWord(AlgebraElement n0) : coefficients{std::move(n0)} {}
  HnnWord(std::vector<AlgebraElement> coeffs, std::vector<StableLetter> letters);

  std::size_t length() const { return letters.size(); }
  bool is_zero() const;
};

class HnnElement {
 public:
  explicit HnnElement(ScenarioPtr scenario, std::vector<HnnWord> words = {});

  static HnnElement zero(ScenarioPtr s) { return HnnElement(std::move(s)); }
  static HnnElement one(ScenarioPtr s);
  static HnnElement base(ScenarioPtr s, AlgebraElement n);
  static HnnElement scalar(ScenarioPtr s, Complex c);
  // u(theta)^{exponent}, exponent = +1 or -1
  static HnnElement letter(ScenarioPtr s, std::size_t theta, int exponent = 1);

  const ScenarioPtr& scenario() const { return scenario_; }
  const std::vector<HnnWord>& words() const { return words_; }
  bool is_zero() const { return words_.empty(); }

  HnnElement& operator+=(const HnnElement& other);
  HnnElement& operator*=(Complex c);

 private:
  ScenarioPtr scenario_;
  std::vector<HnnWord> words_;
};

HnnElement operator+(const HnnElement& a, const HnnElement& b);
HnnElement operator-(const HnnElement& a, const HnnElement& b);
HnnElement operator*(Complex c, const HnnElement& a);

// Def. of reduced word: at every junction u(theta)^{+1} n u(theta)^{-1} the
// coefficient lies in Ker E_theta(D), at u(theta)^{-1} n u(theta) in Ker E_D.
bool is_reduced(const Scenario& s, const HnnWord& w, double tol = 1e-9);
bool is_pinchable(const HnnWord& w, std::size_t junction);

// Splits n = E(n) + (n - E(n)) at the junction. The E-branch collapses the
// letter pair using u theta(d) u* = d; the kernel branch keeps it and marks
// the junction reduced. Zero branches are dropped.
std::vector<HnnWord> pinch(const Scenario& s, const HnnWord& w, std::size_t junction);

enum class ScanOrder { LeftToRight, RightToLeft };

HnnElement normalize(const HnnElement& x, ScanOrder order = ScanOrder::LeftToRight);
// Word-by-word concatenation without normalization.
HnnElement concatenate(const HnnElement& x, const HnnElement& y);
HnnElement multiply(const HnnElement& x, const HnnElement& y);
HnnElement adjoint(const HnnElement& x);
// x^k for k >= 0; k < 0 requires x unitary and uses x^* (throws NotUnitary).
HnnElement power(const HnnElement& x, int k);
bool is_unitary(const HnnElement& x, double tol = 1e-9);

AlgebraElement expect_onto_base(const HnnElement& x);
// phi(E_D(E^M(x)))
Complex state_moment(const HnnElement& x);
// sqrt(phi o E_D o E^M((x - y)*(x - y)))
double l2_distance(const HnnElement& x, const HnnElement& y);

// max |phi o E_D o E^M(p* (x - y))| over probe words p = b_0 u^{e_1} b_1 ... u^{e_l} b_l whose
// letters follow a word of normalize(x - y) and whose b_k are base probe symbols. Sequences with
// more than max_probes coefficient choices are sampled with a fixed seed. Unlike l2_distance it
// has no cancellation floor.
double probe_distance(const HnnElement& x, const HnnElement& y, std::size_t max_probes = 4096);

// Reduced length of theta_1^{e_1} ... theta_l^{e_l} in the free group F(Theta).
std::size_t shadow_length(const HnnWord& w);

HnnElement modular_apply(const HnnElement& x, double t);

// Random alternating word with up to max_letters letters and random coefficients.
HnnElement random_word(const ScenarioPtr& s, Rng& rng, int max_letters);
// Letter-only word from a free-group string over the stable letters (code +-(i+1) for theta i).
HnnElement letter_word(const ScenarioPtr& s, const GroupWord& letters);

std::string to_string(const HnnElement& x);

}  // namespace hnn
