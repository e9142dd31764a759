#pragma once

// Scenario-level verifiers. Each returns a report listing every mismatch
// found; none of them throw on a failed check.

#include <optional>
#include <string>
#include <vector>

#include "hnn/engine.h"

namespace hnn {

struct CheckReport {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  bool passed() const { return failures.empty(); }
};

// tau o E_D = tau, tau o theta^-1 o E_theta(D) = tau and phi = tau on D; when
// these hold, also tau(E^M(xy)) = tau(E^M(yx)) on random word pairs.
CheckReport check_trace_hypothesis(const ScenarioPtr& s, std::size_t pairs = 50, int max_letters = 3);

// state_moment(u^n) = 0 for 1 <= |n| <= n_max, state_moment(u u*) = 1, and
// every letter-only word of length <= mixed_len against the free-group trace.
// theta = nullopt checks every stable letter.
CheckReport check_haar(const ScenarioPtr& s, std::optional<std::size_t> theta, int n_max, int mixed_len = 6);

// Every word over {a, a^-1, t, t^-1} of length <= length_bound:
// state_moment(engine word) against group_trace(normal_form(w)).
// Needs a scenario with an hnn-of-Z oracle over the group algebra of Z.
CheckReport oracle_compare(const ScenarioPtr& s, int length_bound, double tol = 1e-10);

// Power conditions for one exponent: the names of the expectations not
// vanishing on v^n (E_D first, then every E_theta(D)).
std::vector<std::string> power_conditions(const Scenario& s, const AlgebraElement& vn, double tol = 1e-9);

// E_D(v^n) = E_theta(D)(v^n) = 0 for 1 <= |n| <= n_max. Throws NotUnitary.
CheckReport check_full_hypothesis(const ScenarioPtr& s, const AlgebraElement& v, int n_max);

// Left-to-right against right-to-left normalization of random words,
// compared through state_moment(a* x b) on random probe pairs.
CheckReport check_confluence(const ScenarioPtr& s, std::size_t samples = 20, int max_letters = 4,
                             std::size_t probes = 20);

}  // namespace hnn
