#pragma once

// Group algebras over groups with computable normal forms, with the
// canonical trace tau(g) = [g == e].
//
// Words are letter strings: generator i is encoded as i + 1, its inverse as
// -(i + 1). For hnn-of-Z(m, n) generator 0 is `a` and generator 1 is the
// stable letter `t`, with relation t a^m t^-1 = a^n.

#include <string>
#include <vector>

#include "hnn/algebra.h"

namespace hnn {

using GroupWord = std::vector<int>;

struct GroupSpec {
  enum class Kind { FreeAbelian, Free, HnnOfZ };

  Kind kind = Kind::FreeAbelian;
  int rank = 1;  // FreeAbelian/Free
  int m = 1;     // HnnOfZ: t a^m t^-1 = a^n
  int n = 1;
  std::vector<std::string> generator_names;

  static GroupSpec free_abelian(int rank);
  static GroupSpec free(int rank);
  static GroupSpec hnn_of_z(int m, int n);

  int generator_count() const { return kind == Kind::HnnOfZ ? 2 : rank; }
  std::string describe() const;
  // Throws DomainError on zero HNN parameters or nonpositive rank.
  void validate() const;
};

// Canonical form: two words are equal in G iff their normal forms coincide.
GroupWord normal_form(const GroupSpec& g, const GroupWord& w);
GroupWord inverse_word(const GroupWord& w);
Complex group_trace(const GroupWord& normal);
std::string format_group_word(const GroupSpec& g, const GroupWord& w);

class GroupAlgebra : public Backend {
 public:
  explicit GroupAlgebra(GroupSpec spec);

  const GroupSpec& spec() const { return spec_; }

  std::string id() const override { return "group:" + spec_.describe(); }
  double zero_threshold() const override { return 0.0; }
  Terms identity() const override { return {{GroupWord{}, 1.0}}; }
  Terms basis_product(const Basis& a, const Basis& b) const override;
  std::pair<Basis, Complex> basis_adjoint(const Basis& b) const override;
  std::string format_basis(const Basis& b) const override { return format_group_word(spec_, b); }
  std::vector<std::pair<std::string, Basis>> default_bindings() const override;
  std::vector<Basis> probe_basis() const override;
  Terms random_terms(Rng& rng) const override;

 private:
  GroupSpec spec_;
};

// Canonical trace on a group algebra, evaluated on normal-form basis symbols.
State group_trace_state();

struct SubgroupSpec {
  enum class Kind { Trivial, Multiples, Generators };

  Kind kind = Kind::Trivial;
  int step = 0;                 // Multiples: <a^step>
  std::vector<int> generators;  // Generators: indices of the generating subset

  static SubgroupSpec trivial() { return {}; }
  static SubgroupSpec multiples(int step) { return {Kind::Multiples, step, {}}; }
  static SubgroupSpec of_generators(std::vector<int> gens) { return {Kind::Generators, 0, std::move(gens)}; }

  std::string describe(const GroupSpec& g) const;
};

bool in_subgroup(const GroupSpec& g, const SubgroupSpec& h, const GroupWord& normal);

// The trace-preserving expectation onto L(H): identity on H, kills the rest.
// Throws UnsupportedOperation for subgroup descriptions outside
// {trivial, a^k Z inside Z, generator subsets of free(k) or Z^d}.
ConditionalExpectation subgroup_expectation(const GroupSpec& g, const SubgroupSpec& h);

// Injective homomorphism from a subgroup into G, extended linearly to L(H).
struct SubgroupMapSpec {
  enum class Kind { Identity, Multiples, GeneratorMap };

  Kind kind = Kind::Identity;
  int image_step = 0;                          // Multiples: a^(step k) -> a^(image_step k)
  std::vector<std::pair<int, int>> generator_map;  // GeneratorMap: generator -> generator

  SubgroupSpec image(const SubgroupSpec& domain) const;
};

Embedding subgroup_embedding(std::shared_ptr<const GroupAlgebra> algebra, const SubgroupSpec& domain,
                             const SubgroupMapSpec& map, std::string name);

}  // namespace hnn
