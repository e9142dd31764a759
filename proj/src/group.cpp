#include "hnn/group.h"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace hnn {

namespace {

int letter_index(int code) { return std::abs(code) - 1; }
int letter_sign(int code) { return code > 0 ? 1 : -1; }

// k = q * d + r with 0 <= r < |d|.
std::pair<long, long> floor_divmod(long k, long d) {
  const long ad = std::labs(d);
  const long r = ((k % ad) + ad) % ad;
  return {(k - r) / d, r};
}

void append_power(GroupWord& out, int generator, long exponent) {
  const int code = exponent > 0 ? generator + 1 : -(generator + 1);
  for (long i = 0; i < std::labs(exponent); ++i) out.push_back(code);
}

GroupWord free_abelian_nf(int rank, const GroupWord& w) {
  std::vector<long> exps(static_cast<std::size_t>(rank), 0);
  for (int code : w) exps[static_cast<std::size_t>(letter_index(code))] += letter_sign(code);
  GroupWord out;
  for (int i = 0; i < rank; ++i) append_power(out, i, exps[static_cast<std::size_t>(i)]);
  return out;
}

GroupWord free_nf(const GroupWord& w) {
  GroupWord out;
  for (int code : w) {
    if (!out.empty() && out.back() == -code) {
      out.pop_back();
    } else {
      out.push_back(code);
    }
  }
  return out;
}

// Britton reduction for t a^m t^-1 = a^n, pushing powers of a to the right.
// Each a-exponent in front of t lies in [0, |n|), in front of t^-1 in
// [0, |m|); the trailing exponent is unrestricted.
GroupWord hnn_of_z_nf(long m, long n, const GroupWord& w) {
  std::vector<std::pair<long, int>> segments;  // (a-exponent, sign of t) pairs
  long trailing = 0;
  for (int code : w) {
    if (letter_index(code) == 0) {
      trailing += letter_sign(code);
      continue;
    }
    const int eps = letter_sign(code);
    if (!segments.empty() && segments.back().second == -eps) {
      const long prev = segments.back().first;
      if (eps == -1 && trailing % m == 0) {  // t a^{mk} t^-1 = a^{nk}
        trailing = prev + (trailing / m) * n;
        segments.pop_back();
        continue;
      }
      if (eps == 1 && trailing % n == 0) {  // t^-1 a^{nk} t = a^{mk}
        trailing = prev + (trailing / n) * m;
        segments.pop_back();
        continue;
      }
    }
    if (eps == 1) {
      auto [q, r] = floor_divmod(trailing, n);
      segments.emplace_back(r, 1);
      trailing = q * m;
    } else {
      auto [q, r] = floor_divmod(trailing, m);
      segments.emplace_back(r, -1);
      trailing = q * n;
    }
  }
  GroupWord out;
  for (const auto& [r, eps] : segments) {
    append_power(out, 0, r);
    out.push_back(eps * 2);
  }
  append_power(out, 0, trailing);
  return out;
}

std::vector<std::string> default_names(const GroupSpec& g) {
  if (g.kind == GroupSpec::Kind::HnnOfZ) return {"a", "t"};
  if (g.rank == 1) return {"a"};
  std::vector<std::string> names;
  const std::string first = g.kind == GroupSpec::Kind::Free ? "xyzw" : "abcd";
  for (int i = 0; i < g.rank; ++i) {
    names.push_back(g.rank <= 4 ? std::string(1, first[static_cast<std::size_t>(i)])
                                : "g" + std::to_string(i + 1));
  }
  return names;
}

void enumerate_words(int generators, int max_len, GroupWord& prefix,
                     const std::function<void(const GroupWord&)>& visit) {
  visit(prefix);
  if (static_cast<int>(prefix.size()) == max_len) return;
  for (int g = 1; g <= generators; ++g) {
    for (int s : {1, -1}) {
      prefix.push_back(s * g);
      enumerate_words(generators, max_len, prefix, visit);
      prefix.pop_back();
    }
  }
}

}  // namespace

GroupSpec GroupSpec::free_abelian(int rank) {
  GroupSpec g{Kind::FreeAbelian, rank, 1, 1, {}};
  g.generator_names = default_names(g);
  return g;
}

GroupSpec GroupSpec::free(int rank) {
  GroupSpec g{Kind::Free, rank, 1, 1, {}};
  g.generator_names = default_names(g);
  return g;
}

GroupSpec GroupSpec::hnn_of_z(int m, int n) {
  GroupSpec g{Kind::HnnOfZ, 2, m, n, {}};
  g.generator_names = default_names(g);
  return g;
}

std::string GroupSpec::describe() const {
  switch (kind) {
    case Kind::FreeAbelian:
      return "free-abelian(" + std::to_string(rank) + ")";
    case Kind::Free:
      return "free(" + std::to_string(rank) + ")";
    case Kind::HnnOfZ:
      return "hnn-of-Z(" + std::to_string(m) + "," + std::to_string(n) + ")";
  }
  return "?";
}

void GroupSpec::validate() const {
  if (kind == Kind::HnnOfZ) {
    if (m == 0 || n == 0) throw DomainError("hnn-of-Z parameters must be nonzero");
  } else if (rank < 1) {
    throw DomainError("group rank must be positive");
  }
  if (static_cast<int>(generator_names.size()) != generator_count()) {
    throw DomainError("group " + describe() + " needs " + std::to_string(generator_count()) +
                      " generator names");
  }
}

GroupWord normal_form(const GroupSpec& g, const GroupWord& w) {
  for (int code : w) {
    if (code == 0 || letter_index(code) >= g.generator_count()) {
      throw DomainError("letter code " + std::to_string(code) + " is not a generator of " + g.describe());
    }
  }
  switch (g.kind) {
    case GroupSpec::Kind::FreeAbelian:
      return free_abelian_nf(g.rank, w);
    case GroupSpec::Kind::Free:
      return free_nf(w);
    case GroupSpec::Kind::HnnOfZ:
      return hnn_of_z_nf(g.m, g.n, w);
  }
  return w;
}

GroupWord inverse_word(const GroupWord& w) {
  GroupWord out(w.rbegin(), w.rend());
  for (int& c : out) c = -c;
  return out;
}

Complex group_trace(const GroupWord& normal) { return normal.empty() ? 1.0 : 0.0; }

std::string format_group_word(const GroupSpec& g, const GroupWord& w) {
  if (w.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < w.size();) {
    const int gen = letter_index(w[i]);
    long exp = 0;
    std::size_t j = i;
    while (j < w.size() && letter_index(w[j]) == gen && letter_sign(w[j]) == letter_sign(w[i])) {
      exp += letter_sign(w[j]);
      ++j;
    }
    if (!first) os << "*";
    first = false;
    os << g.generator_names[static_cast<std::size_t>(gen)];
    if (exp != 1) os << "^" << exp;
    i = j;
  }
  return os.str();
}

GroupAlgebra::GroupAlgebra(GroupSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Terms GroupAlgebra::basis_product(const Basis& a, const Basis& b) const {
  GroupWord w = a;
  w.insert(w.end(), b.begin(), b.end());
  return {{normal_form(spec_, w), 1.0}};
}

std::pair<Basis, Complex> GroupAlgebra::basis_adjoint(const Basis& b) const {
  return {normal_form(spec_, inverse_word(b)), 1.0};
}

std::vector<std::pair<std::string, Basis>> GroupAlgebra::default_bindings() const {
  std::vector<std::pair<std::string, Basis>> out;
  for (int i = 0; i < spec_.generator_count(); ++i) {
    out.emplace_back(spec_.generator_names[static_cast<std::size_t>(i)], Basis{i + 1});
  }
  return out;
}

std::vector<Basis> GroupAlgebra::probe_basis() const {
  std::set<Basis> seen;
  if (spec_.kind == GroupSpec::Kind::FreeAbelian && spec_.rank == 1) {
    for (int k = -12; k <= 12; ++k) {
      GroupWord w;
      append_power(w, 0, k);
      seen.insert(w);
    }
  } else {
    GroupWord prefix;
    enumerate_words(spec_.generator_count(), 3, prefix,
                    [&](const GroupWord& w) { seen.insert(normal_form(spec_, w)); });
  }
  return {seen.begin(), seen.end()};
}

Terms GroupAlgebra::random_terms(Rng& rng) const {
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_int_distribution<int> len(0, 4);
  std::uniform_int_distribution<int> gen(1, spec_.generator_count());
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> coef(-2, 2);
  Terms out;
  const int k = nterms(rng);
  for (int i = 0; i < k; ++i) {
    GroupWord w;
    const int l = len(rng);
    for (int j = 0; j < l; ++j) w.push_back(coin(rng) ? gen(rng) : -gen(rng));
    Complex c(coef(rng), coef(rng));
    if (c == Complex{}) c = 1.0;
    out[normal_form(spec_, w)] += c;
  }
  return out;
}

State group_trace_state() {
  return State::from_basis("tau", [](const Basis& b) { return group_trace(b); });
}

std::string SubgroupSpec::describe(const GroupSpec& g) const {
  switch (kind) {
    case Kind::Trivial:
      return "{e}";
    case Kind::Multiples:
      return "<" + g.generator_names[0] + "^" + std::to_string(step) + ">";
    case Kind::Generators: {
      std::string s = "<";
      for (std::size_t i = 0; i < generators.size(); ++i) {
        if (i) s += ",";
        s += g.generator_names.at(static_cast<std::size_t>(generators[i]));
      }
      return s + ">";
    }
  }
  return "?";
}

bool in_subgroup(const GroupSpec& g, const SubgroupSpec& h, const GroupWord& normal) {
  switch (h.kind) {
    case SubgroupSpec::Kind::Trivial:
      return normal.empty();
    case SubgroupSpec::Kind::Multiples: {
      long exp = 0;
      for (int code : normal) {
        if (letter_index(code) != 0) return false;
        exp += letter_sign(code);
      }
      return exp % h.step == 0;
    }
    case SubgroupSpec::Kind::Generators:
      // Normal forms of free and free-abelian groups only use letters of the subgroup.
      (void)g;
      return std::all_of(normal.begin(), normal.end(), [&](int code) {
        return std::find(h.generators.begin(), h.generators.end(), letter_index(code)) != h.generators.end();
      });
  }
  return false;
}

namespace {

void check_supported(const GroupSpec& g, const SubgroupSpec& h) {
  switch (h.kind) {
    case SubgroupSpec::Kind::Trivial:
      return;
    case SubgroupSpec::Kind::Multiples:
      if (h.step == 0) throw UnsupportedOperation("subgroup <a^0> is the trivial subgroup; use trivial");
      if ((g.kind == GroupSpec::Kind::FreeAbelian && g.rank == 1) || g.kind == GroupSpec::Kind::HnnOfZ) return;
      throw UnsupportedOperation("cyclic-power subgroups are supported in Z and hnn-of-Z only, not in " +
                                 g.describe());
    case SubgroupSpec::Kind::Generators:
      if (g.kind == GroupSpec::Kind::HnnOfZ) {
        throw UnsupportedOperation("generator subgroups of " + g.describe() + " are not supported");
      }
      for (int i : h.generators) {
        if (i < 0 || i >= g.generator_count()) throw UnsupportedOperation("subgroup generator out of range");
      }
      return;
  }
}

}  // namespace

ConditionalExpectation subgroup_expectation(const GroupSpec& g, const SubgroupSpec& h) {
  check_supported(g, h);
  return ConditionalExpectation::from_basis_filter(
      "E_" + h.describe(g), "L(" + h.describe(g) + ")",
      [g, h](const Basis& b) { return in_subgroup(g, h, b); });
}

SubgroupSpec SubgroupMapSpec::image(const SubgroupSpec& domain) const {
  switch (kind) {
    case Kind::Identity:
      return domain;
    case Kind::Multiples:
      return SubgroupSpec::multiples(image_step);
    case Kind::GeneratorMap: {
      std::vector<int> gens;
      for (int d : domain.generators) {
        auto it = std::find_if(generator_map.begin(), generator_map.end(),
                               [d](const auto& p) { return p.first == d; });
        if (it == generator_map.end()) throw DomainError("generator map does not cover the subgroup");
        gens.push_back(it->second);
      }
      return SubgroupSpec::of_generators(gens);
    }
  }
  return domain;
}

Embedding subgroup_embedding(std::shared_ptr<const GroupAlgebra> algebra, const SubgroupSpec& domain,
                             const SubgroupMapSpec& map, std::string name) {
  const GroupSpec& g = algebra->spec();
  check_supported(g, domain);
  BackendPtr backend = algebra;
  switch (map.kind) {
    case SubgroupMapSpec::Kind::Identity:
      return Embedding::identity(std::move(name));
    case SubgroupMapSpec::Kind::Multiples: {
      if (domain.kind != SubgroupSpec::Kind::Multiples || map.image_step == 0) {
        throw DomainError("a multiples map needs a cyclic-power domain and a nonzero image step");
      }
      const long from = domain.step;
      const long to = map.image_step;
      auto rescale = [g, backend](long num, long den) {
        return [g, backend, num, den](const Basis& b) {
          long exp = 0;
          for (int code : b) {
            if (letter_index(code) != 0) throw DomainError("element outside the cyclic subgroup");
            exp += letter_sign(code);
          }
          if (exp % den != 0) throw DomainError("element outside the domain subgroup");
          GroupWord w;
          append_power(w, 0, exp / den * num);
          return AlgebraElement::basis(backend, normal_form(g, w));
        };
      };
      return Embedding::from_basis_maps(std::move(name), backend, rescale(to, from), rescale(from, to));
    }
    case SubgroupMapSpec::Kind::GeneratorMap: {
      if (domain.kind != SubgroupSpec::Kind::Generators) {
        throw DomainError("a generator map needs a generator-subset domain");
      }
      std::vector<int> fwd(static_cast<std::size_t>(g.generator_count()), -1);
      std::vector<int> inv(static_cast<std::size_t>(g.generator_count()), -1);
      for (const auto& [from, to] : map.generator_map) {
        if (from < 0 || to < 0 || from >= g.generator_count() || to >= g.generator_count()) {
          throw DomainError("generator map index out of range");
        }
        if (inv[static_cast<std::size_t>(to)] != -1) throw DomainError("generator map is not injective");
        fwd[static_cast<std::size_t>(from)] = to;
        inv[static_cast<std::size_t>(to)] = from;
      }
      auto relabel = [g, backend](std::vector<int> table) {
        return [g, backend, table](const Basis& b) {
          GroupWord w;
          for (int code : b) {
            const int target = table[static_cast<std::size_t>(letter_index(code))];
            if (target < 0) throw DomainError("element outside the domain subgroup");
            w.push_back(letter_sign(code) * (target + 1));
          }
          return AlgebraElement::basis(backend, normal_form(g, w));
        };
      };
      return Embedding::from_basis_maps(std::move(name), backend, relabel(fwd), relabel(inv));
    }
  }
  throw DomainError("unknown subgroup map");
}

}  // namespace hnn
