#include "hnn/scenario_config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "hnn/expression.h"
#include "hnn/group.h"
#include "hnn/matrix.h"
#include "hnn/torus.h"

namespace hnn {

using nlohmann::json;

namespace {

using Bindings = std::vector<std::pair<std::string, AlgebraElement>>;

[[noreturn]] void bad(const std::string& msg) { throw ScenarioError("config: " + msg); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + " needs \"" + key + "\"");
  return j.at(key);
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad("expected a number or an [re, im] pair, got " + j.dump());
}

ConditionalExpectation renamed(std::string name, const ConditionalExpectation& e) {
  return ConditionalExpectation(std::move(name), e.range(), [e](const AlgebraElement& x) { return e.apply(x); });
}

std::string theta_name(std::size_t i) { return "t" + std::to_string(i + 1); }

void expect_trace_preserving(const json& config) {
  if (!config.contains("expectations")) return;
  const json& e = config["expectations"];
  if (!(e.is_string() && e.get<std::string>() == "trace-preserving")) {
    bad("symbolic backends only support \"expectations\": \"trace-preserving\"");
  }
}

void expect_trace_reference(const json& config) {
  if (!config.contains("reference_state")) return;
  const json& r = config["reference_state"];
  if (!(r.is_string() && r.get<std::string>() == "trace")) {
    bad("symbolic backends only support \"reference_state\": \"trace\"");
  }
}

// ---- group ----

int generator_index(const GroupSpec& g, const json& j) {
  if (j.is_number_integer()) {
    const int i = j.get<int>();
    if (i < 0 || i >= g.generator_count()) bad("generator index out of range: " + j.dump());
    return i;
  }
  const auto name = j.get<std::string>();
  for (std::size_t i = 0; i < g.generator_names.size(); ++i) {
    if (g.generator_names[i] == name) return static_cast<int>(i);
  }
  bad("unknown generator '" + name + "' in " + g.describe());
}

SubgroupSpec parse_subgroup(const GroupSpec& g, const json& j) {
  const auto kind = need(j, "subgroup", "D").get<std::string>();
  if (kind == "trivial") return SubgroupSpec::trivial();
  if (kind == "multiples") return SubgroupSpec::multiples(need(j, "step", "D").get<int>());
  if (kind == "generators") {
    std::vector<int> gens;
    for (const auto& x : need(j, "generators", "D")) gens.push_back(generator_index(g, x));
    return SubgroupSpec::of_generators(std::move(gens));
  }
  bad("unknown subgroup kind '" + kind + "'");
}

SubgroupMapSpec parse_subgroup_map(const GroupSpec& g, const json& j) {
  SubgroupMapSpec m;
  const auto kind = j.value("map", std::string("identity"));
  if (kind == "identity") return m;
  if (kind == "multiples") {
    m.kind = SubgroupMapSpec::Kind::Multiples;
    m.image_step = need(j, "image_step", "theta").get<int>();
    return m;
  }
  if (kind == "generators") {
    m.kind = SubgroupMapSpec::Kind::GeneratorMap;
    for (const auto& [from, to] : need(j, "pairs", "theta").items()) {
      m.generator_map.emplace_back(generator_index(g, json(from)), generator_index(g, to));
    }
    return m;
  }
  bad("unknown theta map '" + kind + "'");
}

// ---- matrix literals ----

Eigen::MatrixXcd parse_matrix(const json& j) {
  if (j.is_array()) {
    if (j.empty() || !j[0].is_array()) bad("matrix rows must be arrays: " + j.dump());
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const json& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) bad("ragged matrix: " + j.dump());
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
    }
    return m;
  }
  if (j.is_object() && j.contains("diag")) {
    const json& d = j["diag"];
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = parse_complex(d[i]);
    return m;
  }
  if (j.is_object() && j.contains("identity")) {
    const int d = j["identity"].get<int>();
    return Eigen::MatrixXcd::Identity(d, d);
  }
  if (j.is_object() && j.contains("zero")) {
    const int d = j["zero"].get<int>();
    return Eigen::MatrixXcd::Zero(d, d);
  }
  if (j.is_object() && j.contains("kron")) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& f : j["kron"]) {
      const Eigen::MatrixXcd b = parse_matrix(f);
      Eigen::MatrixXcd out(acc.rows() * b.rows(), acc.cols() * b.cols());
      for (Eigen::Index r = 0; r < acc.rows(); ++r) {
        for (Eigen::Index c = 0; c < acc.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = acc(r, c) * b;
      }
      acc = std::move(out);
    }
    return acc;
  }
  bad("unrecognized matrix literal: " + j.dump());
}

AlgebraElement parse_element(const json& j, const BackendPtr& backend, const Bindings& bindings) {
  if (j.is_string()) {
    try {
      return evaluate_base(*parse_expression(j.get<std::string>()), backend, base_bindings(backend, bindings));
    } catch (const ParseError& e) {
      bad("element \"" + j.get<std::string>() + "\": " + e.what());
    }
  }
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
    return AlgebraElement::scalar(backend, parse_complex(j));
  }
  auto alg = std::dynamic_pointer_cast<const MultiMatrixAlgebra>(backend);
  if (!alg) bad("element literal " + j.dump() + " needs a matrix backend; use an expression string");
  Blocks blocks = alg->zero_blocks();
  if (j.is_object() && j.contains("blocks")) {
    const json& bl = j["blocks"];
    if (bl.size() != blocks.size()) bad("element has " + std::to_string(bl.size()) + " blocks, algebra has " + std::to_string(blocks.size()));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (bl[i].is_null()) continue;
      blocks[i] = parse_matrix(bl[i]);
    }
  } else {
    if (blocks.size() != 1) bad("multi-block elements need {\"blocks\": [...]}");
    blocks[0] = parse_matrix(j);
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const int d = alg->block_dims()[i];
    if (blocks[i].rows() != d || blocks[i].cols() != d) {
      bad("block " + std::to_string(i + 1) + " must be " + std::to_string(d) + "x" + std::to_string(d));
    }
  }
  return alg->from_blocks(blocks);
}

DensityState parse_density(const MatrixAlgebraPtr& alg, const json& j, const Bindings& bindings) {
  if (j.is_string() && j.get<std::string>() == "tracial") return DensityState::tracial(alg);
  try {
    return DensityState::normalized(alg, alg->to_blocks(parse_element(j, alg, bindings)));
  } catch (const DomainError& e) {
    bad(std::string("density: ") + e.what());
  }
}

Bindings parse_bindings(const json& config, const BackendPtr& backend) {
  Bindings out;
  if (!config.contains("bindings")) return out;
  for (const auto& [name, spec] : config["bindings"].items()) {
    if (name.size() >= 2 && name[0] == 't' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      bad("binding '" + name + "' shadows a stable letter");
    }
    out.emplace_back(name, parse_element(spec, backend, out));
  }
  return out;
}

// ---- per backend ----

void build_group(const json& config, ScenarioParts& parts) {
  const GroupSpec g = parse_group_spec(need(need(config, "backend", "config"), "group", "group backend"));
  auto alg = std::make_shared<const GroupAlgebra>(g);
  parts.base = alg;
  expect_trace_preserving(config);
  expect_trace_reference(config);
  const SubgroupSpec d = parse_subgroup(g, need(config, "D", "config"));
  parts.e_d = renamed("E_D", subgroup_expectation(g, d));
  const json& thetas = need(config, "thetas", "config");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const SubgroupMapSpec m = parse_subgroup_map(g, thetas[i]);
    const std::string name = theta_name(i);
    parts.thetas.push_back({name, subgroup_embedding(alg, d, m, name),
                            renamed("E_" + name + "(D)", subgroup_expectation(g, m.image(d)))});
  }
  parts.phi = group_trace_state();
  parts.trace = group_trace_state();
}

RotationAngle parse_alpha(const json& j) {
  if (j.is_number()) return RotationAngle::real(j.get<double>());
  if (j.is_object() && j.contains("p")) return RotationAngle::rational(j["p"].get<long>(), need(j, "q", "alpha").get<long>());
  if (j.is_object() && j.contains("real")) return RotationAngle::real(j["real"].get<double>());
  bad("alpha must be a number, {\"p\", \"q\"} or {\"real\"}");
}

Basis parse_monomial(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("monomial exponents must be [n, m]: " + j.dump());
  return {j[0].get<int>(), j[1].get<int>()};
}

void build_torus(const json& config, ScenarioParts& parts) {
  auto alg = std::make_shared<const RotationAlgebra>(parse_alpha(need(need(config, "backend", "config"), "alpha", "torus backend")));
  parts.base = alg;
  expect_trace_preserving(config);
  expect_trace_reference(config);
  const Basis d = parse_monomial(need(need(config, "D", "config"), "monomial", "D"));
  parts.e_d = renamed("E_D", monomial_expectation(d[0], d[1]));
  const json& thetas = need(config, "thetas", "config");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const Basis img = parse_monomial(need(thetas[i], "image", "theta"));
    const std::string name = theta_name(i);
    parts.thetas.push_back({name, monomial_embedding(alg, d, img, name),
                            renamed("E_" + name + "(D)", monomial_expectation(img[0], img[1]))});
  }
  parts.phi = torus_trace_state();
  parts.trace = torus_trace_state();
}

void build_matrix(const json& config, ScenarioParts& parts, const Bindings& bindings) {
  auto alg = std::dynamic_pointer_cast<const MultiMatrixAlgebra>(parts.base);

  std::optional<DensityState> state;
  if (config.contains("state")) state = parse_density(alg, config["state"], bindings);

  std::vector<AlgebraElement> d_basis;
  for (const auto& e : need(need(config, "D", "config"), "basis", "D")) d_basis.push_back(parse_element(e, alg, bindings));

  const json expectations = config.value("expectations", json("state-preserving"));
  auto state_for = [&](const json* entry) -> DensityState {
    if (entry && entry->is_object() && entry->contains("state")) return parse_density(alg, (*entry)["state"], bindings);
    if (!state) bad("state-preserving expectations need \"state\"");
    return *state;
  };
  const json* d_entry = nullptr;
  const json* theta_entries = nullptr;
  if (expectations.is_object()) {
    if (expectations.contains("D")) d_entry = &expectations["D"];
    if (expectations.contains("thetas")) theta_entries = &expectations["thetas"];
  } else if (!(expectations.is_string() && expectations.get<std::string>() == "state-preserving")) {
    bad("matrix backends support \"state-preserving\" expectations or a per-map object");
  }

  const std::uint64_t seed = parts.options.seed;
  auto gns = [&](const std::string& name, const std::vector<AlgebraElement>& basis, const DensityState& w) {
    try {
      return renamed(name, gns_expectation(alg, basis, w, seed));
    } catch (const NotAnExpectation& e) {
      bad(name + ": " + e.what());
    } catch (const DomainError& e) {
      bad(name + ": " + e.what());
    }
  };
  parts.e_d = gns("E_D", d_basis, state_for(d_entry));

  const json& thetas = need(config, "thetas", "config");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const std::string name = theta_name(i);
    std::vector<AlgebraElement> images;
    for (const auto& e : need(thetas[i], "images", "theta")) images.push_back(parse_element(e, alg, bindings));
    Embedding map = [&] {
      try {
        return linear_embedding(alg, d_basis, images, name);
      } catch (const DomainError& e) {
        bad(name + ": " + e.what());
      }
    }();
    const json* entry = theta_entries && i < theta_entries->size() ? &(*theta_entries)[i] : nullptr;
    parts.thetas.push_back({name, std::move(map), gns("E_" + name + "(D)", images, state_for(entry))});
  }

  const json reference = config.value("reference_state", json("state"));
  if (reference.is_string() && reference.get<std::string>() == "state") {
    if (!state) bad("reference_state \"state\" needs \"state\"");
    parts.phi = state->as_state("phi");
  } else {
    parts.phi = parse_density(alg, reference, bindings).as_state("phi");
  }

  const json trace = config.value("trace", json("tracial"));
  if (!trace.is_null()) parts.trace = parse_density(alg, trace, bindings).as_state("tau");
}

}  // namespace

GroupSpec parse_group_spec(const json& j) {
  const auto kind = need(j, "kind", "group").get<std::string>();
  GroupSpec g;
  if (kind == "free-abelian") {
    g = GroupSpec::free_abelian(j.value("rank", 1));
  } else if (kind == "free") {
    g = GroupSpec::free(j.value("rank", 2));
  } else if (kind == "hnn-of-Z") {
    g = GroupSpec::hnn_of_z(need(j, "m", "hnn-of-Z").get<int>(), need(j, "n", "hnn-of-Z").get<int>());
  } else {
    bad("unknown group kind '" + kind + "'");
  }
  if (j.contains("generators")) g.generator_names = j["generators"].get<std::vector<std::string>>();
  try {
    g.validate();
  } catch (const DomainError& e) {
    bad(e.what());
  }
  return g;
}

ScenarioPtr load_scenario(const json& config, const LoadOptions& opts) {
  try {
    if (!config.is_object()) bad("top level must be an object");
    ScenarioParts parts{config.value("name", std::string("scenario")), nullptr,
                        ConditionalExpectation("E_D", "", nullptr), {},
                        State("phi", nullptr), std::nullopt, std::nullopt, {}, {}};
    parts.options.seed = opts.seed.value_or(config.value("seed", std::uint64_t{0}));
    parts.options.term_cap = config.value("term_cap", parts.options.term_cap);
    if (const char* env = std::getenv("HNN_TERM_CAP")) {
      char* end = nullptr;
      const unsigned long long cap = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0' || cap == 0) bad(std::string("HNN_TERM_CAP must be a positive integer, got '") + env + "'");
      parts.options.term_cap = cap;
    }
    if (opts.term_cap) parts.options.term_cap = *opts.term_cap;
    if (config.contains("validation")) {
      parts.options.validation_samples = config["validation"].value("samples", parts.options.validation_samples);
      parts.options.validation_tolerance = config["validation"].value("tolerance", parts.options.validation_tolerance);
    }

    const auto kind = need(need(config, "backend", "config"), "kind", "backend").get<std::string>();
    if (kind == "group") {
      build_group(config, parts);
    } else if (kind == "torus") {
      build_torus(config, parts);
    } else if (kind == "matrix") {
      // Matrix literals in bindings need the algebra first.
      const json& backend = config["backend"];
      try {
        parts.base = MultiMatrixAlgebra::create(need(backend, "blocks", "matrix backend").get<std::vector<int>>(),
                                                backend.value("dimension_cap", MultiMatrixAlgebra::kDefaultDimensionCap));
      } catch (const DomainError& e) {
        bad(e.what());
      }
      const Bindings early = parse_bindings(config, parts.base);
      build_matrix(config, parts, early);
    } else {
      bad("unknown backend kind '" + kind + "'");
    }
    if (parts.thetas.empty()) bad("\"thetas\" must list at least one embedding");

    parts.bindings = parse_bindings(config, parts.base);
    if (config.contains("oracle")) parts.group_oracle = parse_group_spec(config["oracle"]);
    return Scenario::create(std::move(parts));
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("config: ") + e.what());
  } catch (const UnsupportedOperation& e) {
    throw ScenarioError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ScenarioError(std::string("config: ") + e.what());
  }
}

ScenarioPtr load_scenario_file(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError("scenario file '" + path + "': " + e.what());
  }
  return load_scenario(config, opts);
}

}  // namespace hnn
