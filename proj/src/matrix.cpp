#include "hnn/matrix.h"

#include <cmath>
#include <numeric>
#include <sstream>

namespace hnn {

namespace {

Blocks blocks_mul(const Blocks& a, const Blocks& b) {
  Blocks out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Blocks blocks_adjoint(const Blocks& a) {
  Blocks out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].adjoint();
  return out;
}

}  // namespace

MultiMatrixAlgebra::MultiMatrixAlgebra(std::vector<int> dims) : dims_(std::move(dims)) {
  for (int d : dims_) dimension_ += d * d;
}

std::shared_ptr<const MultiMatrixAlgebra> MultiMatrixAlgebra::create(std::vector<int> block_dims,
                                                                     int dimension_cap) {
  if (block_dims.empty()) throw DomainError("a multi-matrix algebra needs at least one block");
  int total = 0;
  for (int d : block_dims) {
    if (d < 1) throw DomainError("matrix block dimensions must be >= 1");
    total += d * d;
  }
  if (total > dimension_cap) {
    throw DomainError("multi-matrix algebra dimension " + std::to_string(total) + " exceeds the cap " +
                      std::to_string(dimension_cap));
  }
  return std::shared_ptr<const MultiMatrixAlgebra>(new MultiMatrixAlgebra(std::move(block_dims)));
}

std::string MultiMatrixAlgebra::id() const {
  std::string s = "matrix:[";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims_[i]);
  }
  return s + "]";
}

Blocks MultiMatrixAlgebra::zero_blocks() const {
  Blocks out;
  for (int d : dims_) out.push_back(Eigen::MatrixXcd::Zero(d, d));
  return out;
}

Blocks MultiMatrixAlgebra::identity_blocks() const {
  Blocks out;
  for (int d : dims_) out.push_back(Eigen::MatrixXcd::Identity(d, d));
  return out;
}

Blocks MultiMatrixAlgebra::to_blocks(const AlgebraElement& x) const {
  if (&x.backend() != this) throw BackendMismatch("element of " + x.backend().id() + " used in " + id());
  Blocks out = zero_blocks();
  for (const auto& [b, c] : x.terms()) out[static_cast<std::size_t>(b[0])](b[1], b[2]) = c;
  return out;
}

AlgebraElement MultiMatrixAlgebra::from_blocks(const Blocks& blocks) const {
  Terms t;
  for (std::size_t blk = 0; blk < blocks.size(); ++blk) {
    const auto& m = blocks[blk];
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        if (std::abs(m(i, j)) > zero_threshold()) t.emplace(Basis{static_cast<int>(blk), i, j}, m(i, j));
      }
    }
  }
  return AlgebraElement(self(), std::move(t));
}

Eigen::VectorXcd MultiMatrixAlgebra::to_vector(const AlgebraElement& x) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension_);
  std::vector<int> offsets(dims_.size(), 0);
  for (std::size_t i = 1; i < dims_.size(); ++i) offsets[i] = offsets[i - 1] + dims_[i - 1] * dims_[i - 1];
  for (const auto& [b, c] : x.terms()) {
    const auto blk = static_cast<std::size_t>(b[0]);
    v(offsets[blk] + b[1] * dims_[blk] + b[2]) = c;
  }
  return v;
}

AlgebraElement MultiMatrixAlgebra::from_vector(const Eigen::VectorXcd& v) const {
  Terms t;
  int k = 0;
  for (std::size_t blk = 0; blk < dims_.size(); ++blk) {
    for (int i = 0; i < dims_[blk]; ++i) {
      for (int j = 0; j < dims_[blk]; ++j, ++k) {
        if (std::abs(v(k)) > zero_threshold()) t.emplace(Basis{static_cast<int>(blk), i, j}, v(k));
      }
    }
  }
  return AlgebraElement(self(), std::move(t));
}

Terms MultiMatrixAlgebra::identity() const {
  Terms t;
  for (std::size_t blk = 0; blk < dims_.size(); ++blk) {
    for (int i = 0; i < dims_[blk]; ++i) t.emplace(Basis{static_cast<int>(blk), i, i}, 1.0);
  }
  return t;
}

Terms MultiMatrixAlgebra::basis_product(const Basis& a, const Basis& b) const {
  if (a[0] != b[0] || a[2] != b[1]) return {};
  return {{Basis{a[0], a[1], b[2]}, 1.0}};
}

Terms MultiMatrixAlgebra::multiply(const Terms& a, const Terms& b) const {
  // Sparse operands (typical for matrix units) are cheaper through the basis rule.
  if (a.size() * b.size() <= 64) return Backend::multiply(a, b);
  Blocks x = to_blocks(AlgebraElement(self(), a));
  Blocks y = to_blocks(AlgebraElement(self(), b));
  return from_blocks(blocks_mul(x, y)).terms();
}

std::string MultiMatrixAlgebra::format_basis(const Basis& b) const {
  return "e" + std::to_string(b[0] + 1) + "_" + std::to_string(b[1] + 1) + "_" + std::to_string(b[2] + 1);
}

std::vector<std::pair<std::string, Basis>> MultiMatrixAlgebra::default_bindings() const {
  std::vector<std::pair<std::string, Basis>> out;
  for (const Basis& b : probe_basis()) out.emplace_back(format_basis(b), b);
  return out;
}

std::vector<Basis> MultiMatrixAlgebra::probe_basis() const {
  std::vector<Basis> out;
  for (std::size_t blk = 0; blk < dims_.size(); ++blk) {
    for (int i = 0; i < dims_[blk]; ++i) {
      for (int j = 0; j < dims_[blk]; ++j) out.push_back({static_cast<int>(blk), i, j});
    }
  }
  return out;
}

Terms MultiMatrixAlgebra::random_terms(Rng& rng) const {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Terms t;
  for (const Basis& b : probe_basis()) t.emplace(b, Complex(coef(rng), coef(rng)));
  return t;
}

DensityState::DensityState(MatrixAlgebraPtr algebra, Blocks density)
    : algebra_(std::move(algebra)), density_(std::move(density)) {
  const auto& dims = algebra_->block_dims();
  if (density_.size() != dims.size()) throw DomainError("density has the wrong number of blocks");
  Complex trace{};
  for (std::size_t b = 0; b < dims.size(); ++b) {
    const auto& h = density_[b];
    if (h.rows() != dims[b] || h.cols() != dims[b]) throw DomainError("density block has the wrong shape");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("density is not self-adjoint");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.eigenvalues().minCoeff() <= 1e-12) {
      throw DomainError("density is not faithful: eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
    trace += h.trace();
  }
  if (std::abs(trace - 1.0) > 1e-12) throw DomainError("density does not have unit trace");
}

DensityState DensityState::normalized(MatrixAlgebraPtr algebra, Blocks density) {
  Complex trace{};
  for (const auto& h : density) trace += h.trace();
  if (std::abs(trace.imag()) > 1e-12 || trace.real() <= 0.0) throw DomainError("density has nonpositive trace");
  for (auto& h : density) h /= trace.real();
  return DensityState(std::move(algebra), std::move(density));
}

DensityState DensityState::from_functional(MatrixAlgebraPtr algebra, const State& phi) {
  Blocks h = algebra->zero_blocks();
  for (const Basis& b : algebra->probe_basis()) {
    // phi(e_kj) = (h)_{jk}
    h[static_cast<std::size_t>(b[0])](b[2], b[1]) = phi.evaluate(AlgebraElement::basis(algebra->self(), b));
  }
  // Remove the rounding asymmetry before the self-adjointness check.
  for (auto& blk : h) blk = (0.5 * (blk + blk.adjoint())).eval();
  return DensityState(std::move(algebra), std::move(h));
}

DensityState DensityState::tracial(MatrixAlgebraPtr algebra) {
  const auto& dims = algebra->block_dims();
  const double total = std::accumulate(dims.begin(), dims.end(), 0.0);
  Blocks h = algebra->identity_blocks();
  for (auto& blk : h) blk /= total;
  return DensityState(std::move(algebra), std::move(h));
}

DensityState DensityState::random_faithful(MatrixAlgebraPtr algebra, Rng& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Blocks h;
  for (int d : algebra->block_dims()) {
    Eigen::MatrixXcd a(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) = Complex(coef(rng), coef(rng));
    }
    h.push_back(a * a.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(d, d));
  }
  return normalized(std::move(algebra), std::move(h));
}

Complex DensityState::evaluate(const AlgebraElement& x) const {
  Complex sum{};
  for (const auto& [b, c] : x.terms()) sum += c * density_[static_cast<std::size_t>(b[0])](b[2], b[1]);
  return sum;
}

State DensityState::as_state(std::string name) const {
  DensityState copy = *this;
  return State(std::move(name), [copy](const AlgebraElement& x) { return copy.evaluate(x); });
}

ModularData::ModularData(DensityState state) : state_(std::move(state)) {
  for (const auto& h : state_.density()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
    const Eigen::VectorXd& lambda = es.eigenvalues();
    if (lambda.minCoeff() <= 1e-12) throw DomainError("density is not faithful");
    eigenvectors_.push_back(es.eigenvectors());
    log_eigenvalues_.push_back(lambda.array().log().matrix());
    const Eigen::MatrixXcd rebuilt =
        es.eigenvectors() * lambda.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    reconstruction_error_ = std::max(reconstruction_error_, (h - rebuilt).cwiseAbs().maxCoeff());
  }
  if (reconstruction_error_ > 1e-10) throw DomainError("density eigendecomposition is inaccurate");
}

Blocks ModularData::imaginary_power(double t) const {
  Blocks out;
  for (std::size_t b = 0; b < eigenvectors_.size(); ++b) {
    Eigen::VectorXcd phases(log_eigenvalues_[b].size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, t * log_eigenvalues_[b](k));
    out.push_back(eigenvectors_[b] * phases.asDiagonal() * eigenvectors_[b].adjoint());
  }
  return out;
}

namespace {

Eigen::MatrixXcd columns_of(const MultiMatrixAlgebra& algebra, const std::vector<AlgebraElement>& elems) {
  Eigen::MatrixXcd m(algebra.dimension(), static_cast<Eigen::Index>(elems.size()));
  for (std::size_t k = 0; k < elems.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = algebra.to_vector(elems[k]);
  return m;
}

double span_residual(const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>& qr, const Eigen::MatrixXcd& basis,
                     const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd c = qr.solve(v);
  return (basis * c - v).cwiseAbs().maxCoeff();
}

}  // namespace

void check_unital_star_subalgebra(const MultiMatrixAlgebra& algebra, const std::vector<AlgebraElement>& sub_basis) {
  if (sub_basis.empty()) throw DomainError("empty subalgebra basis");
  const Eigen::MatrixXcd basis = columns_of(algebra, sub_basis);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis);
  if (qr.rank() != basis.cols()) throw DomainError("subalgebra basis is linearly dependent");
  const double tol = 1e-9;
  const AlgebraElement one = AlgebraElement::one(algebra.self());
  if (span_residual(qr, basis, algebra.to_vector(one)) > tol) throw DomainError("subalgebra does not contain 1");
  for (const auto& x : sub_basis) {
    if (span_residual(qr, basis, algebra.to_vector(adjoint(x))) > tol) {
      throw DomainError("subalgebra is not closed under adjoints");
    }
    for (const auto& y : sub_basis) {
      if (span_residual(qr, basis, algebra.to_vector(x * y)) > tol) {
        throw DomainError("subalgebra is not closed under products");
      }
    }
  }
}

ConditionalExpectation gns_expectation(MatrixAlgebraPtr algebra, const std::vector<AlgebraElement>& sub_basis,
                                       const DensityState& phi, std::uint64_t seed) {
  check_unital_star_subalgebra(*algebra, sub_basis);
  const auto r = static_cast<Eigen::Index>(sub_basis.size());
  Eigen::MatrixXcd gram(r, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index l = 0; l < r; ++l) {
      gram(k, l) = phi.evaluate(adjoint(sub_basis[static_cast<std::size_t>(k)]) * sub_basis[static_cast<std::size_t>(l)]);
    }
  }
  const Eigen::MatrixXcd gram_inv = gram.inverse();
  const Eigen::MatrixXcd basis = columns_of(*algebra, sub_basis);

  // Projection matrix on coefficient vectors, built column by column from matrix units.
  Eigen::MatrixXcd projection(algebra->dimension(), algebra->dimension());
  const auto units = algebra->probe_basis();
  for (std::size_t u = 0; u < units.size(); ++u) {
    const AlgebraElement e = AlgebraElement::basis(algebra, units[u]);
    Eigen::VectorXcd rhs(r);
    for (Eigen::Index k = 0; k < r; ++k) rhs(k) = phi.evaluate(adjoint(sub_basis[static_cast<std::size_t>(k)]) * e);
    projection.col(static_cast<Eigen::Index>(u)) = basis * (gram_inv * rhs);
  }

  auto action = [algebra, projection](const AlgebraElement& x) {
    return algebra->from_vector(projection * algebra->to_vector(x));
  };

  Rng rng(seed);
  for (int i = 0; i < 50; ++i) {
    const AlgebraElement x = AlgebraElement::random(algebra, rng);
    const AlgebraElement d1 = action(AlgebraElement::random(algebra, rng));
    const AlgebraElement d2 = action(AlgebraElement::random(algebra, rng));
    const AlgebraElement lhs = action(d1 * x * d2);
    const AlgebraElement rhs = d1 * action(x) * d2;
    const double scale = std::max(1.0, std::max(lhs.max_abs(), rhs.max_abs()));
    if (distance(lhs, rhs) > 1e-9 * scale) {
      std::ostringstream os;
      os << "GNS projection fails the bimodule test (error " << distance(lhs, rhs)
         << "); the subalgebra is not invariant under the modular group of the state";
      throw NotAnExpectation(os.str());
    }
  }
  return ConditionalExpectation("E^phi", "span of " + std::to_string(sub_basis.size()) + " elements",
                                std::move(action));
}

AlgebraElement modular_auto(const ModularData& phi, double t, const AlgebraElement& x) {
  const auto& algebra = phi.state().algebra();
  const Blocks u = phi.imaginary_power(t);
  return algebra->from_blocks(blocks_mul(blocks_mul(u, algebra->to_blocks(x)), blocks_adjoint(u)));
}

AlgebraElement modular_auto(const DensityState& phi, double t, const AlgebraElement& x) {
  return modular_auto(ModularData(phi), t, x);
}

AlgebraElement connes_cocycle(const ModularData& phi, const ModularData& psi, double t) {
  if (phi.state().algebra() != psi.state().algebra()) throw BackendMismatch("cocycle of states on different algebras");
  return phi.state().algebra()->from_blocks(blocks_mul(phi.imaginary_power(t), blocks_adjoint(psi.imaginary_power(t))));
}

AlgebraElement connes_cocycle(const DensityState& phi, const DensityState& psi, double t) {
  return connes_cocycle(ModularData(phi), ModularData(psi), t);
}

Embedding linear_embedding(MatrixAlgebraPtr algebra, const std::vector<AlgebraElement>& domain_basis,
                           const std::vector<AlgebraElement>& images, std::string name) {
  if (domain_basis.size() != images.size() || domain_basis.empty()) {
    throw DomainError("embedding " + name + " needs one image per domain basis element");
  }
  const Eigen::MatrixXcd from = columns_of(*algebra, domain_basis);
  const Eigen::MatrixXcd to = columns_of(*algebra, images);
  auto make = [algebra](Eigen::MatrixXcd src, Eigen::MatrixXcd dst, std::string what) {
    auto qr = std::make_shared<Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>>(src);
    if (qr->rank() != src.cols()) throw DomainError(what + " basis is linearly dependent");
    return [algebra, qr, src, dst, what](const AlgebraElement& x) {
      const Eigen::VectorXcd v = algebra->to_vector(x);
      const Eigen::VectorXcd c = qr->solve(v);
      const double residual = (src * c - v).cwiseAbs().maxCoeff();
      if (residual > 1e-8 * std::max(1.0, v.cwiseAbs().maxCoeff())) {
        throw DomainError("element outside the " + what + " of the embedding");
      }
      return algebra->from_vector(dst * c);
    };
  };
  return Embedding(name, make(from, to, "domain"), make(to, from, "image"));
}

}  // namespace hnn
