#pragma once

// Finite-dimensional multi-matrix algebras Mat(d_1) + ... + Mat(d_k) with
// density-matrix states, GNS-projection conditional expectations and the
// finite-dimensional modular calculus.
//
// Basis symbol (b, i, j) is the matrix unit e_ij of block b (0-based).

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hnn/algebra.h"

namespace hnn {

using Blocks = std::vector<Eigen::MatrixXcd>;

class MultiMatrixAlgebra : public Backend, public std::enable_shared_from_this<MultiMatrixAlgebra> {
 public:
  static constexpr int kDefaultDimensionCap = 4096;

  static std::shared_ptr<const MultiMatrixAlgebra> create(std::vector<int> block_dims,
                                                          int dimension_cap = kDefaultDimensionCap);

  const std::vector<int>& block_dims() const { return dims_; }
  // sum of d_i^2
  int dimension() const { return dimension_; }
  BackendPtr self() const { return shared_from_this(); }

  Blocks to_blocks(const AlgebraElement& x) const;
  AlgebraElement from_blocks(const Blocks& blocks) const;
  Blocks zero_blocks() const;
  Blocks identity_blocks() const;
  Eigen::VectorXcd to_vector(const AlgebraElement& x) const;
  AlgebraElement from_vector(const Eigen::VectorXcd& v) const;

  std::string id() const override;
  double zero_threshold() const override { return 1e-12; }
  Terms identity() const override;
  Terms basis_product(const Basis& a, const Basis& b) const override;
  std::pair<Basis, Complex> basis_adjoint(const Basis& b) const override { return {{b[0], b[2], b[1]}, 1.0}; }
  Terms multiply(const Terms& a, const Terms& b) const override;
  std::string format_basis(const Basis& b) const override;
  std::vector<std::pair<std::string, Basis>> default_bindings() const override;
  std::vector<Basis> probe_basis() const override;
  Terms random_terms(Rng& rng) const override;

 private:
  explicit MultiMatrixAlgebra(std::vector<int> dims);

  std::vector<int> dims_;
  int dimension_ = 0;
};

using MatrixAlgebraPtr = std::shared_ptr<const MultiMatrixAlgebra>;

// phi(x) = sum_b Tr(h_b x_b) with h = h* positive definite and phi(1) = 1.
class DensityState {
 public:
  DensityState(MatrixAlgebraPtr algebra, Blocks density);

  // Rescales a positive definite density to unit trace.
  static DensityState normalized(MatrixAlgebraPtr algebra, Blocks density);
  // Density of a linear functional: (h_b)_{jk} = phi(e^b_{kj}).
  static DensityState from_functional(MatrixAlgebraPtr algebra, const State& phi);
  // Tr / (d_1 + ... + d_k)
  static DensityState tracial(MatrixAlgebraPtr algebra);
  static DensityState random_faithful(MatrixAlgebraPtr algebra, Rng& rng);

  const MatrixAlgebraPtr& algebra() const { return algebra_; }
  const Blocks& density() const { return density_; }
  Complex evaluate(const AlgebraElement& x) const;
  State as_state(std::string name) const;

 private:
  MatrixAlgebraPtr algebra_;
  Blocks density_;
};

// Eigendecomposition h = U diag(lambda) U* per block, cached for h^{it}.
class ModularData {
 public:
  explicit ModularData(DensityState state);

  const DensityState& state() const { return state_; }
  // h^{i t}, computed as U diag(exp(i t ln lambda)) U*.
  Blocks imaginary_power(double t) const;
  double reconstruction_error() const { return reconstruction_error_; }

 private:
  DensityState state_;
  std::vector<Eigen::MatrixXcd> eigenvectors_;
  std::vector<Eigen::VectorXd> log_eigenvalues_;
  double reconstruction_error_ = 0.0;
};

// Orthogonal projection onto span(sub_basis) for <x, y> = phi(x* y), accepted
// only if it passes 50 seeded bimodule triples at tolerance 1e-9.
// Throws NotAnExpectation otherwise, and DomainError when sub_basis does not
// span a unital *-subalgebra.
ConditionalExpectation gns_expectation(MatrixAlgebraPtr algebra, const std::vector<AlgebraElement>& sub_basis,
                                       const DensityState& phi, std::uint64_t seed = 0);

// Throws DomainError unless span(sub_basis) contains 1 and is closed under
// products and adjoints.
void check_unital_star_subalgebra(const MultiMatrixAlgebra& algebra, const std::vector<AlgebraElement>& sub_basis);

// sigma_t(x) = h^{it} x h^{-it}
AlgebraElement modular_auto(const ModularData& phi, double t, const AlgebraElement& x);
AlgebraElement modular_auto(const DensityState& phi, double t, const AlgebraElement& x);

// [D phi : D psi]_t = h_phi^{it} h_psi^{-it}
AlgebraElement connes_cocycle(const ModularData& phi, const ModularData& psi, double t);
AlgebraElement connes_cocycle(const DensityState& phi, const DensityState& psi, double t);

// Linear map given on a basis of its domain subalgebra, with inverse on the image.
Embedding linear_embedding(MatrixAlgebraPtr algebra, const std::vector<AlgebraElement>& domain_basis,
                           const std::vector<AlgebraElement>& images, std::string name);

}  // namespace hnn
