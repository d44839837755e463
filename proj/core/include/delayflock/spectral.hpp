#pragma once

#include <span>
#include <vector>

#include "delayflock/matrix.hpp"
#include "delayflock/model.hpp"

namespace delayflock {

struct DiagnosticsRow;

// Eigen-decomposition of a real symmetric matrix. values ascend; column k of
// vectors is the unit eigenvector for values[k].
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
// rel_tol * ||A||_F. Throws ContractError for asymmetric input (beyond 1e-12,
// relative to max(1, max|a_ij|)) and ConvergenceError if sweeps run out.
SymmetricEigen jacobi_eigen(const Matrix& a, double rel_tol = 1e-12);

std::vector<double> eigenvalues_sym(const Matrix& a);

// L_ij = -(lambda/N) w_ij (i != j), L_ii = (lambda/N) sum_{j != i} w_ij.
Matrix laplacian_from_weights(const Matrix& w, double lambda);

// Weighted Laplacian of the symmetric communication weights at positions x.
// Throws ContractError for the nonsymmetric variant.
Matrix laplacian(const ModelParams& params, const Matrix& x);

struct FiedlerResult {
  double mu = 0.0;
  // Second eigenvalue below 1e-10 ||L||: the graph is numerically disconnected.
  bool degenerate = false;
};

FiedlerResult fiedler(const Matrix& laplacian);

// a_ii := N - sum_{j != i} a_ij, so every row sums to N.
Matrix augment_diagonal(const Matrix& a);

// min over (p, q) of (1/N^2) sum_{i,j} min(a_qi a_pj, a_qj a_pi), on a
// diagonal-augmented weight matrix. O(N^4).
double psi_star_empirical(const Matrix& augmented);

struct StructuralCertificate {
  double gamma_emp = 0.0;     // min sampled Fiedler number
  double psi_star_emp = 0.0;  // min sampled pairwise min-sum quantity
  std::vector<double> sample_times;
};

// Minima over the sampled rows plus the seed-segment minima (the delayed
// weights reach back to t = -tau(0)).
StructuralCertificate structural_certificate(std::span<const DiagnosticsRow> rows,
                                             double seed_mu_min, double seed_psi_star_min);

}  // namespace delayflock
