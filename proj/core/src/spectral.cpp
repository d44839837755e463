#include "delayflock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "delayflock/errors.hpp"
#include "delayflock/metrics.hpp"

namespace delayflock {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input, double rel_tol) {
  if (input.rows() != input.cols()) throw ContractError("jacobi_eigen: matrix must be square");
  const std::size_t n = input.rows();
  const double scale = std::fmax(1.0, input.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(input(i, j) - input(j, i)) > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "jacobi_eigen: asymmetric input at (" << i << ", " << j << ")";
        throw ContractError(msg.str());
      }

  Matrix a = input;
  // Work on the exactly symmetric part.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mean = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = mean;
      a(j, i) = mean;
    }
  Matrix vectors = Matrix::identity(n);
  const double target = rel_tol * a.frobenius_norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (++sweep > kMaxSweeps) throw ConvergenceError("jacobi_eigen: no convergence");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = arp - s * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + s * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = vectors(r, p);
          const double vrq = vectors(r, q);
          vectors(r, p) = vrp - s * (vrq + tau * vrp);
          vectors(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = vectors(r, order[k]);
  }
  return out;
}

std::vector<double> eigenvalues_sym(const Matrix& a) { return jacobi_eigen(a).values; }

Matrix laplacian_from_weights(const Matrix& w, double lambda) {
  if (w.rows() != w.cols()) throw ContractError("laplacian: weight matrix must be square");
  const std::size_t n = w.rows();
  const double scale = lambda / static_cast<double>(n);
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      l(i, j) = -scale * w(i, j);
      diag += scale * w(i, j);
    }
    l(i, i) = diag;
  }
  return l;
}

Matrix laplacian(const ModelParams& params, const Matrix& x) {
  if (!is_symmetric(params.variant))
    throw ContractError("laplacian: requires a symmetric weight variant");
  ModelParams sym = params;
  sym.variant = ModelVariant::main_delay;  // plain psi_ij weights
  return laplacian_from_weights(weight_matrix(sym, x), params.lambda);
}

FiedlerResult fiedler(const Matrix& l) {
  if (l.rows() < 2) throw ContractError("fiedler: need at least two agents");
  const std::vector<double> values = eigenvalues_sym(l);
  FiedlerResult out;
  out.mu = std::fmax(0.0, values[1]);
  out.degenerate = !(values[1] >= 1e-10 * l.frobenius_norm()) || l.frobenius_norm() == 0.0;
  return out;
}

Matrix augment_diagonal(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractError("augment_diagonal: matrix must be square");
  const std::size_t n = a.rows();
  Matrix out = a;
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += a(i, j);
    out(i, i) = static_cast<double>(n) - off;
  }
  return out;
}

double psi_star_empirical(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractError("psi_star_empirical: matrix must be square");
  const std::size_t n = a.rows();
  const double inv_n2 = 1.0 / static_cast<double>(n * n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          s += std::fmin(a(q, i) * a(p, j), a(q, j) * a(p, i));
      best = std::fmin(best, s * inv_n2);
    }
  return best;
}

StructuralCertificate structural_certificate(std::span<const DiagnosticsRow> rows,
                                             double seed_mu_min, double seed_psi_star_min) {
  StructuralCertificate cert;
  cert.gamma_emp = seed_mu_min;
  cert.psi_star_emp = seed_psi_star_min;
  for (const DiagnosticsRow& row : rows) {
    cert.gamma_emp = std::fmin(cert.gamma_emp, row.mu);
    cert.psi_star_emp = std::fmin(cert.psi_star_emp, row.psi_star);
    cert.sample_times.push_back(row.t);
  }
  return cert;
}

}  // namespace delayflock
