#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delayflock/matrix.hpp"

namespace delayflock {

enum class PotentialKind { cucker_smale, constant, table };

// Communication potential psi(s) of the inter-agent distance s.
//
// Every constructed potential satisfies 0 < psi(s) <= 1 for s > 0 (the unit
// upper bound is enforced, never rescaled silently). The Cucker-Smale kernel
// (1 + s^2)^(-beta) has psi(0) = 1 and is nonincreasing; table potentials
// interpolate linearly between (distance, weight) samples and hold the end
// values outside the sampled range.
class Potential {
 public:
  static Potential cucker_smale(double beta);
  static Potential constant(double psi0);
  static Potential table(std::vector<std::pair<double, double>> samples);

  PotentialKind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }
  double psi0() const noexcept { return psi0_; }
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

  // Greatest lower bound of psi over [0, inf). Zero for a decaying kernel.
  double lower_bound() const noexcept;
  double upper_bound() const noexcept;

  double operator()(double s) const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Potential() = default;

  PotentialKind kind_ = PotentialKind::constant;
  double beta_ = 0.0;
  double psi0_ = 1.0;
  std::vector<std::pair<double, double>> samples_;
  double table_min_ = 1.0;
  double table_max_ = 1.0;
};

// Throws DomainError for s < 0 or non-finite s.
double psi_eval(const Potential& potential, double s);

enum class ModelVariant {
  // dv_i/dt = (lambda/N) sum_{j != i} psi_ij(t - tau) (v_j(t - tau) - v_i(t))
  main_delay,
  // dv_i/dt = lambda (sum_j p_ij(t - tau) v_j(t - tau) - v_i(t)), sum over all j
  // including i; p row-stochastic with self weight psi(0)
  full_sum_baseline,
  // main_delay form with a_ij = N psi_ij / sum_k psi_ik
  normalized_nonsymmetric,
};

std::string_view to_string(ModelVariant variant) noexcept;
ModelVariant model_variant_from_string(std::string_view name);
std::string_view to_string(PotentialKind kind) noexcept;

bool is_symmetric(ModelVariant variant) noexcept;

struct ModelParams {
  std::size_t n = 2;
  std::size_t d = 1;
  double lambda = 1.0;
  ModelVariant variant = ModelVariant::main_delay;
  Potential potential = Potential::cucker_smale(0.0);

  // Throws ConfigError on N < 2, d < 1, lambda <= 0, or a normalized
  // nonsymmetric model whose potential has no positive lower bound.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct PhaseState {
  Matrix x;  // N x d positions
  Matrix v;  // N x d velocities
  double t = 0.0;
};

struct PhaseDerivative {
  Matrix dx;
  Matrix dv;
};

// Communication weights evaluated at (delayed) positions. Diagonal is zero.
// Symmetric variants give psi(|x_i - x_j|); normalized_nonsymmetric gives
// a_ij = N psi_ij / sum_{k=1..N} psi(|x_k - x_i|) (the k = i term included).
Matrix weight_matrix(const ModelParams& params, const Matrix& x_delayed);

// Velocity field of the delayed system. Weights are taken from x_delayed.
Matrix velocity_field(const ModelParams& params, const Matrix& v_now, const Matrix& x_delayed,
                      const Matrix& v_delayed);

PhaseDerivative rhs(const ModelParams& params, const PhaseState& now, const PhaseState& delayed);

struct NormalizationCheck {
  bool pass = false;
  // 1 - max_i (1/N) sum_{j != i} a_ij
  double margin = 0.0;
};

NormalizationCheck validate_normalization(const ModelParams& params, const Matrix& x);

}  // namespace delayflock
