#include "delayflock/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delayflock/errors.hpp"

namespace delayflock {

Potential Potential::cucker_smale(double beta) {
  if (!std::isfinite(beta) || beta < 0.0)
    throw ConfigError("potential: Cucker-Smale exponent beta must be finite and >= 0");
  Potential p;
  p.kind_ = PotentialKind::cucker_smale;
  p.beta_ = beta;
  return p;
}

Potential Potential::constant(double psi0) {
  if (!(psi0 > 0.0 && psi0 <= 1.0))
    throw ConfigError("potential: constant psi0 must lie in (0, 1]");
  Potential p;
  p.kind_ = PotentialKind::constant;
  p.psi0_ = psi0;
  return p;
}

Potential Potential::table(std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) throw ConfigError("potential: table needs at least one sample");
  double lo = samples.front().second;
  double hi = lo;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto [s, w] = samples[k];
    if (!std::isfinite(s) || s < 0.0)
      throw ConfigError("potential: table distances must be finite and >= 0");
    if (k > 0 && !(s > samples[k - 1].first))
      throw ConfigError("potential: table distances must be strictly increasing");
    if (!std::isfinite(w)) throw ConfigError("potential: table weights must be finite");
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (!(lo > 0.0)) throw ConfigError("potential: table weights must be > 0 (psi_min > 0)");
  if (hi > 1.0) throw ConfigError("potential: table weights must be <= 1 (psi_max <= 1)");
  Potential p;
  p.kind_ = PotentialKind::table;
  p.samples_ = std::move(samples);
  p.table_min_ = lo;
  p.table_max_ = hi;
  return p;
}

double Potential::lower_bound() const noexcept {
  switch (kind_) {
    case PotentialKind::cucker_smale:
      return beta_ == 0.0 ? 1.0 : 0.0;
    case PotentialKind::constant:
      return psi0_;
    case PotentialKind::table:
      return table_min_;
  }
  return 0.0;
}

double Potential::upper_bound() const noexcept {
  switch (kind_) {
    case PotentialKind::cucker_smale:
      return 1.0;
    case PotentialKind::constant:
      return psi0_;
    case PotentialKind::table:
      return table_max_;
  }
  return 1.0;
}

double Potential::operator()(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    std::ostringstream msg;
    msg << "psi: distance must be finite and >= 0, got " << s;
    throw DomainError(msg.str());
  }
  switch (kind_) {
    case PotentialKind::cucker_smale:
      return std::pow(1.0 + s * s, -beta_);
    case PotentialKind::constant:
      return psi0_;
    case PotentialKind::table: {
      if (s <= samples_.front().first) return samples_.front().second;
      if (s >= samples_.back().first) return samples_.back().second;
      const auto upper = std::upper_bound(
          samples_.begin(), samples_.end(), s,
          [](double value, const std::pair<double, double>& sample) { return value < sample.first; });
      const auto lower = upper - 1;
      const double theta = (s - lower->first) / (upper->first - lower->first);
      return (1.0 - theta) * lower->second + theta * upper->second;
    }
  }
  return 0.0;
}

double psi_eval(const Potential& potential, double s) { return potential(s); }

std::string_view to_string(ModelVariant variant) noexcept {
  switch (variant) {
    case ModelVariant::main_delay:
      return "main_delay";
    case ModelVariant::full_sum_baseline:
      return "full_sum_baseline";
    case ModelVariant::normalized_nonsymmetric:
      return "normalized_nonsymmetric";
  }
  return "unknown";
}

ModelVariant model_variant_from_string(std::string_view name) {
  if (name == "main_delay") return ModelVariant::main_delay;
  if (name == "full_sum_baseline") return ModelVariant::full_sum_baseline;
  if (name == "normalized_nonsymmetric") return ModelVariant::normalized_nonsymmetric;
  throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

std::string_view to_string(PotentialKind kind) noexcept {
  switch (kind) {
    case PotentialKind::cucker_smale:
      return "cucker_smale";
    case PotentialKind::constant:
      return "constant";
    case PotentialKind::table:
      return "table";
  }
  return "unknown";
}

bool is_symmetric(ModelVariant variant) noexcept {
  return variant != ModelVariant::normalized_nonsymmetric;
}

void ModelParams::validate() const {
  if (n < 2) throw ConfigError("model: agent count n must be >= 2");
  if (d < 1) throw ConfigError("model: dimension d must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("model: coupling lambda must be finite and > 0");
  if (variant == ModelVariant::normalized_nonsymmetric && !(potential.lower_bound() > 0.0))
    throw ConfigError(
        "model: normalized_nonsymmetric needs a potential with a positive lower bound psi_min");
}

namespace {

void check_agents(const ModelParams& params, const Matrix& a, const char* what) {
  if (a.rows() != params.n || a.cols() != params.d) {
    std::ostringstream msg;
    msg << what << ": expected " << params.n << "x" << params.d << " array, got " << a.rows()
        << "x" << a.cols();
    throw ContractError(msg.str());
  }
}

Matrix psi_matrix(const ModelParams& params, const Matrix& x) {
  const std::size_t n = params.n;
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double value = params.potential(row_distance(x, i, x, j));
      w(i, j) = value;
      w(j, i) = value;
    }
  return w;
}

}  // namespace

Matrix weight_matrix(const ModelParams& params, const Matrix& x_delayed) {
  check_agents(params, x_delayed, "weight_matrix");
  if (!x_delayed.all_finite()) throw StateError("weight_matrix: non-finite positions");
  Matrix w = psi_matrix(params, x_delayed);
  if (params.variant == ModelVariant::normalized_nonsymmetric) {
    const std::size_t n = params.n;
    const double self = params.potential(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double denom = self;
      for (std::size_t k = 0; k < n; ++k) denom += w(i, k);
      const double scale = static_cast<double>(n) / denom;
      for (std::size_t j = 0; j < n; ++j) w(i, j) *= scale;
    }
  }
  return w;
}

Matrix velocity_field(const ModelParams& params, const Matrix& v_now, const Matrix& x_delayed,
                      const Matrix& v_delayed) {
  check_agents(params, v_now, "velocity_field(v_now)");
  check_agents(params, v_delayed, "velocity_field(v_delayed)");
  const Matrix w = weight_matrix(params, x_delayed);
  const std::size_t n = params.n;
  const std::size_t d = params.d;
  Matrix dv(n, d);

  if (params.variant == ModelVariant::full_sum_baseline) {
    for (std::size_t i = 0; i < n; ++i) {
      const double self = params.potential(0.0);
      double row_sum = self;
      for (std::size_t j = 0; j < n; ++j) row_sum += w(i, j);
      auto out = dv.row(i);
      const auto vi = v_now.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double p = (j == i ? self : w(i, j)) / row_sum;
        const auto vj = v_delayed.row(j);
        for (std::size_t k = 0; k < d; ++k) out[k] += p * vj[k];
      }
      for (std::size_t k = 0; k < d; ++k) out[k] = params.lambda * (out[k] - vi[k]);
    }
    return dv;
  }

  const double scale = params.lambda / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = dv.row(i);
    const auto vi = v_now.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a = w(i, j);
      const auto vj = v_delayed.row(j);
      for (std::size_t k = 0; k < d; ++k) out[k] += a * (vj[k] - vi[k]);
    }
    for (std::size_t k = 0; k < d; ++k) out[k] *= scale;
  }
  return dv;
}

PhaseDerivative rhs(const ModelParams& params, const PhaseState& now, const PhaseState& delayed) {
  check_agents(params, now.x, "rhs(x_now)");
  check_agents(params, delayed.x, "rhs(x_delayed)");
  return {now.v, velocity_field(params, now.v, delayed.x, delayed.v)};
}

NormalizationCheck validate_normalization(const ModelParams& params, const Matrix& x) {
  const Matrix a = weight_matrix(params, x);
  const double n = static_cast<double>(params.n);
  double worst = 0.0;
  for (std::size_t i = 0; i < params.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < params.n; ++j)
      if (j != i) s += a(i, j);
    worst = std::max(worst, s / n);
  }
  const double margin = 1.0 - worst;
  return {margin > 0.0, margin};
}

}  // namespace delayflock
