#include "bsmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bsmc::models {

void MxM1WvParams::validate() const {
  if (lambda <= 0 || mu <= 0 || theta <= 0) throw std::invalid_argument("rates must be positive");
  for (double v : nu)
    if (v <= 0) throw std::invalid_argument("vacation rates must be positive");
  double psum = 0;
  for (double v : p) {
    if (v < 0) throw std::invalid_argument("vacation-entry probabilities must be nonnegative");
    psum += v;
  }
  if (std::abs(psum - 1.0) > 1e-12) {
    throw std::invalid_argument("vacation-entry probabilities sum to " + std::to_string(psum));
  }
  if (pareto_alpha <= 1.0) throw std::invalid_argument("pareto_alpha must exceed 1");
  if (pmf_cutoff < 1) throw std::invalid_argument("pmf_cutoff must be at least 1");
}

double MxM1WvParams::default_uniformization_rate() const {
  return lambda + theta + mu + *std::max_element(nu.begin(), nu.end());
}

ParetoPmf pareto_pmf(double alpha, int cutoff) {
  if (alpha <= 0) throw std::invalid_argument("pareto_pmf: alpha must be positive");
  if (cutoff < 1) throw std::invalid_argument("pareto_pmf: cutoff must be at least 1");
  ParetoPmf pmf;
  pmf.masses.resize(static_cast<size_t>(cutoff));
  double survival = 1.0;  // P(X >= 1) = 1
  double mean = 0.0, comp = 0.0;
  for (int k = 1; k <= cutoff; ++k) {
    const double next = std::pow(static_cast<double>(k) + 1.0, -alpha);
    const double mass = survival - next;
    pmf.masses[static_cast<size_t>(k) - 1] = mass;
    const double y = k * mass - comp;
    const double t = mean + y;
    comp = (t - mean) - y;
    mean = t;
    survival = next;
  }
  pmf.remainder = survival;
  pmf.mean = mean;
  return pmf;
}

mg1::MG1Spec build_rate_spec(const MxM1WvParams& params) {
  params.validate();
  const ParetoPmf pmf = pareto_pmf(params.pareto_alpha, params.pmf_cutoff);

  // Stability: the mean drift lambda E[X] must stay below the slowest
  // relevant service rate for the positive-recurrence assumption to hold.
  const double load = params.lambda * pmf.mean / params.mu;
  if (load >= 1.0) {
    throw std::invalid_argument("model is not stable: lambda E[X]/mu = " + std::to_string(load));
  }

  const int r = 5;
  mg1::MG1Spec spec;
  spec.uniformization_hint = params.default_uniformization_rate();

  spec.boundary_diag = Eigen::MatrixXd::Constant(1, 1, -params.lambda);
  spec.boundary_down = Eigen::MatrixXd(r, 1);
  spec.boundary_down << params.nu[0], params.nu[1], params.nu[2], params.nu[3], params.mu;
  spec.repeat_down = spec.boundary_down.col(0).asDiagonal();

  spec.repeat_diag = Eigen::MatrixXd::Zero(r, r);
  for (int j = 0; j < 4; ++j) {
    spec.repeat_diag(j, j) = -(params.lambda + params.nu[static_cast<size_t>(j)] + params.theta);
    spec.repeat_diag(j, 4) = params.theta;
  }
  spec.repeat_diag(4, 4) = -(params.lambda + params.mu);

  Eigen::RowVectorXd entry(r);
  entry << params.p[0], params.p[1], params.p[2], params.p[3], 0.0;
  spec.boundary_up.resize(static_cast<size_t>(params.pmf_cutoff));
  spec.repeat_up.resize(static_cast<size_t>(params.pmf_cutoff));
  for (int k = 1; k <= params.pmf_cutoff; ++k) {
    const double rate = params.lambda * pmf.masses[static_cast<size_t>(k) - 1];
    spec.boundary_up[static_cast<size_t>(k) - 1] = rate * entry;
    spec.repeat_up[static_cast<size_t>(k) - 1] =
        Eigen::MatrixXd(rate * Eigen::VectorXd::Ones(r).asDiagonal());
  }

  const double tail_rate = params.lambda * pmf.remainder;
  spec.repeat_tail_remainder = Eigen::VectorXd::Constant(r, tail_rate);
  spec.boundary_tail_remainder = Eigen::VectorXd::Constant(1, tail_rate);
  return spec;
}

mg1::MG1Spec uniformize(const mg1::MG1Spec& rates, std::optional<double> c_opt) {
  const int r = rates.repeat_phases();
  const int r0 = rates.boundary_phases();

  double max_outflow = 0.0;
  for (int p = 0; p < r; ++p) max_outflow = std::max(max_outflow, -rates.repeat_diag(p, p));
  for (int p = 0; p < r0; ++p) max_outflow = std::max(max_outflow, -rates.boundary_diag(p, p));

  const double c = c_opt.value_or(rates.uniformization_hint > 0.0 ? rates.uniformization_hint
                                                                  : max_outflow);
  if (c < max_outflow) {
    throw std::invalid_argument("uniformization rate " + std::to_string(c) +
                                " is below the maximal outflow " + std::to_string(max_outflow) +
                                " (negative diagonal)");
  }
  if (c <= 0.0) throw std::invalid_argument("uniformization rate must be positive");

  mg1::MG1Spec p = rates;
  p.uniformization_hint = 0.0;
  p.boundary_diag = Eigen::MatrixXd::Identity(r0, r0) + rates.boundary_diag / c;
  p.repeat_diag = Eigen::MatrixXd::Identity(r, r) + rates.repeat_diag / c;
  p.boundary_down = rates.boundary_down / c;
  p.repeat_down = rates.repeat_down / c;
  for (auto& b : p.boundary_up) b /= c;
  for (auto& b : p.repeat_up) b /= c;
  if (p.repeat_tail_remainder.size() > 0) p.repeat_tail_remainder /= c;
  if (p.boundary_tail_remainder.size() > 0) p.boundary_tail_remainder /= c;
  return p;
}

mg1::MG1Spec build_uniformized_spec(const MxM1WvParams& params, std::optional<double> c) {
  return uniformize(build_rate_spec(params), c);
}

MxM1WvParams params_from_config(const io::Config& config) {
  MxM1WvParams params;
  params.lambda = config.get_double("lambda", params.lambda);
  params.mu = config.get_double("mu", params.mu);
  params.theta = config.get_double("theta", params.theta);
  for (int j = 0; j < 4; ++j) {
    params.nu[static_cast<size_t>(j)] =
        config.get_double("nu" + std::to_string(j + 1), params.nu[static_cast<size_t>(j)]);
    params.p[static_cast<size_t>(j)] =
        config.get_double("p" + std::to_string(j + 1), params.p[static_cast<size_t>(j)]);
  }
  params.pareto_alpha = config.get_double("alpha", params.pareto_alpha);
  params.pmf_cutoff = config.get_int("cutoff", params.pmf_cutoff);
  params.validate();
  return params;
}

}  // namespace bsmc::models
