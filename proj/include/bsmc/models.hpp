#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bsmc/config.hpp"
#include "bsmc/mg1.hpp"

namespace bsmc::models {

/// Batch-arrival single-server queue with working vacations: Poisson batches
/// at rate lambda, regular service rate mu, vacation-end rate theta, four
/// vacation service rates nu_j entered with probabilities p_j, heavy-tailed
/// batch sizes with survival function P(X >= k) = k^(-alpha).
struct MxM1WvParams {
  double lambda = 0.4;
  double mu = 2.0;
  double theta = 0.4;
  std::array<double, 4> nu{1.5, 1.3, 1.2, 1.6};
  std::array<double, 4> p{0.2, 0.3, 0.25, 0.25};
  double pareto_alpha = 1.55;
  int pmf_cutoff = 500000;

  void validate() const;
  double default_uniformization_rate() const;  // lambda + theta + mu + max nu
};

struct ParetoPmf {
  std::vector<double> masses;  // masses[k-1] = g_k = k^-a - (k+1)^-a
  double remainder = 0.0;      // (cutoff+1)^-a, the mass beyond the support
  double mean = 0.0;           // sum k g_k over the stored support
};

/// Discrete Pareto pmf under the survival convention; the telescoping sum
/// makes masses + remainder total exactly 1.
ParetoPmf pareto_pmf(double alpha, int cutoff);

/// Continuous-time generator of the queue as level/phase blocks, in the
/// canonical indexing (A_{-1} down, A_0 diagonal, A_k up by k). Level 0 has
/// one phase (the empty-with-pending-vacation state), levels >= 1 have five
/// (four vacation rates plus the busy phase). Checks the stability condition
/// lambda E[X] < mu at the cutoff.
mg1::MG1Spec build_rate_spec(const MxM1WvParams& params);

/// P = I + Q/c. Without an explicit c, uses the spec's uniformization hint
/// or, failing that, the maximal total outflow rate. c below the maximal
/// outflow is an error (it would leave a negative diagonal).
mg1::MG1Spec uniformize(const mg1::MG1Spec& rates, std::optional<double> c = std::nullopt);

mg1::MG1Spec build_uniformized_spec(const MxM1WvParams& params,
                                    std::optional<double> c = std::nullopt);

/// Keys: lambda, mu, theta, nu1..nu4, p1..p4, alpha, cutoff (all optional,
/// defaulting to the values above).
MxM1WvParams params_from_config(const io::Config& config);

}  // namespace bsmc::models
