#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dperm/dataset.hpp"
#include "dperm/models.hpp"
#include "dperm/objective.hpp"

namespace dperm {

struct CurvatureSample {
  std::int64_t step = 0;
  double avg_curvature = 0.0;  // tr(H)/p
  double min_curvature = 0.0;  // lambda_min(H)
  std::optional<double> nu_hat;
  std::optional<double> nu_se;
};

struct CurvatureTrace {
  std::vector<CurvatureSample> samples;
  double lambda = 0.0;
  std::string dataset_id;
  std::int64_t stride = 5;
};

// tr(H)/p.
double average_curvature(const HessianMatrix& h);

// Smallest eigenvalue: cyclic Jacobi for p <= 256, otherwise shifted inverse
// power iteration seeded at the regularizer hint; absolute tolerance 1e-8.
double min_curvature(const HessianMatrix& h);

// Monte-Carlo expected curvature at x around noise scale sigma:
//   draws z_j ~ N(0, sigma^2 I), xt_j = x - z_j, and returns
//   mean_j <grad F(xt_j), xt_j - x_*> / mean_j |xt_j - x_*|^2
// with its delta-method standard error. The gradient is the unclipped full
// gradient including the ridge term. Requires m >= 100 and sigma > 0; throws
// if the denominator mean is not positive.
std::pair<double, double> estimate_nu(const Objective& obj, const std::vector<double>& x,
                                      const std::vector<double>& x_star, double sigma,
                                      std::int64_t m, std::uint64_t seed = 20240601);
std::pair<double, double> estimate_nu(const LossSpec& spec, const Dataset& ds,
                                      const std::vector<double>& x,
                                      const std::vector<double>& x_star, double sigma,
                                      std::int64_t m, std::uint64_t seed = 20240601);

// Curvature along a training path: every `stride` snapshots, build the
// unregularized data Hessian once and overlay each lambda exactly
// (tr(H + lambda I)/p = tr(H)/p + lambda, lambda_min shifts likewise).
// Returns one trace per lambda; sample steps are 1-based snapshot indices.
std::vector<CurvatureTrace> curvature_trace(const Dataset& ds, const LossSpec& spec,
                                            const std::vector<std::vector<double>>& trace_params,
                                            std::int64_t stride,
                                            const std::vector<double>& lambdas,
                                            const std::string& dataset_id = "");

// Conservative path aggregate: min over samples of (nu_hat - nu_se); requires
// every sample to carry an estimate.
double path_nu(const std::vector<CurvatureSample>& samples);

}  // namespace dperm
