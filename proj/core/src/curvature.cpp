#include "dperm/curvature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dperm/linalg.hpp"
#include "dperm/rng.hpp"

namespace dperm {

double average_curvature(const HessianMatrix& h) {
  if (h.p < 1) throw std::invalid_argument("average_curvature: empty Hessian");
  return h.trace() / static_cast<double>(h.p);
}

double min_curvature(const HessianMatrix& h) {
  if (h.p < 1) throw std::invalid_argument("min_curvature: empty Hessian");
  if (h.p <= 256) return jacobi_eigenvalues(h.p, h.a).front();
  return smallest_eigenvalue_shifted(h.p, h.a, h.lambda_hint, 1e-8);
}

std::pair<double, double> estimate_nu(const Objective& obj, const std::vector<double>& x,
                                      const std::vector<double>& x_star, double sigma,
                                      std::int64_t m, std::uint64_t seed) {
  const std::size_t p = obj.dim();
  if (x.size() != p || x_star.size() != p)
    throw std::invalid_argument("estimate_nu: dimension mismatch");
  if (m < 100) throw std::invalid_argument("estimate_nu: m must be >= 100");
  if (!(sigma > 0.0)) throw std::invalid_argument("estimate_nu: sigma must be > 0");

  Rng rng(seed);
  std::vector<double> xt(p, 0.0), g(p, 0.0);
  // ratio of means with delta-method error, so track both first and second
  // moments of (numerator, denominator) pairs
  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
  for (std::int64_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < p; ++k) xt[k] = x[k] - sigma * rng.gaussian();
    obj.value_and_gradient(xt, g, false);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double d = xt[k] - x_star[k];
      a += g[k] * d;
      b += d * d;
    }
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
  }
  const double md = static_cast<double>(m);
  const double mean_a = sum_a / md;
  const double mean_b = sum_b / md;
  if (!(mean_b > 0.0)) throw std::runtime_error("estimate_nu: denominator mean <= 0");
  const double ratio = mean_a / mean_b;
  const double var_a = std::max(0.0, sum_aa / md - mean_a * mean_a);
  const double var_b = std::max(0.0, sum_bb / md - mean_b * mean_b);
  const double cov_ab = sum_ab / md - mean_a * mean_b;
  const double var_ratio =
      std::max(0.0, var_a - 2.0 * ratio * cov_ab + ratio * ratio * var_b) /
      (md * mean_b * mean_b);
  return {ratio, std::sqrt(var_ratio)};
}

std::pair<double, double> estimate_nu(const LossSpec& spec, const Dataset& ds,
                                      const std::vector<double>& x,
                                      const std::vector<double>& x_star, double sigma,
                                      std::int64_t m, std::uint64_t seed) {
  GlmObjective obj(ds, spec);
  return estimate_nu(obj, x, x_star, sigma, m, seed);
}

std::vector<CurvatureTrace> curvature_trace(const Dataset& ds, const LossSpec& spec,
                                            const std::vector<std::vector<double>>& trace_params,
                                            std::int64_t stride,
                                            const std::vector<double>& lambdas,
                                            const std::string& dataset_id) {
  if (spec.kind != LossKind::logistic)
    throw std::invalid_argument("curvature_trace: binary logistic only");
  if (stride < 1) throw std::invalid_argument("curvature_trace: stride must be >= 1");
  if (lambdas.empty()) throw std::invalid_argument("curvature_trace: no lambdas");
  if (trace_params.empty()) throw std::invalid_argument("curvature_trace: empty path");

  LossSpec data_spec = spec;
  data_spec.lambda = 0.0;  // probe the data Hessian; overlays added exactly below

  std::vector<CurvatureTrace> traces(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    traces[li].lambda = lambdas[li];
    traces[li].dataset_id = dataset_id;
    traces[li].stride = stride;
  }
  for (std::size_t idx = 0; idx < trace_params.size();
       idx += static_cast<std::size_t>(stride)) {
    const HessianMatrix h0 = hessian(data_spec, ds, trace_params[idx]);
    const double avg0 = average_curvature(h0);
    const double min0 = min_curvature(h0);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      CurvatureSample s;
      s.step = static_cast<std::int64_t>(idx) + 1;
      s.avg_curvature = avg0 + lambdas[li];
      s.min_curvature = min0 + lambdas[li];
      traces[li].samples.push_back(s);
    }
  }
  return traces;
}

double path_nu(const std::vector<CurvatureSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("path_nu: no samples");
  double best = std::numeric_limits<double>::infinity();
  for (const CurvatureSample& s : samples) {
    if (!s.nu_hat || !s.nu_se) throw std::invalid_argument("path_nu: sample without estimate");
    best = std::min(best, *s.nu_hat - *s.nu_se);
  }
  return best;
}

}  // namespace dperm
