#include "dperm/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dperm {

std::vector<double> default_orders() {
  std::vector<double> orders;
  orders.reserve(65);
  for (int a = 2; a <= 64; ++a) orders.push_back(static_cast<double>(a));
  orders.push_back(128.0);
  orders.push_back(256.0);
  return orders;
}

double rdp_gaussian(double alpha, double z) {
  if (!(alpha > 1.0)) throw std::invalid_argument("rdp_gaussian: alpha must be > 1");
  if (!(z > 0.0)) throw std::invalid_argument("rdp_gaussian: z must be > 0");
  return alpha / (2.0 * z * z);
}

double rdp_subsampled_gaussian(int alpha, double q, double z) {
  if (alpha < 2) throw std::invalid_argument("rdp_subsampled_gaussian: alpha must be >= 2");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("rdp_subsampled_gaussian: q must be in [0, 1]");
  if (!(z > 0.0)) throw std::invalid_argument("rdp_subsampled_gaussian: z must be > 0");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return rdp_gaussian(static_cast<double>(alpha), z);

  // log of sum_{k=0}^{alpha} C(alpha,k) (1-q)^(alpha-k) q^k e^{k(k-1)/(2 z^2)}
  // via logsumexp over per-term logs.
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_2zz = 1.0 / (2.0 * z * z);
  const double lga = std::lgamma(static_cast<double>(alpha) + 1.0);

  std::vector<double> terms(static_cast<std::size_t>(alpha) + 1);
  double max_term = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= alpha; ++k) {
    const double log_binom = lga - std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(alpha - k) + 1.0);
    const double t = log_binom + static_cast<double>(alpha - k) * log_1mq +
                     static_cast<double>(k) * log_q +
                     static_cast<double>(k) * static_cast<double>(k - 1) * inv_2zz;
    terms[static_cast<std::size_t>(k)] = t;
    max_term = std::max(max_term, t);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  const double log_sum = max_term + std::log(acc);
  return std::max(0.0, log_sum / (static_cast<double>(alpha) - 1.0));
}

RdpCurve mechanism_rdp(double z, double q, const std::vector<double>& orders) {
  if (orders.empty()) throw std::invalid_argument("mechanism_rdp: empty order grid");
  RdpCurve curve;
  curve.orders.reserve(orders.size());
  curve.values.reserve(orders.size());
  for (double a : orders) {
    if (!(a > 1.0)) throw std::invalid_argument("mechanism_rdp: orders must be > 1");
    if (q >= 1.0) {
      curve.orders.push_back(a);
      curve.values.push_back(rdp_gaussian(a, z));
    } else {
      const double r = std::round(a);
      if (std::abs(a - r) > 1e-9 || r < 2.0) continue;  // bound needs integer order
      curve.orders.push_back(a);
      curve.values.push_back(rdp_subsampled_gaussian(static_cast<int>(r), q, z));
    }
  }
  if (curve.orders.empty())
    throw std::invalid_argument("mechanism_rdp: no usable integer orders for subsampled bound");
  return curve;
}

RdpCurve compose(const RdpCurve& curve, int steps) {
  if (steps < 1) throw std::invalid_argument("compose: steps must be >= 1");
  RdpCurve out = curve;
  for (double& v : out.values) v *= static_cast<double>(steps);
  return out;
}

double to_epsilon(const RdpCurve& curve, double delta) {
  if (curve.orders.empty() || curve.orders.size() != curve.values.size())
    throw std::invalid_argument("to_epsilon: malformed curve");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("to_epsilon: delta must be in (0, 1)");
  const double log_inv_delta = std::log(1.0 / delta);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double eps = curve.values[i] + log_inv_delta / (curve.orders[i] - 1.0);
    best = std::min(best, eps);
  }
  return best;
}

double epsilon_for(double z, double q, int steps, double delta,
                   const std::vector<double>& orders) {
  return to_epsilon(compose(mechanism_rdp(z, q, orders), steps), delta);
}

double calibrate_noise(const PrivacyBudget& budget, double q, int steps,
                       const std::vector<double>& orders) {
  if (!(budget.epsilon > 0.0)) throw std::invalid_argument("calibrate_noise: epsilon must be > 0");
  double lo = 1e-3, hi = 1e6;
  if (epsilon_for(hi, q, steps, budget.delta, orders) > budget.epsilon)
    throw std::runtime_error("calibrate_noise: budget infeasible within z <= 1e6");
  if (epsilon_for(lo, q, steps, budget.delta, orders) <= budget.epsilon) return lo;
  // epsilon is strictly decreasing in z on the bracket; keep hi feasible.
  for (int it = 0; it < 200 && (hi - lo) > 1e-4 * lo; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (epsilon_for(mid, q, steps, budget.delta, orders) <= budget.epsilon)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double single_shot_epsilon(double z, double delta) {
  if (!(z > 0.0)) throw std::invalid_argument("single_shot_epsilon: z must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("single_shot_epsilon: delta must be in (0, 1)");
  const double logd = std::log(1.0 / delta);
  return 1.0 / (2.0 * z * z) + std::sqrt(2.0 * logd) / z;
}

double single_shot_noise_multiplier(const PrivacyBudget& budget) {
  if (!(budget.epsilon > 0.0))
    throw std::invalid_argument("single_shot_noise_multiplier: epsilon must be > 0");
  if (!(budget.delta > 0.0 && budget.delta < 1.0))
    throw std::invalid_argument("single_shot_noise_multiplier: delta must be in (0, 1)");
  const double logd = std::log(1.0 / budget.delta);
  // epsilon(z) = 1/(2 z^2) + sqrt(2 log(1/delta))/z, inverted for z.
  return 1.0 / (std::sqrt(2.0 * logd + 2.0 * budget.epsilon) - std::sqrt(2.0 * logd));
}

double sigma_for_gd(double clip, std::int64_t n, double z) {
  if (!(clip > 0.0)) throw std::invalid_argument("sigma_for_gd: clip must be > 0");
  if (n < 1) throw std::invalid_argument("sigma_for_gd: n must be >= 1");
  if (!(z >= 0.0)) throw std::invalid_argument("sigma_for_gd: z must be >= 0");
  return z * 2.0 * clip / static_cast<double>(n);
}

}  // namespace dperm
