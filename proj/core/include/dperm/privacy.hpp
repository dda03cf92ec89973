#pragma once

#include <cstdint>
#include <vector>

namespace dperm {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-6;
};

// Renyi-DP curve: epsilon(alpha) sampled on an ascending grid of orders > 1.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

struct MechanismSpec {
  double noise_multiplier = 1.0;  // z: Gaussian std / L2 sensitivity
  double sampling_ratio = 1.0;    // q in (0, 1]
  int steps = 1;                  // T
};

// Default order grid: {2, 3, ..., 64, 128, 256}.
std::vector<double> default_orders();

// Gaussian mechanism: exactly alpha / (2 z^2).
double rdp_gaussian(double alpha, double z);

// Poisson-subsampled Gaussian at integer order alpha >= 2:
// (1/(alpha-1)) * log( sum_k C(alpha,k) (1-q)^(alpha-k) q^k e^{k(k-1)/(2 z^2)} ),
// evaluated in log space.
double rdp_subsampled_gaussian(int alpha, double q, double z);

// Per-step curve of the mechanism: q >= 1 uses the plain Gaussian value at
// every order; q < 1 uses the subsampled bound at the integer orders of the
// grid (non-integer orders are skipped).
RdpCurve mechanism_rdp(double z, double q, const std::vector<double>& orders);

// T-fold composition: every value multiplied by T.
RdpCurve compose(const RdpCurve& curve, int steps);

// min over orders of value(alpha) + log(1/delta)/(alpha - 1).
double to_epsilon(const RdpCurve& curve, double delta);

// Epsilon after T steps of the mechanism at noise multiplier z.
double epsilon_for(double z, double q, int steps, double delta,
                   const std::vector<double>& orders = default_orders());

// Smallest z in [1e-3, 1e6] (binary search, 1e-4 relative tolerance) whose
// composed epsilon meets the budget. The returned z satisfies the budget and
// 0.999 z does not. Throws if infeasible at z = 1e6.
double calibrate_noise(const PrivacyBudget& budget, double q, int steps,
                       const std::vector<double>& orders = default_orders());

// Single-release Gaussian epsilon from the RDP conversion optimized over
// continuous orders: epsilon(z) = 1/(2 z^2) + sqrt(2 log(1/delta))/z.
double single_shot_epsilon(double z, double delta);

// Closed-form inverse of single_shot_epsilon in z.
double single_shot_noise_multiplier(const PrivacyBudget& budget);

// Per-step noise std for full-batch DP-GD: z * (2 C / n); 2C/n is the
// L2 sensitivity of the mean clipped gradient under one-record replacement.
double sigma_for_gd(double clip, std::int64_t n, double z);

}  // namespace dperm
