#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dperm/dataset.hpp"
#include "dperm/models.hpp"
#include "dperm/objective.hpp"
#include "dperm/privacy.hpp"

namespace dperm {

enum class ScheduleKind { constant, inverse_nu_t, inverse_sqrt, halve_at_midpoint };

struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double base = 0.1;        // constant / halve_at_midpoint
  double nu = 1.0;          // inverse_nu_t: eta_t = 1/(nu t)
  double radius_d = 1.0;    // inverse_sqrt: eta_t = D/(G sqrt(t))
  double bound_g = 1.0;
  std::int64_t total_steps = 0;  // halve_at_midpoint: halve after floor(T/2)

  double rate(std::int64_t t) const;  // t is 1-based
};

struct GdConfig {
  std::int64_t steps = 50;
  Schedule schedule;
  double clip = 1.0;
  double sigma = 0.0;  // per-step noise std (privacy::sigma_for_gd); 0 = non-private
  bool average_iterates = false;
  std::uint64_t seed = 1;
  bool record_iterates = false;
};

enum class SamplingMode { single, poisson, fixed_ratio };

struct SgdConfig {
  std::int64_t steps = 50;
  Schedule schedule;
  double clip = 1.0;
  double noise_multiplier = 0.0;  // z; per-step noise std is z*C
  SamplingMode sampling = SamplingMode::single;
  double q = 0.1;  // sampling ratio for poisson / fixed_ratio
  std::optional<double> projection_radius;
  std::uint64_t seed = 1;
  bool record_iterates = false;
};

struct StepRecord {
  std::int64_t step = 0;  // 1-based
  double eta = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;  // update direction before noise (incl. ridge term)
};

struct RunTrace {
  std::vector<StepRecord> steps;
  std::vector<double> final_params;
  std::vector<double> averaged_params;  // filled when averaging enabled
  std::vector<std::vector<double>> iterates;  // x_{t+1} per step when recorded
  std::uint64_t seed = 0;
};

// Noisy full-batch gradient descent from x1 = 0:
//   x_{t+1} = x_t - eta_t (g_t + z_t),  g_t = clipped mean gradient + lambda x_t,
//   z_t ~ N(0, sigma^2 I_p).
// Returns the last iterate, or the average (1/T) sum x_{t+1} when
// average_iterates is set. Throws on a non-finite iterate.
std::pair<std::vector<double>, RunTrace> dp_gd(const Objective& obj, const GdConfig& cfg);
std::pair<std::vector<double>, RunTrace> dp_gd(const Dataset& ds, const LossSpec& spec,
                                               const GdConfig& cfg);

// Noisy stochastic gradient descent from x1 = 0.
//   single:      g_t = clip(grad f_i) + lambda x_t + N(0, (zC)^2 I_p)
//   poisson/fixed_ratio: g_t = (1/(qn)) [sum_lot clip(grad f_i) + N(0,(zC)^2 I_p)]
//                         + lambda x_t
// An empty Poisson lot is a noise-only step. With projection_radius set,
// iterates are projected onto the L2 ball of that radius.
std::pair<std::vector<double>, RunTrace> dp_sgd(const Objective& obj, const SgdConfig& cfg);
std::pair<std::vector<double>, RunTrace> dp_sgd(const Dataset& ds, const LossSpec& spec,
                                                const SgdConfig& cfg);

// High-precision reference minimizer: full-batch unclipped gradient descent
// with Armijo backtracking until |grad F| <= tol. The dataset overload makes
// an internal second-order warm start for dense binary logistic before the
// certified descent loop. Throws if the iteration cap (1e6) is reached.
std::vector<double> nonprivate_optimum(const Objective& obj, double tol = 1e-10,
                                       std::vector<double> warm_start = {});
std::vector<double> nonprivate_optimum(const Dataset& ds, const LossSpec& spec,
                                       double tol = 1e-10);

// End-to-end L2 sensitivity of T clipped GD steps at rate eta on a
// lambda-strongly-convex objective: (2 eta C / n) * sum_{t=0}^{T-1} (1-eta*lambda)^t.
double contraction_sensitivity(double eta, double clip, double lambda, std::int64_t steps,
                               std::int64_t n);

// Output perturbation around clipped full-batch GD: T constant-rate steps from
// x1 = 0, then Gaussian noise with std z*Delta where Delta is the contraction
// sensitivity and z comes from the single-release accountant.
// Requires lambda > 0 and eta <= 1/smoothness_bound.
std::vector<double> output_perturbation_gd(const Dataset& ds, const LossSpec& spec,
                                           const PrivacyBudget& budget, std::int64_t steps,
                                           double eta, std::uint64_t seed = 1);

// One pass of clipped SGD over a seeded permutation at constant rate eta
// (no noise); building block of output_perturbation_sgd and its tests.
std::vector<double> train_onepass_sgd(const Dataset& ds, const LossSpec& spec, double eta,
                                      std::uint64_t seed);

// Output perturbation around one-pass permuted SGD; sensitivity Delta = 2 eta C.
// Requires eta <= 1/smoothness_bound.
std::vector<double> output_perturbation_sgd(const Dataset& ds, const LossSpec& spec,
                                            const PrivacyBudget& budget, double eta,
                                            std::uint64_t seed = 1);

}  // namespace dperm
