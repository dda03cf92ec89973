#include "dperm/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dperm/linalg.hpp"
#include "dperm/rng.hpp"

namespace dperm {

namespace {

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

[[noreturn]] void abort_nonfinite(const char* who, std::int64_t step,
                                  const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) {
    if (std::isfinite(v)) worst = std::max(worst, std::abs(v));
  }
  throw std::runtime_error(std::string(who) + ": non-finite iterate at step " +
                           std::to_string(step) + " (largest finite |coord| " +
                           std::to_string(worst) + ")");
}

double checked_rate(const Schedule& s, std::int64_t t, const char* who) {
  const double eta = s.rate(t);
  if (!(std::isfinite(eta) && eta > 0.0))
    throw std::invalid_argument(std::string(who) + ": schedule rate invalid at step " +
                                std::to_string(t));
  return eta;
}

}  // namespace

double Schedule::rate(std::int64_t t) const {
  if (t < 1) throw std::invalid_argument("Schedule::rate: t must be >= 1");
  switch (kind) {
    case ScheduleKind::constant:
      return base;
    case ScheduleKind::inverse_nu_t:
      if (!(nu > 0.0)) throw std::invalid_argument("Schedule::rate: nu must be > 0");
      return 1.0 / (nu * static_cast<double>(t));
    case ScheduleKind::inverse_sqrt:
      if (!(radius_d > 0.0 && bound_g > 0.0))
        throw std::invalid_argument("Schedule::rate: D and G must be > 0");
      return radius_d / (bound_g * std::sqrt(static_cast<double>(t)));
    case ScheduleKind::halve_at_midpoint:
      if (total_steps < 1)
        throw std::invalid_argument("Schedule::rate: total_steps must be set for halving");
      return t <= total_steps / 2 ? base : base / 2.0;
  }
  throw std::invalid_argument("Schedule::rate: unknown kind");
}

std::pair<std::vector<double>, RunTrace> dp_gd(const Objective& obj, const GdConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("dp_gd: steps must be >= 1");
  if (!(cfg.sigma >= 0.0)) throw std::invalid_argument("dp_gd: sigma must be >= 0");

  const std::size_t p = obj.dim();
  Rng rng(cfg.seed);
  std::vector<double> x(p, 0.0), g(p, 0.0), sum_x(p, 0.0);

  RunTrace trace;
  trace.seed = cfg.seed;
  trace.steps.reserve(static_cast<std::size_t>(cfg.steps));
  if (cfg.record_iterates) trace.iterates.reserve(static_cast<std::size_t>(cfg.steps));

  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const double eta = checked_rate(cfg.schedule, t, "dp_gd");
    const double fval = obj.value_and_gradient(x, g, true);
    if (!std::isfinite(fval)) abort_nonfinite("dp_gd", t, x);
    const double grad_norm = l2(g);

    if (cfg.sigma > 0.0) {
      for (std::size_t j = 0; j < p; ++j)
        x[j] -= eta * (g[j] + cfg.sigma * rng.gaussian());
    } else {
      for (std::size_t j = 0; j < p; ++j) x[j] -= eta * g[j];
    }
    if (!all_finite(x)) abort_nonfinite("dp_gd", t, x);

    for (std::size_t j = 0; j < p; ++j) sum_x[j] += x[j];
    trace.steps.push_back({t, eta, fval, grad_norm});
    if (cfg.record_iterates) trace.iterates.push_back(x);
  }

  trace.final_params = x;
  if (cfg.average_iterates) {
    trace.averaged_params.resize(p);
    for (std::size_t j = 0; j < p; ++j)
      trace.averaged_params[j] = sum_x[j] / static_cast<double>(cfg.steps);
  }
  std::vector<double> out = cfg.average_iterates ? trace.averaged_params : trace.final_params;
  return {std::move(out), std::move(trace)};
}

std::pair<std::vector<double>, RunTrace> dp_gd(const Dataset& ds, const LossSpec& spec,
                                               const GdConfig& cfg) {
  LossSpec s = spec;
  s.clip = cfg.clip;
  GlmObjective obj(ds, s);
  return dp_gd(obj, cfg);
}

std::pair<std::vector<double>, RunTrace> dp_sgd(const Objective& obj, const SgdConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("dp_sgd: steps must be >= 1");
  if (!(cfg.noise_multiplier >= 0.0))
    throw std::invalid_argument("dp_sgd: noise multiplier must be >= 0");
  const bool lot_mode = cfg.sampling != SamplingMode::single;
  if (lot_mode && !(cfg.q > 0.0 && cfg.q <= 1.0))
    throw std::invalid_argument("dp_sgd: q must be in (0, 1]");
  if (cfg.projection_radius && !(*cfg.projection_radius > 0.0))
    throw std::invalid_argument("dp_sgd: projection radius must be > 0");

  const std::size_t p = obj.dim();
  const std::int64_t n = obj.num_examples();
  const double lambda = obj.l2_lambda();
  const double clip_c = obj.clip_threshold();
  const double z = cfg.noise_multiplier;
  const double qn = lot_mode ? cfg.q * static_cast<double>(n) : 0.0;

  Rng rng(cfg.seed);
  std::vector<double> x(p, 0.0), acc(p, 0.0), dir(p, 0.0), noise;
  std::vector<double> sum_x(p, 0.0);
  std::vector<std::int64_t> pool;
  std::vector<std::int64_t> lot;
  if (cfg.sampling == SamplingMode::fixed_ratio && cfg.q < 1.0) {
    pool.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  }

  RunTrace trace;
  trace.seed = cfg.seed;
  trace.steps.reserve(static_cast<std::size_t>(cfg.steps));
  if (cfg.record_iterates) trace.iterates.reserve(static_cast<std::size_t>(cfg.steps));

  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const double eta = checked_rate(cfg.schedule, t, "dp_sgd");
    const double fval = obj.value(x);
    if (!std::isfinite(fval)) abort_nonfinite("dp_sgd", t, x);

    double grad_norm = 0.0;
    if (!lot_mode) {
      const std::int64_t i = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
      acc.assign(p, 0.0);
      obj.example_clipped_gradient(i, x, acc);
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        dir[j] = acc[j] + lambda * x[j];
        s += dir[j] * dir[j];
      }
      grad_norm = std::sqrt(s);
      if (z > 0.0) {
        for (std::size_t j = 0; j < p; ++j) dir[j] += z * clip_c * rng.gaussian();
      }
    } else {
      lot.clear();
      if (cfg.sampling == SamplingMode::poisson) {
        for (std::int64_t i = 0; i < n; ++i) {
          if (rng.bernoulli(cfg.q)) lot.push_back(i);
        }
      } else if (cfg.q >= 1.0) {
        // full lot in index order: step-for-step identical to dp_gd at z = 0
        for (std::int64_t i = 0; i < n; ++i) lot.push_back(i);
      } else {
        const std::int64_t m =
            std::max<std::int64_t>(1, std::llround(cfg.q * static_cast<double>(n)));
        for (std::int64_t k = 0; k < m; ++k) {
          const std::int64_t j =
              k + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - k)));
          std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
          lot.push_back(pool[static_cast<std::size_t>(k)]);
        }
      }
      acc.assign(p, 0.0);
      for (std::int64_t i : lot) obj.example_clipped_gradient(i, x, acc);
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        const double pre = acc[j] / qn + lambda * x[j];
        s += pre * pre;
      }
      grad_norm = std::sqrt(s);
      if (z > 0.0) {
        noise.resize(p);
        for (std::size_t j = 0; j < p; ++j) noise[j] = rng.gaussian();
      }
      for (std::size_t j = 0; j < p; ++j) {
        double numer = acc[j];
        if (z > 0.0) numer += z * clip_c * noise[j];
        const double m = numer / qn;
        dir[j] = m + lambda * x[j];
      }
    }

    for (std::size_t j = 0; j < p; ++j) x[j] -= eta * dir[j];
    if (cfg.projection_radius) {
      const double nrm = l2(x);
      if (nrm > *cfg.projection_radius) {
        const double f = *cfg.projection_radius / nrm;
        for (std::size_t j = 0; j < p; ++j) x[j] *= f;
      }
    }
    if (!all_finite(x)) abort_nonfinite("dp_sgd", t, x);

    for (std::size_t j = 0; j < p; ++j) sum_x[j] += x[j];
    trace.steps.push_back({t, eta, fval, grad_norm});
    if (cfg.record_iterates) trace.iterates.push_back(x);
  }

  trace.final_params = x;
  return {trace.final_params, std::move(trace)};
}

std::pair<std::vector<double>, RunTrace> dp_sgd(const Dataset& ds, const LossSpec& spec,
                                                const SgdConfig& cfg) {
  LossSpec s = spec;
  s.clip = cfg.clip;
  GlmObjective obj(ds, s);
  return dp_sgd(obj, cfg);
}

namespace {

// Damped Newton warm start for dense binary logistic; returns the best point
// reached (possibly {} sized on entry problems). The caller still certifies
// with the gradient-descent loop, so this only has to get close.
std::vector<double> newton_warm_start(const GlmObjective& obj) {
  const Dataset& ds = obj.dataset();
  const LossSpec& spec = obj.spec();
  const std::size_t p = obj.dim();
  std::vector<double> x(p, 0.0), g(p, 0.0), d(p, 0.0), trial(p, 0.0);
  double f = obj.value_and_gradient(x, g, false);
  for (int it = 0; it < 100; ++it) {
    if (l2(g) <= 1e-12) break;
    HessianMatrix h = hessian(spec, ds, x);
    std::vector<double> chol = std::move(h.a);
    if (!cholesky_inplace(h.p, chol)) break;
    d = g;
    cholesky_solve(h.p, chol, d);
    double gd = 0.0;
    for (std::size_t j = 0; j < p; ++j) gd += g[j] * d[j];
    if (!(gd > 0.0) || !all_finite(d)) break;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = x[j] - step * d[j];
      const double ft = obj.value(trial);
      if (std::isfinite(ft) && ft <= f - 0.25 * step * gd) {
        x = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    f = obj.value_and_gradient(x, g, false);
  }
  return x;
}

}  // namespace

std::vector<double> nonprivate_optimum(const Objective& obj, double tol,
                                       std::vector<double> warm_start) {
  if (!(tol > 0.0)) throw std::invalid_argument("nonprivate_optimum: tol must be > 0");
  const std::size_t p = obj.dim();
  std::vector<double> x;
  if (warm_start.empty()) {
    x.assign(p, 0.0);
  } else {
    if (warm_start.size() != p)
      throw std::invalid_argument("nonprivate_optimum: warm start dimension mismatch");
    x = std::move(warm_start);
  }
  std::vector<double> g(p, 0.0), trial(p, 0.0);
  double f = obj.value_and_gradient(x, g, false);
  double eta = 1.0;
  const std::int64_t cap = 1000000;
  for (std::int64_t it = 0; it < cap; ++it) {
    const double gn = l2(g);
    if (gn <= tol) return x;
    const double gg = gn * gn;
    bool moved = false;
    while (eta >= 1e-18) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = x[j] - eta * g[j];
      const double ft = obj.value(trial);
      if (std::isfinite(ft) && ft <= f - 0.5 * eta * gg) {
        x.swap(trial);
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved)
      throw std::runtime_error("nonprivate_optimum: line search stalled, gradient norm " +
                               std::to_string(gn));
    f = obj.value_and_gradient(x, g, false);
    eta = std::min(eta * 2.0, 1e6);
  }
  throw std::runtime_error("nonprivate_optimum: iteration cap reached, gradient norm " +
                           std::to_string(l2(g)));
}

std::vector<double> nonprivate_optimum(const Dataset& ds, const LossSpec& spec, double tol) {
  GlmObjective obj(ds, spec);
  std::vector<double> warm;
  if (spec.kind == LossKind::logistic && ds.p <= 2048 && ds.num_classes == 2)
    warm = newton_warm_start(obj);
  return nonprivate_optimum(obj, tol, std::move(warm));
}

double contraction_sensitivity(double eta, double clip, double lambda, std::int64_t steps,
                               std::int64_t n) {
  if (!(eta > 0.0) || !(clip > 0.0) || !(lambda >= 0.0) || steps < 1 || n < 1)
    throw std::invalid_argument("contraction_sensitivity: invalid arguments");
  const double r = 1.0 - eta * lambda;
  double sum = 0.0, pw = 1.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    sum += pw;
    pw *= r;
  }
  return (2.0 * eta * clip / static_cast<double>(n)) * sum;
}

std::vector<double> output_perturbation_gd(const Dataset& ds, const LossSpec& spec,
                                           const PrivacyBudget& budget, std::int64_t steps,
                                           double eta, std::uint64_t seed) {
  if (!(spec.lambda > 0.0))
    throw std::invalid_argument("output_perturbation_gd: lambda must be > 0 (no contraction)");
  const double beta = smoothness_bound(ds, spec);
  if (eta > 1.0 / beta * (1.0 + 1e-12))
    throw std::invalid_argument("output_perturbation_gd: eta exceeds 1/smoothness");

  GdConfig cfg;
  cfg.steps = steps;
  cfg.schedule = {ScheduleKind::constant, eta, 1.0, 1.0, 1.0, 0};
  cfg.clip = spec.clip;
  cfg.sigma = 0.0;
  cfg.seed = seed;
  auto [x, trace] = dp_gd(ds, spec, cfg);

  const double delta_s = contraction_sensitivity(eta, spec.clip, spec.lambda, steps, ds.n);
  const double z = single_shot_noise_multiplier(budget);
  Rng rng(mix_seed({seed, hash_bytes("out_gd_noise")}));
  for (double& v : x) v += z * delta_s * rng.gaussian();
  return x;
}

std::vector<double> train_onepass_sgd(const Dataset& ds, const LossSpec& spec, double eta,
                                      std::uint64_t seed) {
  if (!(eta > 0.0)) throw std::invalid_argument("train_onepass_sgd: eta must be > 0");
  GlmObjective obj(ds, spec);
  const std::size_t p = obj.dim();
  Rng rng(seed);
  std::vector<std::int64_t> perm(static_cast<std::size_t>(ds.n));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int64_t>(i);
  rng.shuffle(perm);

  std::vector<double> x(p, 0.0), g(p, 0.0);
  for (std::int64_t i : perm) {
    g.assign(p, 0.0);
    obj.example_clipped_gradient(i, x, g);
    for (std::size_t j = 0; j < p; ++j) x[j] -= eta * (g[j] + spec.lambda * x[j]);
  }
  if (!all_finite(x)) abort_nonfinite("train_onepass_sgd", ds.n, x);
  return x;
}

std::vector<double> output_perturbation_sgd(const Dataset& ds, const LossSpec& spec,
                                            const PrivacyBudget& budget, double eta,
                                            std::uint64_t seed) {
  if (!(spec.lambda >= 0.0))
    throw std::invalid_argument("output_perturbation_sgd: lambda must be >= 0");
  const double beta = smoothness_bound(ds, spec);
  if (eta > 1.0 / beta * (1.0 + 1e-12))
    throw std::invalid_argument("output_perturbation_sgd: eta exceeds 1/smoothness");

  std::vector<double> x = train_onepass_sgd(ds, spec, eta, seed);
  const double delta_s = 2.0 * eta * spec.clip;
  const double z = single_shot_noise_multiplier(budget);
  Rng rng(mix_seed({seed, hash_bytes("out_sgd_noise")}));
  for (double& v : x) v += z * delta_s * rng.gaussian();
  return x;
}

}  // namespace dperm
