#pragma once

#include <cstdint>
#include <vector>

#include "dperm/dataset.hpp"

namespace dperm {

using Vec = std::vector<double>;

enum class LossKind { logistic, softmax };

// GLM objective description. `lambda` enters the full objective as
// (lambda/2)*||w||^2; `clip` is the per-example gradient clipping threshold C,
// which also serves as the Lipschitz bound in noise calibration.
struct LossSpec {
  LossKind kind = LossKind::logistic;
  double lambda = 0.0;
  double clip = 1.0;
};

// Parameter layout: logistic uses length p (binary labels {0,1} are mapped to
// y in {-1,+1} internally); softmax uses length K*p, class-major, so
// w[k*p + j] is class k, feature j.

double sigmoid(double t);

// Loss of one example, regularizer excluded.
double per_example_loss(const LossSpec& spec, const FeatureRow& row,
                        std::int32_t label, const Vec& w);

// Exact gradient of per_example_loss, regularizer excluded. Dense output.
Vec per_example_gradient(const LossSpec& spec, const FeatureRow& row,
                         std::int32_t label, const Vec& w);

// g if ||g|| <= c, else g scaled to norm c.
Vec clip(Vec g, double c);

// Mean per-example loss plus (lambda/2)*||w||^2.
double full_objective(const LossSpec& spec, const Dataset& ds, const Vec& w);

// Mean of (optionally clipped) per-example gradients plus lambda*w. Clipping
// applies to the un-regularized per-example gradient; the accumulation order
// and arithmetic match the naive per-example loop exactly.
Vec full_gradient(const LossSpec& spec, const Dataset& ds, const Vec& w,
                  bool clipped);

struct HessianMatrix {
  std::int32_t p = 0;
  std::vector<double> a;     // row-major p*p, symmetric
  double lambda_hint = 0.0;  // regularizer added on construction

  double at(std::int32_t i, std::int32_t j) const { return a[i * p + j]; }
  double& at(std::int32_t i, std::int32_t j) { return a[i * p + j]; }
  double trace() const;
};

// Binary logistic only: (1/n) sum_i s_i (1 - s_i) a_i a_i^T + lambda I with
// s_i = sigmoid(<w, a_i>). Dense; requires p <= 2048.
HessianMatrix hessian(const LossSpec& spec, const Dataset& ds, const Vec& w);

// Upper bound on the logistic objective's smoothness:
// lambda_max((1/(4n)) sum_i a_i a_i^T) + lambda.
double smoothness_bound(const Dataset& ds, const LossSpec& spec);

// Predicted class id: logistic thresholds <w,a> at 0, softmax takes argmax.
std::int32_t predict_class(const LossSpec& spec, const FeatureRow& row,
                           const Vec& w);

// Fraction of correct predictions, in percent.
double accuracy_percent(const LossSpec& spec, const Dataset& ds, const Vec& w);

}  // namespace dperm
