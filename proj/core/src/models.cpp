#include "dperm/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dperm/linalg.hpp"
#include "dperm/models_detail.hpp"

namespace dperm {
namespace {

double softplus(double x) {  // log(1 + e^x), stable
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

std::int32_t softmax_classes(const LossSpec& spec, std::int32_t p,
                             const Vec& w) {
  if (spec.kind == LossKind::logistic) {
    if (w.size() != static_cast<std::size_t>(p)) {
      throw std::invalid_argument("logistic parameter must have length p");
    }
    return 2;
  }
  if (p <= 0 || w.size() % static_cast<std::size_t>(p) != 0) {
    throw std::invalid_argument("softmax parameter must have length K*p");
  }
  std::int32_t k = static_cast<std::int32_t>(w.size() / static_cast<std::size_t>(p));
  if (k < 2) throw std::invalid_argument("softmax needs K >= 2");
  return k;
}

void check_label(std::int32_t label, std::int32_t k) {
  if (label < 0 || label >= k) throw std::invalid_argument("label out of range");
}

// Class scores s_k = <w_k, a> for softmax.
void softmax_scores(const FeatureRow& row, const Vec& w, std::int32_t p,
                    std::int32_t k, std::vector<double>& scores) {
  scores.assign(k, 0.0);
  for (std::int32_t c = 0; c < k; ++c) {
    scores[c] = row.dot(w.data() + static_cast<std::size_t>(c) * p);
  }
}

// Probabilities q_k = exp(s_k - max)/sum; returns log-sum-exp.
double softmax_probs(const std::vector<double>& scores,
                     std::vector<double>& probs) {
  double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  probs.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp(scores[i] - m);
    sum += probs[i];
  }
  for (double& q : probs) q /= sum;
  return m + std::log(sum);
}

}  // namespace

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double per_example_loss(const LossSpec& spec, const FeatureRow& row,
                        std::int32_t label, const Vec& w) {
  if (spec.kind == LossKind::logistic) {
    softmax_classes(spec, row.dim, w);
    check_label(label, 2);
    double y = label == 1 ? 1.0 : -1.0;
    double m = y * row.dot(w.data());
    return softplus(-m);
  }
  std::int32_t k = softmax_classes(spec, row.dim, w);
  check_label(label, k);
  std::vector<double> scores, probs;
  softmax_scores(row, w, row.dim, k, scores);
  double lse = softmax_probs(scores, probs);
  return lse - scores[label];
}

Vec per_example_gradient(const LossSpec& spec, const FeatureRow& row,
                         std::int32_t label, const Vec& w) {
  Vec g(w.size(), 0.0);
  if (spec.kind == LossKind::logistic) {
    softmax_classes(spec, row.dim, w);
    check_label(label, 2);
    double y = label == 1 ? 1.0 : -1.0;
    double m = y * row.dot(w.data());
    double c = -y * sigmoid(-m);
    for (const auto& [idx, v] : row.entries) g[idx] = c * v;
    return g;
  }
  std::int32_t k = softmax_classes(spec, row.dim, w);
  check_label(label, k);
  std::vector<double> scores, probs;
  softmax_scores(row, w, row.dim, k, scores);
  softmax_probs(scores, probs);
  for (std::int32_t c = 0; c < k; ++c) {
    double coef = probs[c] - (c == label ? 1.0 : 0.0);
    for (const auto& [idx, v] : row.entries) {
      g[static_cast<std::size_t>(c) * row.dim + idx] = coef * v;
    }
  }
  return g;
}

Vec clip(Vec g, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("clip threshold must be positive");
  double s = 0.0;
  for (double x : g) s += x * x;
  double norm = std::sqrt(s);
  if (norm > c) {
    double f = c / norm;
    for (double& x : g) x = f * x;
  }
  return g;
}

namespace detail {

double glm_accumulate(const LossSpec& spec, const Dataset& ds, const Vec& w,
                      Vec* grad_out, bool clipped, bool want_value) {
  const std::int32_t p = ds.p;
  const std::int32_t k = softmax_classes(spec, p, w);
  if (spec.kind == LossKind::softmax && k != ds.num_classes) {
    throw std::invalid_argument("softmax parameter classes != dataset classes");
  }
  if (spec.kind == LossKind::logistic && ds.num_classes != 2) {
    throw std::invalid_argument("logistic requires a 2-class dataset");
  }
  if (grad_out) grad_out->assign(w.size(), 0.0);
  const double cthr = spec.clip;
  if (grad_out && clipped && !(cthr > 0.0)) {
    throw std::invalid_argument("clip threshold must be positive");
  }
  double loss_acc = 0.0;
  std::vector<double> scores, probs, scratch;
  for (std::int32_t i = 0; i < ds.n; ++i) {
    const FeatureRow& row = ds.rows[i];
    const std::int32_t label = ds.labels[i];
    if (spec.kind == LossKind::logistic) {
      double y = label == 1 ? 1.0 : -1.0;
      double m = y * row.dot(w.data());
      if (want_value) loss_acc += softplus(-m);
      if (grad_out) {
        double c = -y * sigmoid(-m);
        const std::size_t nnz = row.entries.size();
        scratch.resize(nnz);
        double s = 0.0;
        for (std::size_t e = 0; e < nnz; ++e) {
          double t = c * row.entries[e].second;
          scratch[e] = t;
          s += t * t;
        }
        double norm = std::sqrt(s);
        Vec& acc = *grad_out;
        if (clipped && norm > cthr) {
          double f = cthr / norm;
          for (std::size_t e = 0; e < nnz; ++e) {
            acc[row.entries[e].first] += f * scratch[e];
          }
        } else {
          for (std::size_t e = 0; e < nnz; ++e) {
            acc[row.entries[e].first] += scratch[e];
          }
        }
      }
    } else {
      softmax_scores(row, w, p, k, scores);
      double lse = softmax_probs(scores, probs);
      if (want_value) loss_acc += lse - scores[label];
      if (grad_out) {
        const std::size_t nnz = row.entries.size();
        scratch.resize(nnz * k);
        double s = 0.0;
        for (std::int32_t c = 0; c < k; ++c) {
          double coef = probs[c] - (c == label ? 1.0 : 0.0);
          for (std::size_t e = 0; e < nnz; ++e) {
            double t = coef * row.entries[e].second;
            scratch[c * nnz + e] = t;
            s += t * t;
          }
        }
        double norm = std::sqrt(s);
        Vec& acc = *grad_out;
        double f = (clipped && norm > cthr) ? cthr / norm : 1.0;
        if (f != 1.0) {
          for (std::int32_t c = 0; c < k; ++c) {
            for (std::size_t e = 0; e < nnz; ++e) {
              acc[static_cast<std::size_t>(c) * p + row.entries[e].first] +=
                  f * scratch[c * nnz + e];
            }
          }
        } else {
          for (std::int32_t c = 0; c < k; ++c) {
            for (std::size_t e = 0; e < nnz; ++e) {
              acc[static_cast<std::size_t>(c) * p + row.entries[e].first] +=
                  scratch[c * nnz + e];
            }
          }
        }
      }
    }
  }
  if (grad_out) {
    Vec& g = *grad_out;
    const double n = static_cast<double>(ds.n);
    for (std::size_t j = 0; j < g.size(); ++j) {
      double m = g[j] / n;
      g[j] = m + spec.lambda * w[j];
    }
  }
  if (!want_value) return 0.0;
  double wsq = 0.0;
  for (double x : w) wsq += x * x;
  return loss_acc / static_cast<double>(ds.n) + 0.5 * spec.lambda * wsq;
}

double add_example_clipped_gradient(const LossSpec& spec, const FeatureRow& row,
                                    std::int32_t label, const Vec& w, Vec& out) {
  const double cthr = spec.clip;
  if (!(cthr > 0.0)) throw std::invalid_argument("clip threshold must be positive");
  if (spec.kind == LossKind::logistic) {
    double y = label == 1 ? 1.0 : -1.0;
    double m = y * row.dot(w.data());
    double c = -y * sigmoid(-m);
    double s = 0.0;
    for (const auto& [idx, v] : row.entries) {
      double t = c * v;
      s += t * t;
    }
    double norm = std::sqrt(s);
    double f = norm > cthr ? cthr / norm : 1.0;
    for (const auto& [idx, v] : row.entries) {
      double t = c * v;
      out[idx] += f == 1.0 ? t : f * t;
    }
    return norm;
  }
  const std::int32_t p = row.dim;
  const std::int32_t k = softmax_classes(spec, p, w);
  std::vector<double> scores, probs;
  softmax_scores(row, w, p, k, scores);
  softmax_probs(scores, probs);
  double s = 0.0;
  for (std::int32_t c = 0; c < k; ++c) {
    double coef = probs[c] - (c == label ? 1.0 : 0.0);
    for (const auto& [idx, v] : row.entries) {
      double t = coef * v;
      s += t * t;
    }
  }
  double norm = std::sqrt(s);
  double f = norm > cthr ? cthr / norm : 1.0;
  for (std::int32_t c = 0; c < k; ++c) {
    double coef = probs[c] - (c == label ? 1.0 : 0.0);
    for (const auto& [idx, v] : row.entries) {
      double t = coef * v;
      out[static_cast<std::size_t>(c) * p + idx] += f == 1.0 ? t : f * t;
    }
  }
  return norm;
}

}  // namespace detail

double full_objective(const LossSpec& spec, const Dataset& ds, const Vec& w) {
  return detail::glm_accumulate(spec, ds, w, nullptr, false, true);
}

Vec full_gradient(const LossSpec& spec, const Dataset& ds, const Vec& w,
                  bool clipped) {
  Vec g;
  detail::glm_accumulate(spec, ds, w, &g, clipped, false);
  return g;
}

double HessianMatrix::trace() const {
  double s = 0.0;
  for (std::int32_t i = 0; i < p; ++i) s += at(i, i);
  return s;
}

HessianMatrix hessian(const LossSpec& spec, const Dataset& ds, const Vec& w) {
  if (spec.kind != LossKind::logistic) {
    throw std::runtime_error("hessian: only binary logistic is supported");
  }
  if (ds.p > 2048) {
    throw std::runtime_error("hessian: p exceeds the dense limit (2048)");
  }
  if (w.size() != static_cast<std::size_t>(ds.p)) {
    throw std::invalid_argument("hessian: parameter must have length p");
  }
  HessianMatrix h;
  h.p = ds.p;
  h.lambda_hint = spec.lambda;
  h.a.assign(static_cast<std::size_t>(ds.p) * ds.p, 0.0);
  const double inv_n = 1.0 / static_cast<double>(ds.n);
  for (std::int32_t i = 0; i < ds.n; ++i) {
    const FeatureRow& row = ds.rows[i];
    double s = sigmoid(row.dot(w.data()));
    double c = s * (1.0 - s) * inv_n;
    for (const auto& [j1, v1] : row.entries) {
      const double cv1 = c * v1;
      double* out = &h.a[static_cast<std::size_t>(j1) * ds.p];
      for (const auto& [j2, v2] : row.entries) out[j2] += cv1 * v2;
    }
  }
  for (std::int32_t j = 0; j < ds.p; ++j) h.at(j, j) += spec.lambda;
  return h;
}

double smoothness_bound(const Dataset& ds, const LossSpec& spec) {
  if (spec.kind != LossKind::logistic) {
    throw std::runtime_error("smoothness_bound: only binary logistic is supported");
  }
  if (ds.p > 2048) {
    throw std::runtime_error("smoothness_bound: p exceeds the dense limit (2048)");
  }
  std::vector<double> m(static_cast<std::size_t>(ds.p) * ds.p, 0.0);
  const double c = 1.0 / (4.0 * static_cast<double>(ds.n));
  for (std::int32_t i = 0; i < ds.n; ++i) {
    const FeatureRow& row = ds.rows[i];
    for (const auto& [j1, v1] : row.entries) {
      const double cv1 = c * v1;
      double* out = &m[static_cast<std::size_t>(j1) * ds.p];
      for (const auto& [j2, v2] : row.entries) out[j2] += cv1 * v2;
    }
  }
  double lmax;
  if (ds.p <= 256) {
    lmax = jacobi_eigenvalues(ds.p, std::move(m)).back();
  } else {
    lmax = largest_eigenvalue_psd(ds.p, m);
  }
  return lmax + spec.lambda;
}

std::int32_t predict_class(const LossSpec& spec, const FeatureRow& row,
                           const Vec& w) {
  if (spec.kind == LossKind::logistic) {
    return row.dot(w.data()) > 0.0 ? 1 : 0;
  }
  std::int32_t k = softmax_classes(spec, row.dim, w);
  std::int32_t best = 0;
  double best_score = row.dot(w.data());
  for (std::int32_t c = 1; c < k; ++c) {
    double s = row.dot(w.data() + static_cast<std::size_t>(c) * row.dim);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

double accuracy_percent(const LossSpec& spec, const Dataset& ds, const Vec& w) {
  std::int32_t correct = 0;
  for (std::int32_t i = 0; i < ds.n; ++i) {
    if (predict_class(spec, ds.rows[i], w) == ds.labels[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(ds.n);
}

}  // namespace dperm
