#include "dperm/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "dperm/models_detail.hpp"

namespace dperm {

GlmObjective::GlmObjective(const Dataset& ds, const LossSpec& spec)
    : ds_(&ds), spec_(spec) {
  if (spec.kind == LossKind::softmax && ds.num_classes < 2)
    throw std::invalid_argument("GlmObjective: softmax needs >= 2 classes");
}

std::size_t GlmObjective::dim() const {
  const std::size_t p = static_cast<std::size_t>(ds_->p);
  return spec_.kind == LossKind::logistic ? p
                                          : p * static_cast<std::size_t>(ds_->num_classes);
}

double GlmObjective::value(const std::vector<double>& x) const {
  return detail::glm_accumulate(spec_, *ds_, x, nullptr, false, true);
}

double GlmObjective::value_and_gradient(const std::vector<double>& x,
                                        std::vector<double>& g, bool clipped) const {
  return detail::glm_accumulate(spec_, *ds_, x, &g, clipped, true);
}

double GlmObjective::example_clipped_gradient(std::int64_t i, const std::vector<double>& x,
                                              std::vector<double>& out) const {
  if (i < 0 || i >= ds_->n)
    throw std::out_of_range("GlmObjective: example index out of range");
  return detail::add_example_clipped_gradient(spec_, ds_->rows[static_cast<std::size_t>(i)],
                                              ds_->labels[static_cast<std::size_t>(i)], x, out);
}

QuadraticObjective::QuadraticObjective(std::vector<double> diag, std::vector<double> center,
                                       double clip)
    : diagonal_(true), a_(std::move(diag)), center_(std::move(center)), clip_(clip) {
  if (a_.size() != center_.size())
    throw std::invalid_argument("QuadraticObjective: diag/center size mismatch");
  if (!(clip_ > 0.0)) throw std::invalid_argument("QuadraticObjective: clip must be > 0");
}

QuadraticObjective::QuadraticObjective(std::size_t p, std::vector<double> dense_a,
                                       std::vector<double> center, double clip)
    : diagonal_(false), a_(std::move(dense_a)), center_(std::move(center)), clip_(clip) {
  if (center_.size() != p || a_.size() != p * p)
    throw std::invalid_argument("QuadraticObjective: dense size mismatch");
  if (!(clip_ > 0.0)) throw std::invalid_argument("QuadraticObjective: clip must be > 0");
}

double QuadraticObjective::value(const std::vector<double>& x) const {
  const std::size_t p = center_.size();
  if (x.size() != p) throw std::invalid_argument("QuadraticObjective: dim mismatch");
  double v = 0.0;
  if (diagonal_) {
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x[j] - center_[j];
      v += a_[j] * d * d;
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < p; ++j) row += a_[i * p + j] * (x[j] - center_[j]);
      v += (x[i] - center_[i]) * row;
    }
  }
  return 0.5 * v;
}

void QuadraticObjective::unclipped_gradient(const std::vector<double>& x,
                                            std::vector<double>& g) const {
  const std::size_t p = center_.size();
  if (x.size() != p) throw std::invalid_argument("QuadraticObjective: dim mismatch");
  g.assign(p, 0.0);
  if (diagonal_) {
    for (std::size_t j = 0; j < p; ++j) g[j] = a_[j] * (x[j] - center_[j]);
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < p; ++j) row += a_[i * p + j] * (x[j] - center_[j]);
      g[i] = row;
    }
  }
}

double QuadraticObjective::value_and_gradient(const std::vector<double>& x,
                                              std::vector<double>& g, bool clipped) const {
  unclipped_gradient(x, g);
  if (clipped) g = clip(std::move(g), clip_);
  return value(x);
}

double QuadraticObjective::example_clipped_gradient(std::int64_t i,
                                                    const std::vector<double>& x,
                                                    std::vector<double>& out) const {
  if (i != 0) throw std::out_of_range("QuadraticObjective: example index out of range");
  std::vector<double> g;
  unclipped_gradient(x, g);
  double s = 0.0;
  for (double v : g) s += v * v;
  const double norm = std::sqrt(s);
  const double f = norm > clip_ ? clip_ / norm : 1.0;
  for (std::size_t j = 0; j < g.size(); ++j) out[j] += f * g[j];
  return norm;
}

}  // namespace dperm
