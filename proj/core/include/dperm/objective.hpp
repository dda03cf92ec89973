#pragma once

#include <cstdint>
#include <vector>

#include "dperm/dataset.hpp"
#include "dperm/models.hpp"

namespace dperm {

// Minimization target F(x) = (1/n) sum_i f_i(x) + (lambda/2) |x|^2 seen by the
// optimizers. The clipped full gradient is (1/n) sum_i clip_C(grad f_i) +
// lambda x; per-example access exposes clip_C(grad f_i) alone so stochastic
// updates can add noise and the ridge term themselves.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual std::int64_t num_examples() const = 0;
  virtual double l2_lambda() const = 0;
  virtual double clip_threshold() const = 0;

  virtual double value(const std::vector<double>& x) const = 0;

  // Writes the (optionally clipped) full gradient into g and returns F(x).
  virtual double value_and_gradient(const std::vector<double>& x,
                                    std::vector<double>& g, bool clipped) const = 0;

  // Adds clip_C(grad f_i(x)) into out (no ridge term); returns the unclipped
  // per-example gradient norm.
  virtual double example_clipped_gradient(std::int64_t i, const std::vector<double>& x,
                                          std::vector<double>& out) const = 0;
};

// Regularized GLM empirical risk over a dataset.
class GlmObjective final : public Objective {
 public:
  GlmObjective(const Dataset& ds, const LossSpec& spec);

  std::size_t dim() const override;
  std::int64_t num_examples() const override { return ds_->n; }
  double l2_lambda() const override { return spec_.lambda; }
  double clip_threshold() const override { return spec_.clip; }

  double value(const std::vector<double>& x) const override;
  double value_and_gradient(const std::vector<double>& x, std::vector<double>& g,
                            bool clipped) const override;
  double example_clipped_gradient(std::int64_t i, const std::vector<double>& x,
                                  std::vector<double>& out) const override;

  const Dataset& dataset() const { return *ds_; }
  const LossSpec& spec() const { return spec_; }

 private:
  const Dataset* ds_;
  LossSpec spec_;
};

// F(x) = 1/2 (x - c)^T A (x - c) with A symmetric PSD, treated as a single
// "example" whose gradient may be clipped. Used for controlled convergence
// and curvature studies.
class QuadraticObjective final : public Objective {
 public:
  // Diagonal A.
  QuadraticObjective(std::vector<double> diag, std::vector<double> center,
                     double clip = 1e100);
  // Dense symmetric A (row-major p x p).
  QuadraticObjective(std::size_t p, std::vector<double> dense_a,
                     std::vector<double> center, double clip = 1e100);

  std::size_t dim() const override { return center_.size(); }
  std::int64_t num_examples() const override { return 1; }
  double l2_lambda() const override { return 0.0; }
  double clip_threshold() const override { return clip_; }

  double value(const std::vector<double>& x) const override;
  double value_and_gradient(const std::vector<double>& x, std::vector<double>& g,
                            bool clipped) const override;
  double example_clipped_gradient(std::int64_t i, const std::vector<double>& x,
                                  std::vector<double>& out) const override;

  const std::vector<double>& center() const { return center_; }

 private:
  void unclipped_gradient(const std::vector<double>& x, std::vector<double>& g) const;

  bool diagonal_ = true;
  std::vector<double> a_;  // diag (p) or dense row-major (p*p)
  std::vector<double> center_;
  double clip_ = 1e100;
};

}  // namespace dperm
