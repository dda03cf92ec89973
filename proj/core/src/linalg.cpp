#include "dperm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dperm {
namespace {

double off_diagonal_norm(std::int32_t n, const std::vector<double>& a) {
  double s = 0.0;
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
  }
  return std::sqrt(2.0 * s);
}

double frobenius_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::int32_t n, std::vector<double> a,
                                       int max_sweeps) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("jacobi_eigenvalues: bad dimensions");
  }
  if (n == 1) return {a[0]};
  const double scale = std::max(frobenius_norm(a), 1e-300);
  const double stop = 1e-13 * scale;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(n, a) <= stop) {
      std::vector<double> eig(n);
      for (std::int32_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
      std::sort(eig.begin(), eig.end());
      return eig;
    }
    for (std::int32_t p = 0; p < n - 1; ++p) {
      for (std::int32_t q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (apq == 0.0) continue;
        double app = a[p * n + p];
        double aqq = a[q * n + q];
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::int32_t k = 0; k < n; ++k) {
          double akp = a[k * n + p];
          double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::int32_t k = 0; k < n; ++k) {
          double apk = a[p * n + k];
          double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  throw std::runtime_error("jacobi_eigenvalues: no convergence after sweeps");
}

double largest_eigenvalue_psd(std::int32_t n, const std::vector<double>& a,
                              double tol, int max_iters) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("largest_eigenvalue_psd: bad dimensions");
  }
  std::vector<double> v(n), av(n);
  // Deterministic, incommensurate start so no exact orthogonality to the top
  // eigenvector survives.
  for (std::int32_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * std::sin(i + 1.0);
  double vn = 0.0;
  for (double x : v) vn += x * x;
  vn = std::sqrt(vn);
  for (double& x : v) x /= vn;
  double rho = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    for (std::int32_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &a[static_cast<std::size_t>(i) * n];
      for (std::int32_t j = 0; j < n; ++j) s += row[j] * v[j];
      av[i] = s;
    }
    rho = 0.0;
    for (std::int32_t i = 0; i < n; ++i) rho += v[i] * av[i];
    double res = 0.0;
    for (std::int32_t i = 0; i < n; ++i) {
      double d = av[i] - rho * v[i];
      res += d * d;
    }
    if (std::sqrt(res) <= tol * std::max(1.0, std::abs(rho))) return rho;
    double norm = 0.0;
    for (double x : av) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;  // zero matrix
    for (std::int32_t i = 0; i < n; ++i) v[i] = av[i] / norm;
  }
  throw std::runtime_error("largest_eigenvalue_psd: no convergence");
}

bool cholesky_inplace(std::int32_t n, std::vector<double>& a) {
  for (std::int32_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::int32_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0 || !std::isfinite(d)) return false;
    double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::int32_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::int32_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / l;
    }
  }
  return true;
}

void cholesky_solve(std::int32_t n, const std::vector<double>& chol,
                    std::vector<double>& x) {
  for (std::int32_t i = 0; i < n; ++i) {  // forward: L y = b
    double s = x[i];
    for (std::int32_t k = 0; k < i; ++k) s -= chol[i * n + k] * x[k];
    x[i] = s / chol[i * n + i];
  }
  for (std::int32_t i = n - 1; i >= 0; --i) {  // backward: L^T x = y
    double s = x[i];
    for (std::int32_t k = i + 1; k < n; ++k) s -= chol[k * n + i] * x[k];
    x[i] = s / chol[i * n + i];
  }
}

double smallest_eigenvalue_shifted(std::int32_t n, const std::vector<double>& a,
                                   double shift_hint, double tol,
                                   int max_iters) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("smallest_eigenvalue_shifted: bad dimensions");
  }
  const double scale = std::max(frobenius_norm(a), 1.0);
  // Find a shift strictly below the smallest eigenvalue so A - sI is PD.
  double margin = std::max(1e-8 * scale, 1e-12);
  double shift = shift_hint - margin;
  std::vector<double> fac;
  for (int attempt = 0; attempt < 80; ++attempt) {
    fac = a;
    for (std::int32_t i = 0; i < n; ++i) fac[i * n + i] -= shift;
    if (cholesky_inplace(n, fac)) break;
    margin *= 4.0;
    shift = shift_hint - margin;
    if (attempt == 79) {
      throw std::runtime_error("smallest_eigenvalue_shifted: no PD shift found");
    }
  }
  std::vector<double> v(n);
  for (std::int32_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * std::sin(i + 1.0);
  double vn = 0.0;
  for (double x : v) vn += x * x;
  vn = std::sqrt(vn);
  for (double& x : v) x /= vn;
  double prev = shift;
  for (int it = 0; it < max_iters; ++it) {
    cholesky_solve(n, fac, v);  // v <- (A - sI)^{-1} v
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    // Rayleigh quotient of the original matrix.
    double rho = 0.0;
    for (std::int32_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &a[static_cast<std::size_t>(i) * n];
      for (std::int32_t j = 0; j < n; ++j) s += row[j] * v[j];
      rho += v[i] * s;
    }
    if (it > 0 && std::abs(rho - prev) <= tol * 0.01) return rho;
    prev = rho;
  }
  throw std::runtime_error("smallest_eigenvalue_shifted: no convergence");
}

}  // namespace dperm
