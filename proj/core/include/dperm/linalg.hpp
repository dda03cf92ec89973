#pragma once

#include <cstdint>
#include <vector>

namespace dperm {

// Dense symmetric matrices are stored row-major in a flat vector of length n*n.

// All eigenvalues of a symmetric matrix via cyclic Jacobi rotations, returned
// ascending. Throws if the off-diagonal mass has not converged after
// `max_sweeps` sweeps.
std::vector<double> jacobi_eigenvalues(std::int32_t n, std::vector<double> a,
                                       int max_sweeps = 100);

// Largest eigenvalue of a symmetric positive semidefinite matrix via power
// iteration with a deterministic start, converged when the residual
// ||A v - rho v|| <= tol * max(1, rho). Throws on non-convergence.
double largest_eigenvalue_psd(std::int32_t n, const std::vector<double>& a,
                              double tol = 1e-10, int max_iters = 200000);

// Smallest eigenvalue of a symmetric matrix via inverse power iteration on
// (A - s I) with the shift s started just below `shift_hint` and lowered until
// the factorization succeeds. Absolute eigenvalue tolerance `tol`.
double smallest_eigenvalue_shifted(std::int32_t n, const std::vector<double>& a,
                                   double shift_hint, double tol = 1e-8,
                                   int max_iters = 50000);

// In-place lower Cholesky; returns false if the matrix is not positive
// definite.
bool cholesky_inplace(std::int32_t n, std::vector<double>& a);

// Solves L L^T x = b given the Cholesky factor from cholesky_inplace.
void cholesky_solve(std::int32_t n, const std::vector<double>& chol,
                    std::vector<double>& x);

}  // namespace dperm
