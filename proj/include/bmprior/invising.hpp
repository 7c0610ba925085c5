#pragma once

#include <Eigen/Dense>
#include <optional>

#include "bmprior/ising_model.hpp"
#include "bmprior/patchset.hpp"

namespace bmprior {

// Largest |mu_i| used inside atanh.
inline constexpr double kMagnetizationClamp = 1.0 - 1e-6;

struct CovarianceInverse {
    Eigen::MatrixXd inverse;
    double ridge = 0.0;  // ridge actually added to the diagonal
};

/// (gamma + ridge I)^{-1} via Cholesky, falling back to full-pivot LU.
/// Throws NumericalError when the regularized matrix is singular.
Eigen::MatrixXd invert_covariance(const Eigen::MatrixXd& gamma, double ridge);
Eigen::MatrixXd invert_covariance(const EmpiricalMoments& m, double ridge);

/// With an explicit ridge, behaves like invert_covariance. Without one, tries
/// the plain inverse and switches to ridge = 1e-8 * trace(gamma) / N when the
/// Cholesky factorization fails or the condition estimate exceeds 1e12.
CovarianceInverse invert_covariance_auto(const Eigen::MatrixXd& gamma, std::optional<double> ridge);

/// Naive mean-field inversion:
///   w_ij = -(gamma^-1)_ij (i != j),  h_i = atanh(mu_i) - sum_j w_ij mu_j.
IsingModel infer_nmf(const EmpiricalMoments& m, std::optional<double> ridge = std::nullopt);

/// Bethe-approximation inversion; exact on tree-structured models.
IsingModel infer_ba(const EmpiricalMoments& m, std::optional<double> ridge = std::nullopt);

// Coupling of the Bethe pair formula for one pair, given mu_i, mu_j and
// K = (gamma^-1)_ij. Exposed for testing.
double bethe_coupling(double mu_i, double mu_j, double inverse_ij);

// f(mu1, mu2, t) of the Bethe field formula, in a cancellation-free form.
double bethe_cavity(double mu1, double mu2, double t);

}  // namespace bmprior
