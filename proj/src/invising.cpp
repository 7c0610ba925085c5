#include "bmprior/invising.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmprior/error.hpp"

namespace bmprior {
namespace {

constexpr double kAtanhClamp = 1.0 - 1e-12;
constexpr double kMaxCondition = 1e12;

double clamp_mu(double mu) { return std::clamp(mu, -kMagnetizationClamp, kMagnetizationClamp); }

double safe_atanh(double x) { return std::atanh(std::clamp(x, -kAtanhClamp, kAtanhClamp)); }

void check_moments(const EmpiricalMoments& m) {
    const Eigen::Index n = m.mu.size();
    if (n == 0) throw InvalidArgument("moments have no sites");
    if (m.gamma.rows() != n || m.gamma.cols() != n)
        throw InvalidArgument("correlation matrix shape does not match magnetizations");
    if (!m.mu.allFinite() || !m.gamma.allFinite()) throw InvalidArgument("moments are not finite");
}

}  // namespace

Eigen::MatrixXd invert_covariance(const Eigen::MatrixXd& gamma, double ridge) {
    if (gamma.rows() != gamma.cols()) throw InvalidArgument("covariance must be square");
    if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be nonnegative");
    const Eigen::Index n = gamma.rows();
    Eigen::MatrixXd a = gamma;
    a.diagonal().array() += ridge;

    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-15)
        return llt.solve(Eigen::MatrixXd::Identity(n, n));

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw NumericalError("covariance matrix is singular (ridge " + std::to_string(ridge) + ")");
    return lu.inverse();
}

Eigen::MatrixXd invert_covariance(const EmpiricalMoments& m, double ridge) {
    check_moments(m);
    return invert_covariance(m.gamma, ridge);
}

CovarianceInverse invert_covariance_auto(const Eigen::MatrixXd& gamma, std::optional<double> ridge) {
    if (ridge) return {invert_covariance(gamma, *ridge), *ridge};
    const Eigen::Index n = gamma.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(gamma);
    if (llt.info() == Eigen::Success && llt.rcond() >= 1.0 / kMaxCondition)
        return {llt.solve(Eigen::MatrixXd::Identity(n, n)), 0.0};
    const double scale = n > 0 ? gamma.trace() / static_cast<double>(n) : 0.0;
    const double fallback = 1e-8 * (scale > 0.0 ? scale : 1.0);
    return {invert_covariance(gamma, fallback), fallback};
}

IsingModel infer_nmf(const EmpiricalMoments& m, std::optional<double> ridge) {
    check_moments(m);
    const Eigen::Index n = m.mu.size();
    const Eigen::MatrixXd inv = invert_covariance_auto(m.gamma, ridge).inverse;

    IsingModel model = IsingModel::zeros(n, m.side);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) {
            // Average the two halves so w is exactly symmetric.
            const double w = -0.5 * (inv(i, j) + inv(j, i));
            model.w(i, j) = w;
            model.w(j, i) = w;
        }
    const Eigen::VectorXd mu = m.mu.unaryExpr(&clamp_mu);
    for (Eigen::Index i = 0; i < n; ++i) model.h(i) = std::atanh(mu(i)) - model.w.row(i).dot(mu);
    return model;
}

double bethe_coupling(double mu_i, double mu_j, double k) {
    if (k == 0.0) return 0.0;
    const double a = 1.0 - mu_i * mu_i, b = 1.0 - mu_j * mu_j;
    const double mm = mu_i * mu_j;
    const double d = std::sqrt(1.0 + 4.0 * a * b * k * k);
    const double x = 0.25 - mm * k * d + (2.0 * mm * mm - mu_i * mu_i - mu_j * mu_j) * k * k;
    double arg;
    if (x >= 0.0) {
        // mm - d/(2k) + sqrt(x)/k, with the 1/k cancellation removed by
        // multiplying through by the conjugate sqrt(x) + d/2.
        arg = mm + (-mm * d + (mm * mm - 1.0) * k) / (std::sqrt(x) + 0.5 * d);
    } else {
        arg = mm - d / (2.0 * k);
    }
    if (!std::isfinite(arg)) throw NumericalError("Bethe coupling is not finite");
    return safe_atanh(arg);
}

double bethe_cavity(double mu1, double mu2, double t) {
    // (1 - t^2 - sqrt((1-t^2)^2 - 4 t p q)) / (2 t q), p = mu1 - mu2 t,
    // q = mu2 - mu1 t, rewritten as 2p / (1 - t^2 + sqrt(...)). Both
    // removable singularities (t -> 0, q -> 0) disappear in this form.
    const double p = mu1 - mu2 * t, q = mu2 - mu1 * t;
    const double a = 1.0 - t * t;
    const double disc = std::max(0.0, a * a - 4.0 * t * p * q);
    return 2.0 * p / (a + std::sqrt(disc));
}

IsingModel infer_ba(const EmpiricalMoments& m, std::optional<double> ridge) {
    check_moments(m);
    const Eigen::Index n = m.mu.size();
    const Eigen::MatrixXd inv = invert_covariance_auto(m.gamma, ridge).inverse;
    const Eigen::VectorXd mu = m.mu.unaryExpr(&clamp_mu);

    IsingModel model = IsingModel::zeros(n, m.side);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double w;
            try {
                w = bethe_coupling(mu(i), mu(j), 0.5 * (inv(i, j) + inv(j, i)));
            } catch (const NumericalError&) {
                throw NumericalError("Bethe coupling is not finite for pair (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
            }
            model.w(i, j) = w;
            model.w(j, i) = w;
        }
    for (Eigen::Index i = 0; i < n; ++i) {
        double field = std::atanh(mu(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i || model.w(i, j) == 0.0) continue;
            const double t = std::tanh(model.w(i, j));
            field -= safe_atanh(t * bethe_cavity(mu(j), mu(i), t));
        }
        model.h(i) = field;
    }
    return model;
}

}  // namespace bmprior
