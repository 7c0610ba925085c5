#include <algorithm>
#include <cmath>
#include <optional>

#include "bmprior/error.hpp"
#include "bmprior/gibbs.hpp"
#include "bmprior/invising.hpp"
#include "bmprior/rng.hpp"

namespace bmprior {

void LearnConfig::validate() const {
    if (!(grad_tol > 0.0)) throw InvalidArgument("LearnConfig: grad_tol must be positive");
    if (max_iters < 1) throw InvalidArgument("LearnConfig: max_iters must be >= 1");
    if (!(newton_ridge >= 0.0) || !(gradient_step > 0.0) || max_backtracks < 0 || !(rejection_tol >= 0.0))
        throw InvalidArgument("LearnConfig: invalid step policy");
    mc.validate();
}

namespace {

// Parameters and sufficient statistics are laid out as
// [h_0..h_{N-1}, w_01, w_02, ..., w_{N-2,N-1}] / [S_i..., S_i S_j...].
Eigen::Index parameter_count(Eigen::Index n) { return n + n * (n - 1) / 2; }

Eigen::VectorXd pack_statistics(const Eigen::VectorXd& first, const Eigen::MatrixXd& second) {
    const Eigen::Index n = first.size();
    Eigen::VectorXd v(parameter_count(n));
    v.head(n) = first;
    Eigen::Index k = n;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) v(k++) = second(i, j);
    return v;
}

IsingModel apply_step(const IsingModel& base, const Eigen::VectorXd& step) {
    IsingModel m = base;
    const Eigen::Index n = m.size();
    m.h += step.head(n);
    Eigen::Index k = n;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            m.w(i, j) += step(k);
            m.w(j, i) = m.w(i, j);
            ++k;
        }
    return m;
}

// Covariance of the sufficient statistics over the kept configurations.
Eigen::MatrixXd curvature(const std::vector<std::int8_t>& states, Eigen::Index n) {
    const Eigen::Index p = parameter_count(n);
    const Eigen::Index samples = static_cast<Eigen::Index>(states.size()) / n;
    // Entries are +-1, so float products and sums are exact below 2^24 samples.
    Eigen::MatrixXf phi(samples, p);
    for (Eigen::Index s = 0; s < samples; ++s) {
        const auto* x = states.data() + s * n;
        for (Eigen::Index i = 0; i < n; ++i) phi(s, i) = x[i];
        Eigen::Index k = n;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) phi(s, k++) = static_cast<float>(x[i] * x[j]);
    }
    Eigen::MatrixXf gram = Eigen::MatrixXf::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    const Eigen::VectorXd mean = phi.colwise().sum().cast<double>().transpose() / static_cast<double>(samples);
    Eigen::MatrixXd f = gram.cast<double>() / static_cast<double>(samples);
    f.triangularView<Eigen::StrictlyUpper>() = f.transpose();
    f -= mean * mean.transpose();
    return f;
}

Eigen::VectorXd diagonal_curvature(const McEstimate& est) {
    const Eigen::VectorXd stats = pack_statistics(est.m, est.second());
    return (1.0 - stats.array().square()).matrix();
}

}  // namespace

double moment_residual(const EmpiricalMoments& data, const McEstimate& model_side) {
    const Eigen::MatrixXd data_second = data.gamma + data.mu * data.mu.transpose();
    const Eigen::VectorXd g = pack_statistics(data.mu, data_second) -
                              pack_statistics(model_side.m, model_side.second());
    return g.lpNorm<Eigen::Infinity>();
}

LearnResult learn_mc(const EmpiricalMoments& data, const LearnConfig& cfg) {
    return learn_mc(data, cfg, infer_nmf(data));
}

LearnResult learn_mc(const EmpiricalMoments& data, const LearnConfig& cfg, const IsingModel& init) {
    cfg.validate();
    init.validate();
    const Eigen::Index n = data.mu.size();
    if (init.size() != n) throw InvalidArgument("learn_mc: init model size does not match moments");
    const Eigen::Index p = parameter_count(n);
    const bool dense = static_cast<std::size_t>(p) <= cfg.max_dense_parameters;
    const Eigen::VectorXd target = pack_statistics(data.mu, data.gamma + data.mu * data.mu.transpose());

    std::uint64_t draws = 0;
    auto estimate = [&](const IsingModel& m, bool keep) {
        McConfig mc = cfg.mc;
        mc.temperature = 1.0;
        mc.seed = derive_seed(cfg.mc.seed, 0x4c45524e00000000ULL + draws++);
        return sample_moments(m, mc, keep && dense ? cfg.curvature_samples : 0);
    };
    auto gradient_of = [&](const McEstimate& e) { return Eigen::VectorXd(target - pack_statistics(e.m, e.second())); };

    LearnResult result;
    IsingModel current = init;
    McEstimate est = estimate(current, true);
    Eigen::VectorXd grad = gradient_of(est);
    double residual = grad.lpNorm<Eigen::Infinity>();
    result.model = current;
    result.grad_inf_norm = residual;

    auto record = [&](int iter, const char* type) {
        LearnIteration it{iter, residual, type};
        result.log.push_back(it);
        if (cfg.on_iteration) cfg.on_iteration(it);
    };
    record(0, "start");

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        if (residual < cfg.grad_tol) {
            result.converged = true;
            break;
        }
        result.iterations = iter;

        struct Candidate {
            IsingModel model;
            McEstimate est;
            Eigen::VectorXd grad;
            double residual;
        };
        auto try_step = [&](const Eigen::VectorXd& step) -> std::optional<Candidate> {
            if (!step.allFinite()) return std::nullopt;
            IsingModel m = apply_step(current, step);
            McEstimate e = estimate(m, true);
            Eigen::VectorXd g = gradient_of(e);
            const double r = g.lpNorm<Eigen::Infinity>();
            if (r > residual + cfg.rejection_tol) return std::nullopt;
            return Candidate{std::move(m), std::move(e), std::move(g), r};
        };

        Eigen::VectorXd newton;
        if (dense && !est.kept_states.empty()) {
            Eigen::MatrixXd f = curvature(est.kept_states, n);
            f.diagonal().array() += cfg.newton_ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(f);
            if (ldlt.info() == Eigen::Success) newton = ldlt.solve(grad);
        } else {
            newton = grad.cwiseQuotient((diagonal_curvature(est).array() + cfg.newton_ridge).matrix());
        }

        std::optional<Candidate> next;
        const char* type = "newton";
        if (newton.size() == p) next = try_step(newton);
        if (!next) {
            type = "gradient";
            double eta = cfg.gradient_step;
            for (int b = 0; b <= cfg.max_backtracks && !next; ++b, eta *= 0.5) next = try_step(eta * grad);
        }
        if (!next) {
            record(iter, "rejected");
            break;
        }
        current = std::move(next->model);
        est = std::move(next->est);
        grad = std::move(next->grad);
        residual = next->residual;
        record(iter, type);
        if (residual < result.grad_inf_norm) {
            result.model = current;
            result.grad_inf_norm = residual;
        }
    }
    if (residual < cfg.grad_tol) {
        result.converged = true;
        result.model = current;
        result.grad_inf_norm = residual;
    }
    return result;
}

}  // namespace bmprior
