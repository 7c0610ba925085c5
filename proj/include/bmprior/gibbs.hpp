#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bmprior/ising_model.hpp"
#include "bmprior/patchset.hpp"
#include "bmprior/rng.hpp"

namespace bmprior {

struct McConfig {
    std::uint64_t sweeps = 10000;  // measured sweeps per chain; one sweep = N proposals
    std::uint64_t burn_in = 1000;
    unsigned chains = 4;
    std::uint64_t seed = 0;
    double temperature = 1.0;
    // One whole-configuration flip proposal per sweep, accepted by the usual
    // Metropolis rule. Keeps the +- ordered phases mixed at low temperature.
    bool global_flip = true;

    void validate() const;
};

struct McEstimate {
    Eigen::VectorXd m;               // <S_i>
    Eigen::MatrixXd c;               // <S_i S_j> - m_i m_j
    double energy_mean = 0.0;
    double energy_var = 0.0;         // <H^2> - <H>^2
    double energy_var_stderr = 0.0;  // jackknife over batches
    std::uint64_t samples_used = 0;
    // Configurations kept for curvature estimates, row-major by sample.
    std::vector<std::int8_t> kept_states;

    Eigen::MatrixXd second() const { return c + m * m.transpose(); }
};

/// Single-spin-flip Metropolis chain at temperature T. Sites are proposed
/// uniformly at random; a flip with energy change dE is accepted with
/// probability min(1, exp(-dE / T)).
class MetropolisChain {
public:
    MetropolisChain(const IsingModel& model, double temperature, std::uint64_t seed,
                    bool global_flip = true);

    void randomize();
    void set_spins(std::span<const std::int8_t> spins);
    void sweep();

    std::span<const std::int8_t> spins() const noexcept { return spins_; }
    double energy() const noexcept { return energy_; }

private:
    void flip(Eigen::Index i);
    void refresh();

    const IsingModel* model_;
    double beta_;
    bool global_flip_;
    Rng rng_;
    std::vector<std::int8_t> spins_;
    Eigen::VectorXd field_;  // sum_j w_ij S_j + h_i
    double energy_ = 0.0;
    std::uint64_t sweeps_done_ = 0;
};

/// Model-side moments and energy statistics from cfg.chains independent
/// chains (stream seeds derived from cfg.seed and the chain index), each
/// burned in then measured once per sweep. Deterministic in (model, cfg).
/// If keep_states > 0, roughly that many configurations are retained,
/// evenly spaced over each chain.
McEstimate sample_moments(const IsingModel& model, const McConfig& cfg, std::size_t keep_states = 0);

struct HeatPoint {
    double temperature = 0.0;
    double c = 0.0;
    double c_stderr = 0.0;
};

struct HeatCurve {
    std::vector<HeatPoint> points;
    double peak_temperature = 0.0;
};

// C(T) = (<H^2> - <H>^2) / (N T^2) on each grid temperature.
HeatCurve specific_heat_sweep(const IsingModel& model, std::span<const double> t_grid, const McConfig& cfg);

struct LearnIteration {
    int iter = 0;
    double grad_inf_norm = 0.0;
    std::string step_type;  // "start", "newton", "gradient", "rejected"
};

struct LearnConfig {
    double grad_tol = 1e-3;
    int max_iters = 100;
    double newton_ridge = 1e-4;
    double gradient_step = 0.05;
    int max_backtracks = 4;
    // An iterate is accepted if its residual does not exceed the current one
    // by more than this (MC noise allowance).
    double rejection_tol = 0.005;
    // Samples used to estimate the curvature matrix.
    std::size_t curvature_samples = 20000;
    // Parameter count above which the curvature is reduced to its diagonal.
    std::size_t max_dense_parameters = 6000;
    McConfig mc;
    std::function<void(const LearnIteration&)> on_iteration;

    void validate() const;
};

struct LearnResult {
    IsingModel model;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0.0;
    std::vector<LearnIteration> log;
};

/// Monte-Carlo maximum likelihood: damped Newton on the log-likelihood with
/// the sampled covariance of (S_i, S_i S_j) as curvature, falling back to
/// backtracking gradient ascent when a Newton step does not reduce the
/// moment residual. Stops when the infinity norm of the gradient
/// (mu - m, <SS>_data - <SS>_model) drops below grad_tol.
LearnResult learn_mc(const EmpiricalMoments& data, const LearnConfig& cfg, const IsingModel& init);
// Starts from the naive mean-field solution.
LearnResult learn_mc(const EmpiricalMoments& data, const LearnConfig& cfg);

// Infinity norm of the moment-matching residual between data and a model
// estimate (first moments and off-diagonal second moments).
double moment_residual(const EmpiricalMoments& data, const McEstimate& model_side);

}  // namespace bmprior
