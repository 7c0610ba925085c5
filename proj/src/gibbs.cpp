#include "bmprior/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "bmprior/error.hpp"
#include "bmprior/parallel.hpp"

namespace bmprior {

void McConfig::validate() const {
    if (sweeps < 1) throw InvalidArgument("McConfig: sweeps must be >= 1");
    if (chains < 1) throw InvalidArgument("McConfig: chains must be >= 1");
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw InvalidArgument("McConfig: temperature must be positive");
}

MetropolisChain::MetropolisChain(const IsingModel& model, double temperature, std::uint64_t seed,
                                 bool global_flip)
    : model_(&model),
      beta_(1.0 / temperature),
      global_flip_(global_flip),
      rng_(seed),
      spins_(static_cast<std::size_t>(model.size()), 1) {
    if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
    refresh();
}

void MetropolisChain::randomize() {
    for (auto& s : spins_) s = rng_.spin();
    refresh();
}

void MetropolisChain::set_spins(std::span<const std::int8_t> spins) {
    if (spins.size() != spins_.size()) throw InvalidArgument("set_spins: wrong size");
    std::copy(spins.begin(), spins.end(), spins_.begin());
    refresh();
}

void MetropolisChain::refresh() {
    const Eigen::Index n = model_->size();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = spins_[static_cast<std::size_t>(i)];
    field_ = model_->w * s + model_->h;
    // H = -1/2 s.(w s) - h.s
    energy_ = -0.5 * s.dot(field_ - model_->h) - model_->h.dot(s);
}

void MetropolisChain::flip(Eigen::Index i) {
    const double old = spins_[static_cast<std::size_t>(i)];
    spins_[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-old);
    field_.noalias() -= (2.0 * old) * model_->w.col(i);
}

void MetropolisChain::sweep() {
    const auto n = static_cast<std::size_t>(model_->size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(rng_.index(n));
        const double de = 2.0 * spins_[static_cast<std::size_t>(i)] * field_(i);
        if (de <= 0.0 || rng_.uniform() < std::exp(-beta_ * de)) {
            flip(i);
            energy_ += de;
        }
    }
    if (global_flip_) {
        double hs = 0.0;
        for (std::size_t i = 0; i < n; ++i) hs += model_->h(static_cast<Eigen::Index>(i)) * spins_[i];
        const double de = 2.0 * hs;
        if (de <= 0.0 || rng_.uniform() < std::exp(-beta_ * de)) {
            for (auto& s : spins_) s = static_cast<std::int8_t>(-s);
            field_ = 2.0 * model_->h - field_;
            energy_ += de;
        }
    }
    // Bound the drift of the incrementally updated energy and fields.
    if (++sweeps_done_ % 1024 == 0) refresh();
}

namespace {

// Streaming mean / sum of squared deviations (Welford), combinable.
struct Moments1 {
    double n = 0.0, mean = 0.0, m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments1& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
    // Inverse of merge: the statistics with `o` removed.
    Moments1 without(const Moments1& o) const {
        Moments1 r;
        r.n = n - o.n;
        if (r.n <= 0.0) return {};
        r.mean = (n * mean - o.n * o.mean) / r.n;
        const double d = o.mean - r.mean;
        r.m2 = m2 - o.m2 - d * d * r.n * o.n / n;
        return r;
    }
    double variance() const { return n > 0.0 ? m2 / n : 0.0; }
};

struct ChainOutput {
    std::vector<Moments1> batches;
    SpinMomentAccumulator acc;
    std::vector<std::int8_t> kept;
};

}  // namespace

McEstimate sample_moments(const IsingModel& model, const McConfig& cfg, std::size_t keep_states) {
    cfg.validate();
    model.validate();
    const Eigen::Index n = model.size();
    const std::uint64_t batches = std::min<std::uint64_t>(cfg.sweeps, 32);
    const std::uint64_t keep_per_chain =
        keep_states == 0 ? 0 : std::min<std::uint64_t>(cfg.sweeps, (keep_states + cfg.chains - 1) / cfg.chains);

    std::vector<ChainOutput> out;
    out.reserve(cfg.chains);
    for (unsigned c = 0; c < cfg.chains; ++c) out.push_back({std::vector<Moments1>(batches), SpinMomentAccumulator(n), {}});

    parallel_for(cfg.chains, [&](std::size_t c) {
        MetropolisChain chain(model, cfg.temperature, derive_seed(cfg.seed, c), cfg.global_flip);
        chain.randomize();
        for (std::uint64_t s = 0; s < cfg.burn_in; ++s) chain.sweep();
        auto& o = out[c];
        std::uint64_t next_keep = 0;
        for (std::uint64_t s = 0; s < cfg.sweeps; ++s) {
            chain.sweep();
            o.acc.add(chain.spins());
            o.batches[s * batches / cfg.sweeps].add(chain.energy());
            if (keep_per_chain > 0 && next_keep < keep_per_chain && s == next_keep * cfg.sweeps / keep_per_chain) {
                o.kept.insert(o.kept.end(), chain.spins().begin(), chain.spins().end());
                ++next_keep;
            }
        }
    });

    Moments1 total;
    std::vector<Moments1> all;
    McEstimate est;
    for (unsigned c = 0; c < cfg.chains; ++c) {
        for (const auto& b : out[c].batches) {
            total.merge(b);
            all.push_back(b);
        }
        if (c > 0) out[0].acc.merge(out[c].acc);
        est.kept_states.insert(est.kept_states.end(), out[c].kept.begin(), out[c].kept.end());
    }
    const EmpiricalMoments mm = out[0].acc.moments(model.side);
    est.m = mm.mu;
    est.c = mm.gamma;
    est.samples_used = mm.count;
    est.energy_mean = total.mean;
    est.energy_var = total.variance();

    const double k = static_cast<double>(all.size());
    if (all.size() > 1) {
        std::vector<double> loo(all.size());
        double mean = 0.0;
        for (std::size_t b = 0; b < all.size(); ++b) mean += loo[b] = total.without(all[b]).variance();
        mean /= k;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        est.energy_var_stderr = std::sqrt((k - 1.0) / k * ss);
    }
    return est;
}

HeatCurve specific_heat_sweep(const IsingModel& model, std::span<const double> t_grid, const McConfig& cfg) {
    if (t_grid.empty()) throw InvalidArgument("temperature grid is empty");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > 0.0)) throw InvalidArgument("temperatures must be positive");
        if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw InvalidArgument("temperature grid must be ascending");
    }
    HeatCurve curve;
    const double n = static_cast<double>(model.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        McConfig at = cfg;
        at.temperature = t_grid[k];
        at.seed = derive_seed(cfg.seed, 0x4845415400000000ULL + k);
        const McEstimate est = sample_moments(model, at);
        const double scale = n * at.temperature * at.temperature;
        curve.points.push_back({at.temperature, est.energy_var / scale, est.energy_var_stderr / scale});
    }
    const auto peak = std::max_element(curve.points.begin(), curve.points.end(),
                                       [](const HeatPoint& a, const HeatPoint& b) { return a.c < b.c; });
    curve.peak_temperature = peak->temperature;
    return curve;
}

}  // namespace bmprior
