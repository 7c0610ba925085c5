#include "bmprior/priormodel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bmprior/error.hpp"
#include "bmprior/lattice.hpp"
#include "bmprior/parallel.hpp"

namespace bmprior {
namespace {

void validate(const PriorParams& p) {
    const double v[] = {p.w_nn_1, p.w_nn_2, p.w_nnn_1, p.w_nnn_2, p.a, p.b};
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("prior parameters must be finite");
    if (!(p.b > 0.0)) throw InvalidArgument("prior decay length b must be positive");
}

double class_mean(const IsingModel& model, LinkKind kind, int cls) {
    double first = 0.0, acc = 0.0;
    std::size_t n = 0;
    for (const Link& l : lattice_links(model.side, kind)) {
        if (l.cls.cls != cls) continue;
        const double w = model.w(static_cast<Eigen::Index>(l.i), static_cast<Eigen::Index>(l.j));
        if (n == 0) first = w;
        acc += w - first;
        ++n;
    }
    return n == 0 ? 0.0 : first + acc / static_cast<double>(n);
}

}  // namespace

IsingModel build_prior(const PriorParams& params, int side, double h0, double r_cut) {
    validate(params);
    if (side < 4) throw InvalidArgument("build_prior: L must be >= 4");
    if (!std::isfinite(h0)) throw InvalidArgument("build_prior: h0 must be finite");
    if (!(r_cut > 0.0)) throw InvalidArgument("build_prior: r_cut must be positive");

    IsingModel model = IsingModel::lattice(side);
    model.h.setConstant(h0);
    const Eigen::Index n = model.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Site a = site_at(static_cast<std::size_t>(i), side);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Site b = site_at(static_cast<std::size_t>(j), side);
            const int dx = std::abs(b.x - a.x), dy = std::abs(b.y - a.y);
            double w = 0.0;
            if (dx <= 1 && dy <= 1) {
                const LinkClass c = classify_link(a, b);
                if (c.kind == LinkKind::nn)
                    w = c.cls == 1 ? params.w_nn_1 : params.w_nn_2;
                else
                    w = c.cls == 1 ? params.w_nnn_1 : params.w_nnn_2;
            } else {
                const double r = std::sqrt(static_cast<double>(dx * dx + dy * dy));
                if (r <= r_cut) w = params.a * std::exp(-std::abs(r - 2.0) / params.b);
            }
            model.w(i, j) = w;
            model.w(j, i) = w;
        }
    }
    return model;
}

ExtractedPrior extract_params(const IsingModel& model) {
    model.validate();
    if (model.side < 8) throw InvalidArgument("extract_params: needs a lattice model with L >= 8");

    ExtractedPrior out;
    out.params.w_nn_1 = class_mean(model, LinkKind::nn, 1);
    out.params.w_nn_2 = class_mean(model, LinkKind::nn, 2);
    out.params.w_nnn_1 = class_mean(model, LinkKind::nnn, 1);
    out.params.w_nnn_2 = class_mean(model, LinkKind::nnn, 2);

    out.fit_a = fit_exponential(distance_profile(model, {1, 1}), 2, 6);
    out.fit_b = fit_exponential(distance_profile(model, {2, 2}), 2, 6);
    out.tail_ok = out.fit_a.ok && out.fit_b.ok;
    out.params.a = 0.5 * (out.fit_a.a + out.fit_b.a);
    out.params.b = out.tail_ok ? 0.5 * (out.fit_a.b + out.fit_b.b) : std::numeric_limits<double>::infinity();
    return out;
}

PatchSet generate_patches(const IsingModel& model, std::size_t count, const McConfig& cfg) {
    model.validate();
    cfg.validate();
    if (model.side <= 0) throw InvalidArgument("generate_patches: model is not a square lattice");
    PatchSet ps(model.side);
    ps.resize(count);
    const std::uint64_t total = cfg.burn_in + cfg.sweeps;
    parallel_for(count, [&](std::size_t p) {
        MetropolisChain chain(model, cfg.temperature, derive_seed(cfg.seed, p), cfg.global_flip);
        chain.randomize();
        for (std::uint64_t s = 0; s < total; ++s) chain.sweep();
        auto out = ps.patch(p);
        const auto spins = chain.spins();
        std::copy(spins.begin(), spins.end(), out.begin());
    });
    return ps;
}

}  // namespace bmprior
