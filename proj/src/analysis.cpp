#include "bmprior/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bmprior/error.hpp"

namespace bmprior {
namespace {

bool odd(int v) { return (v % 2) != 0; }

// Mean that is exact for constant data.
double shifted_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x - v.front();
    return v.front() + acc / static_cast<double>(v.size());
}

void require_lattice(const IsingModel& model, int min_side, const char* what) {
    model.validate();
    if (model.side < min_side)
        throw InvalidArgument(std::string(what) + ": needs a lattice model with L >= " + std::to_string(min_side));
}

double coupling(const IsingModel& model, Site a, Site b) {
    return model.w(static_cast<Eigen::Index>(site_index(a, model.side)),
                   static_cast<Eigen::Index>(site_index(b, model.side)));
}

}  // namespace

LinkClass classify_link(Site a, Site b) {
    if (b.y < a.y || (b.y == a.y && b.x < a.x)) std::swap(a, b);
    const int dx = b.x - a.x, dy = b.y - a.y;
    if (dy == 0 && dx == 1) return {LinkKind::nn, odd(a.x) ? 1 : 2};
    if (dy == 1 && dx == 0) return {LinkKind::nn, odd(a.y) ? 1 : 2};
    if (dy == 1 && (dx == 1 || dx == -1)) return {LinkKind::nnn, odd(a.y) ? 1 : 2};
    throw InvalidArgument("classify_link: sites are neither NN nor NNN");
}

std::vector<Link> lattice_links(int side, LinkKind kind) {
    std::vector<Link> links;
    auto add = [&](Site a, Site b) {
        if (b.x < 1 || b.x > side || b.y > side) return;
        std::size_t i = site_index(a, side), j = site_index(b, side);
        links.push_back({std::min(i, j), std::max(i, j), a, b, classify_link(a, b)});
    };
    for (int y = 1; y <= side; ++y)
        for (int x = 1; x <= side; ++x) {
            const Site s{x, y};
            if (kind == LinkKind::nn) {
                add(s, {x + 1, y});
                add(s, {x, y + 1});
            } else {
                add(s, {x - 1, y + 1});
                add(s, {x + 1, y + 1});
            }
        }
    return links;
}

DistanceProfile distance_profile(const IsingModel& model, Site origin) {
    require_lattice(model, 4, "distance_profile");
    if (!(origin == Site{1, 1} || origin == Site{2, 2}))
        throw InvalidArgument("distance_profile: origin must be (1,1) or (2,2)");
    const int side = model.side;
    DistanceProfile p;
    p.origin = origin;
    const double norm = std::sqrt(2.0 * (side - 2));
    for (int r = 1; origin.x + r <= side; ++r) {
        std::vector<double> terms;
        terms.reserve(2 * static_cast<std::size_t>(side - 2));
        for (int y = 2; y <= side - 1; ++y) terms.push_back(coupling(model, {origin.x, y}, {origin.x + r, y}));
        for (int x = 2; x <= side - 1; ++x) terms.push_back(coupling(model, {x, origin.y}, {x, origin.y + r}));
        const double mean = shifted_mean(terms);
        double ss = 0.0;
        for (double t : terms) ss += (t - mean) * (t - mean);
        p.r_values.push_back(r);
        p.w_bar.push_back(mean);
        p.std_error.push_back(std::sqrt(ss / static_cast<double>(terms.size())) / norm);
    }
    return p;
}

double Histogram::total() const {
    double t = 0.0;
    for (double c : counts) t += c;
    return t;
}

long Histogram::bin_of(double v) const {
    if (counts.empty()) return -1;
    if (width == 0.0) return v == lo ? 0 : -1;
    const double k = std::floor((v - lo) / width);
    if (k < 0.0 || k >= static_cast<double>(counts.size())) return -1;
    return static_cast<long>(k);
}

Histogram make_histogram(const std::vector<double>& values, double width) {
    if (!(width > 0.0)) throw InvalidArgument("histogram bin width must be positive");
    Histogram hist;
    hist.width = width;
    hist.samples = values.size();
    if (values.empty()) return hist;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double first = std::floor(*mn / width), last = std::floor(*mx / width);
    hist.lo = first * width;
    hist.counts.assign(static_cast<std::size_t>(last - first) + 1, 0.0);
    for (double v : values) {
        const auto k = static_cast<std::size_t>(std::floor(v / width) - first);
        hist.counts[std::min(k, hist.counts.size() - 1)] += 1.0;
    }
    hist.mean = shifted_mean(values);
    return hist;
}

Histogram normalized_histogram(const std::vector<double>& values, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
    Histogram hist;
    hist.samples = values.size();
    if (values.empty()) return hist;
    hist.mean = shifted_mean(values);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    hist.lo = *mn;
    if (*mx == *mn) {
        hist.counts = {1.0};
        return hist;
    }
    hist.width = (*mx - *mn) / static_cast<double>(bins);
    hist.counts.assign(bins, 0.0);
    const double mass = 1.0 / static_cast<double>(values.size());
    for (double v : values) {
        const auto k = static_cast<std::size_t>(std::floor((v - *mn) / hist.width));
        hist.counts[std::min(k, bins - 1)] += mass;
    }
    return hist;
}

ClassHistograms coupling_histogram(const IsingModel& model, LinkKind kind, double bin_width) {
    require_lattice(model, 3, "coupling_histogram");
    std::vector<double> one, two;
    for (const Link& l : lattice_links(model.side, kind))
        (l.cls.cls == 1 ? one : two).push_back(model.w(static_cast<Eigen::Index>(l.i), static_cast<Eigen::Index>(l.j)));
    return {kind, make_histogram(one, bin_width), make_histogram(two, bin_width)};
}

ExpFit fit_exponential(const DistanceProfile& profile, int r_min, int r_max) {
    std::vector<double> xs, ys, sig;
    bool weighted = true;
    for (std::size_t k = 0; k < profile.r_values.size(); ++k) {
        const int r = profile.r_values[k];
        if (r < r_min || r > r_max) continue;
        const double w = profile.w_bar[k];
        if (!(w > 0.0))
            throw FitDomainError("exponential fit: w_bar(" + std::to_string(r) + ") = " + std::to_string(w) +
                                 " is not positive");
        const double se = k < profile.std_error.size() ? profile.std_error[k] : 0.0;
        if (!(se > 0.0)) weighted = false;
        xs.push_back(r - 2.0);
        ys.push_back(std::log(w));
        sig.push_back(se / w);
    }
    const std::size_t n = xs.size();
    if (n < 3) throw InvalidArgument("exponential fit: fewer than 3 points in range");

    // Normal equations of y = c0 + c1 x.
    double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double wt = weighted ? 1.0 / (sig[k] * sig[k]) : 1.0;
        s += wt;
        sx += wt * xs[k];
        sxx += wt * xs[k] * xs[k];
        sy += wt * ys[k];
        sxy += wt * xs[k] * ys[k];
    }
    const double det = s * sxx - sx * sx;
    const double slope = (s * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;
    double scale = 1.0;
    if (!weighted) {
        double rss = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = ys[k] - intercept - slope * xs[k];
            rss += e * e;
        }
        scale = rss / static_cast<double>(n - 2);
    }
    const double var_intercept = scale * sxx / det;
    const double var_slope = scale * s / det;

    ExpFit fit;
    fit.r_min = r_min;
    fit.r_max = r_max;
    fit.a = std::exp(intercept);
    fit.a_err = fit.a * std::sqrt(var_intercept);
    if (slope < 0.0) {
        fit.ok = true;
        fit.b = -1.0 / slope;
        fit.b_err = std::sqrt(var_slope) / (slope * slope);
    } else {
        fit.b = std::numeric_limits<double>::infinity();
        fit.b_err = std::numeric_limits<double>::infinity();
    }
    return fit;
}

FrustrationReport frustration_count(const IsingModel& model, double threshold) {
    require_lattice(model, 2, "frustration_count");
    FrustrationReport rep;
    const int side = model.side;
    for (int y = 1; y < side; ++y)
        for (int x = 1; x < side; ++x) {
            const double links[4] = {
                coupling(model, {x, y}, {x + 1, y}),
                coupling(model, {x, y + 1}, {x + 1, y + 1}),
                coupling(model, {x, y}, {x, y + 1}),
                coupling(model, {x + 1, y}, {x + 1, y + 1}),
            };
            if (!std::all_of(std::begin(links), std::end(links), [&](double w) { return std::abs(w) > threshold; }))
                continue;
            ++rep.considered;
            int negatives = 0;
            for (double w : links) negatives += w < 0.0;
            if (negatives % 2 == 1) {
                ++rep.count;
                rep.plaquettes.push_back({x, y});
            }
        }
    return rep;
}

FieldMagnetizationHistograms field_and_magnetization_histograms(const IsingModel& model,
                                                                const EmpiricalMoments& m, std::size_t bins) {
    if (model.size() != m.mu.size()) throw InvalidArgument("model and moments differ in size");
    const std::vector<double> h(model.h.data(), model.h.data() + model.h.size());
    const std::vector<double> mu(m.mu.data(), m.mu.data() + m.mu.size());
    return {normalized_histogram(h, bins), normalized_histogram(mu, bins)};
}

RBodySolution r_body_solution(int r, double k, double n) {
    if (r < 1) throw InvalidArgument("r_body_solution: r must be >= 1");
    if (!std::isfinite(k)) throw InvalidArgument("r_body_solution: K must be finite");
    if (!(n > 0.0)) throw InvalidArgument("r_body_solution: N must be positive");

    // Damping is halved whenever the residual stops shrinking, which tames the
    // oscillating branch that appears for negative K.
    double m = 0.9;
    double damping = 0.5;
    double previous = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < 1'000'000; ++it) {
        const double residual = std::tanh(k * r * std::pow(m, r - 1)) - m;
        if (std::abs(residual) <= 1e-14) {
            converged = true;
            break;
        }
        if (std::abs(residual) >= previous) damping = std::max(damping * 0.5, 1e-6);
        previous = std::abs(residual);
        m += damping * residual;
    }
    if (!converged || !std::isfinite(m)) throw NumericalError("r_body_solution: fixed-point iteration diverged");

    RBodySolution sol;
    sol.m = m;
    sol.w_pair = r == 1 ? 0.0 : k / n * r * (r - 1) * std::pow(m, r - 2);
    sol.h = r == 2 ? 0.0 : -k * r * (r - 2) * std::pow(m, r - 1);
    return sol;
}

}  // namespace bmprior
