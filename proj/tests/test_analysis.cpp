#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "bmprior/analysis.hpp"
#include "bmprior/error.hpp"
#include "bmprior/invising.hpp"
#include "bmprior/rng.hpp"
#include "support/fixtures.hpp"

using namespace bmprior;

namespace {

void set_w(IsingModel& m, Site a, Site b, double v) {
    const auto i = static_cast<Eigen::Index>(site_index(a, m.side));
    const auto j = static_cast<Eigen::Index>(site_index(b, m.side));
    m.w(i, j) = v;
    m.w(j, i) = v;
}

IsingModel constant_couplings(int side, double c) {
    IsingModel m = IsingModel::lattice(side);
    m.w.setConstant(c);
    m.w.diagonal().setZero();
    return m;
}

DistanceProfile exponential_profile(double a, double b, int r_max = 7) {
    DistanceProfile p;
    for (int r = 1; r <= r_max; ++r) {
        p.r_values.push_back(r);
        p.w_bar.push_back(a * std::exp(-(r - 2.0) / b));
        p.std_error.push_back(0.0);
    }
    return p;
}

}  // namespace

TEST_CASE("classify_link follows the parity rules") {
    CHECK(classify_link({1, 1}, {2, 1}) == LinkClass{LinkKind::nn, 1});
    CHECK(classify_link({2, 3}, {2, 4}) == LinkClass{LinkKind::nn, 1});
    CHECK(classify_link({5, 2}, {6, 3}) == LinkClass{LinkKind::nnn, 2});
    CHECK(classify_link({2, 1}, {3, 1}) == LinkClass{LinkKind::nn, 2});
    CHECK(classify_link({4, 4}, {4, 5}) == LinkClass{LinkKind::nn, 2});
    CHECK(classify_link({3, 1}, {2, 2}) == LinkClass{LinkKind::nnn, 1});
    // Endpoint order does not matter.
    CHECK(classify_link({6, 3}, {5, 2}) == classify_link({5, 2}, {6, 3}));
    CHECK(classify_link({2, 1}, {1, 1}) == classify_link({1, 1}, {2, 1}));
    CHECK_THROWS_AS(classify_link({1, 1}, {3, 1}), InvalidArgument);
    CHECK_THROWS_AS(classify_link({1, 1}, {1, 1}), InvalidArgument);
    CHECK_THROWS_AS(classify_link({1, 1}, {3, 2}), InvalidArgument);
}

TEST_CASE("every lattice link is classified once and the classes alternate") {
    for (int side : {3, 4, 7}) {
        const auto nn = lattice_links(side, LinkKind::nn);
        const auto nnn = lattice_links(side, LinkKind::nnn);
        CHECK(nn.size() == static_cast<std::size_t>(2 * side * (side - 1)));
        CHECK(nnn.size() == static_cast<std::size_t>(2 * (side - 1) * (side - 1)));
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto* links : {&nn, &nnn})
            for (const Link& l : *links) {
                CHECK(l.i < l.j);
                CHECK(seen.insert({l.i, l.j}).second);
            }
        // Period 2 in the transverse coordinate.
        for (const Link& l : nn) {
            const bool horizontal = l.a.y == l.b.y;
            const int transverse = horizontal ? std::min(l.a.x, l.b.x) : std::min(l.a.y, l.b.y);
            CHECK(l.cls.cls == (transverse % 2 == 1 ? 1 : 2));
        }
    }
}

TEST_CASE("distance profile of constant couplings") {
    for (double c : {0.0, 0.137, -2.5}) {
        for (Site origin : {Site{1, 1}, Site{2, 2}}) {
            const DistanceProfile p = distance_profile(constant_couplings(6, c), origin);
            REQUIRE(p.r_values.size() == static_cast<std::size_t>(6 - origin.x));
            for (std::size_t k = 0; k < p.r_values.size(); ++k) {
                CHECK(p.r_values[k] == static_cast<int>(k) + 1);
                CHECK(p.w_bar[k] == c);
                CHECK(p.std_error[k] == 0.0);
            }
        }
    }
}

TEST_CASE("distance profile averages exactly the boundary-free terms") {
    IsingModel m = IsingModel::lattice(4);
    // The four terms of w_bar(1) from origin (1,1): rows y = 2, 3 and columns x = 2, 3.
    set_w(m, {1, 2}, {2, 2}, 1.0);
    set_w(m, {1, 3}, {2, 3}, 2.0);
    set_w(m, {2, 1}, {2, 2}, 3.0);
    set_w(m, {3, 1}, {3, 2}, 6.0);
    // Boundary rows and columns are excluded.
    set_w(m, {1, 1}, {2, 1}, 100.0);
    set_w(m, {1, 4}, {2, 4}, 100.0);
    const DistanceProfile p = distance_profile(m, {1, 1});
    CHECK(p.w_bar[0] == doctest::Approx(3.0));
    // Population standard deviation of {1, 2, 3, 6} over sqrt(2(L-2)).
    CHECK(p.std_error[0] == doctest::Approx(std::sqrt(3.5) / 2.0));
    CHECK(p.w_bar[1] == 0.0);
}

TEST_CASE("distance profile preconditions") {
    CHECK_THROWS_AS(distance_profile(IsingModel::lattice(3), {1, 1}), InvalidArgument);
    CHECK_THROWS_AS(distance_profile(IsingModel::lattice(5), {1, 2}), InvalidArgument);
    CHECK_THROWS_AS(distance_profile(IsingModel::zeros(16), {1, 1}), InvalidArgument);
}

TEST_CASE("coupling histograms") {
    SUBCASE("all-zero model") {
        const ClassHistograms h = coupling_histogram(IsingModel::lattice(5), LinkKind::nn);
        for (const Histogram* x : {&h.cls1, &h.cls2}) {
            const long bin = x->bin_of(0.0);
            REQUIRE(bin >= 0);
            CHECK(x->counts[static_cast<std::size_t>(bin)] == x->total());
        }
    }
    SUBCASE("sublattice pattern gives two spikes") {
        IsingModel m = IsingModel::lattice(6);
        for (const Link& l : lattice_links(6, LinkKind::nn)) set_w(m, l.a, l.b, l.cls.cls == 1 ? -0.85 : 0.2);
        const ClassHistograms h = coupling_histogram(m, LinkKind::nn);
        CHECK(h.cls1.mean == -0.85);
        CHECK(h.cls2.mean == 0.2);
        CHECK(h.cls1.counts[static_cast<std::size_t>(h.cls1.bin_of(-0.85))] == h.cls1.total());
        CHECK(h.cls2.counts[static_cast<std::size_t>(h.cls2.bin_of(0.2))] == h.cls2.total());
        CHECK(h.cls1.width == 0.02);
    }
    SUBCASE("3x3 link counts") {
        const ClassHistograms nn = coupling_histogram(IsingModel::lattice(3), LinkKind::nn);
        const ClassHistograms nnn = coupling_histogram(IsingModel::lattice(3), LinkKind::nnn);
        CHECK(nn.cls1.total() + nn.cls2.total() == 12);
        CHECK(nnn.cls1.total() + nnn.cls2.total() == 8);
    }
}

TEST_CASE("histogram bins") {
    const Histogram h = make_histogram({0.01, 0.03, 0.031, -0.05}, 0.02);
    CHECK(h.lo == doctest::Approx(-0.06));
    CHECK(h.total() == 4);
    CHECK(h.samples == 4);
    CHECK(h.bin_of(10.0) == -1);
    CHECK_THROWS_AS(make_histogram({1.0}, 0.0), InvalidArgument);

    const Histogram n = normalized_histogram({0.3, 0.3, 0.3});
    CHECK(n.counts.size() == 1);
    CHECK(n.counts[0] == 1.0);
    CHECK(n.bin_of(0.3) == 0);
    const Histogram spread = normalized_histogram({0.0, 0.5, 1.0, 1.0}, 4);
    CHECK(spread.counts.size() == 4);
    CHECK(spread.total() == doctest::Approx(1.0));
    CHECK(spread.counts[3] == doctest::Approx(0.5));
}

TEST_CASE("noiseless exponential profiles are fitted exactly") {
    for (double a : {0.1, 0.16, 0.3})
        for (double b : {0.7, 1.1, 1.5}) {
            const ExpFit f = fit_exponential(exponential_profile(a, b));
            CHECK(f.ok);
            CHECK(std::abs(f.a - a) <= 1e-9);
            CHECK(std::abs(f.b - b) <= 1e-9);
            CHECK(f.a_err <= 1e-9);
            CHECK(f.r_min == 2);
            CHECK(f.r_max == 6);
        }
}

TEST_CASE("weighted fit reproduces closed-form weighted least squares") {
    DistanceProfile p = exponential_profile(0.2, 1.2);
    const double noise[] = {0.0, 0.03, -0.02, 0.05, -0.04, 0.01, 0.0};
    for (std::size_t k = 0; k < p.w_bar.size(); ++k) {
        p.w_bar[k] *= 1.0 + noise[k];
        p.std_error[k] = 0.05 * p.w_bar[k] * (1.0 + 0.1 * static_cast<double>(k));
    }
    Eigen::MatrixXd x(5, 2);
    Eigen::VectorXd y(5), wt(5);
    for (int r = 2; r <= 6; ++r) {
        const auto k = static_cast<std::size_t>(r - 1);
        x.row(r - 2) << 1.0, r - 2.0;
        y(r - 2) = std::log(p.w_bar[k]);
        wt(r - 2) = std::pow(p.w_bar[k] / p.std_error[k], 2);
    }
    const Eigen::MatrixXd xtwx = x.transpose() * wt.asDiagonal() * x;
    const Eigen::Vector2d c = xtwx.ldlt().solve(x.transpose() * wt.asDiagonal() * y);
    const Eigen::Matrix2d cov = xtwx.inverse();
    const ExpFit f = fit_exponential(p);
    CHECK(f.a == doctest::Approx(std::exp(c(0))).epsilon(1e-10));
    CHECK(f.b == doctest::Approx(-1.0 / c(1)).epsilon(1e-10));
    CHECK(f.a_err == doctest::Approx(std::exp(c(0)) * std::sqrt(cov(0, 0))).epsilon(1e-8));
    CHECK(f.b_err == doctest::Approx(std::sqrt(cov(1, 1)) / (c(1) * c(1))).epsilon(1e-8));
}

TEST_CASE("fit domain errors and non-decaying profiles") {
    DistanceProfile p = exponential_profile(0.16, 1.5);
    p.w_bar[3] = 0.0;  // r = 4
    CHECK_THROWS_AS(fit_exponential(p), FitDomainError);
    p.w_bar[3] = -0.01;
    CHECK_THROWS_AS(fit_exponential(p), FitDomainError);

    DistanceProfile flat = exponential_profile(0.1, 1.0);
    std::fill(flat.w_bar.begin(), flat.w_bar.end(), 0.1);
    const ExpFit f = fit_exponential(flat);
    CHECK_FALSE(f.ok);
    CHECK(std::isinf(f.b));

    CHECK_THROWS_AS(fit_exponential(exponential_profile(0.1, 1.0), 5, 6), InvalidArgument);
}

TEST_CASE("frustration counts") {
    IsingModel ferro = IsingModel::lattice(4);
    for (const Link& l : lattice_links(4, LinkKind::nn)) set_w(ferro, l.a, l.b, 0.3);
    CHECK(frustration_count(ferro).count == 0);
    CHECK(frustration_count(ferro).considered == 9);

    IsingModel one = ferro;
    set_w(one, {2, 2}, {3, 2}, -0.4);  // shared by plaquettes (2,1) and (2,2)
    const FrustrationReport r = frustration_count(one);
    CHECK(r.count == 2);
    CHECK(r.plaquettes == std::vector<Site>{{2, 1}, {2, 2}});
    set_w(one, {2, 2}, {3, 2}, -0.01);  // below the threshold: ignored
    CHECK(frustration_count(one).count == 0);
    CHECK(frustration_count(one).considered == 7);

    IsingModel corner = ferro;
    set_w(corner, {1, 1}, {2, 1}, -0.4);
    CHECK(frustration_count(corner).count == 1);

    IsingModel checker = IsingModel::lattice(8);
    for (const Link& l : lattice_links(8, LinkKind::nn)) set_w(checker, l.a, l.b, l.cls.cls == 1 ? -0.85 : 0.2);
    CHECK(frustration_count(checker).count == 0);
    CHECK(frustration_count(checker).considered == 49);
}

TEST_CASE("frustration is invariant under field flips and positive rescaling") {
    Rng rng(3);
    IsingModel m = fixtures::random_dense(5, 0.5, 0.5, rng);
    m.side = 5;
    const std::size_t base = frustration_count(m).count;
    IsingModel flipped = m;
    flipped.h = -m.h;
    CHECK(frustration_count(flipped).count == base);
    IsingModel scaled = m;
    scaled.w *= 3.0;
    CHECK(frustration_count(scaled, 0.05 * 3.0).count == base);
    CHECK(frustration_count(scaled, 0.05).count >= base);
}

TEST_CASE("field and magnetization histograms") {
    EmpiricalMoments m;
    m.side = 3;
    m.mu = Eigen::VectorXd::Constant(9, 0.3);
    m.gamma = Eigen::MatrixXd(Eigen::VectorXd::Constant(9, 0.91).asDiagonal());
    const IsingModel nmf = infer_nmf(m);
    const auto h = field_and_magnetization_histograms(nmf, m);
    CHECK(h.magnetizations.counts.size() == 1);
    CHECK(h.magnetizations.lo == 0.3);
    CHECK(h.magnetizations.counts[0] == 1.0);
    CHECK(h.fields.counts.size() == 1);
    CHECK(h.fields.lo == doctest::Approx(0.3095196).epsilon(1e-6));

    const RBodySolution sol = r_body_solution(3, 1.0, 9.0);
    IsingModel r3 = IsingModel::lattice(3);
    r3.h.setConstant(sol.h);
    m.mu.setConstant(sol.m);
    const auto hr = field_and_magnetization_histograms(r3, m);
    CHECK(hr.fields.lo + hr.fields.width * static_cast<double>(hr.fields.counts.size()) <= 0.0);
    CHECK(hr.magnetizations.lo > 0.0);

    CHECK_THROWS_AS(field_and_magnetization_histograms(IsingModel::lattice(2), m), InvalidArgument);
}

TEST_CASE("r-body solution") {
    for (double k : {-0.7, 0.3, 1.0, 2.0}) {
        const RBodySolution one = r_body_solution(1, k, 100.0);
        CHECK(one.w_pair == 0.0);
        CHECK(one.h == doctest::Approx(k));
        CHECK(one.m == doctest::Approx(std::tanh(k)));
        CHECK(r_body_solution(2, k, 100.0).h == 0.0);
    }
    const RBodySolution three = r_body_solution(3, 1.0, 50.0);
    CHECK(three.m == doctest::Approx(0.995).epsilon(0.001));
    CHECK(std::abs(three.m - std::tanh(3 * three.m * three.m)) <= 1e-12);
    CHECK(three.h == doctest::Approx(-2.97).epsilon(0.005));
    CHECK(three.w_pair == doctest::Approx(6 * three.m / 50.0));
    CHECK_THROWS_AS(r_body_solution(0, 1.0, 10.0), InvalidArgument);
    // Weak coupling: the fixed point collapses onto the paramagnetic branch.
    const RBodySolution weak = r_body_solution(3, 0.1, 10.0);
    CHECK(std::abs(weak.m) <= 1e-12);
    CHECK(std::abs(weak.h) <= 1e-12);
}

TEST_CASE("r-body solution with antiferromagnetic K still satisfies the self-consistency") {
    for (int r : {1, 2, 3, 4})
        for (double k : {-3.0, -2.0, -0.5}) {
            CAPTURE(r);
            CAPTURE(k);
            const RBodySolution s = r_body_solution(r, k, 20.0);
            CHECK(std::abs(s.m - std::tanh(k * r * std::pow(s.m, r - 1))) <= 1e-12);
        }
}
