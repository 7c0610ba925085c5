#include "support/fixtures.hpp"

namespace fixtures {

bmprior::EmpiricalMoments as_moments(const oracle::Exact& e, int side, std::uint64_t count) {
    bmprior::EmpiricalMoments m;
    m.side = side;
    m.count = count;
    m.mu = e.mu;
    m.gamma = e.gamma;
    return m;
}

bmprior::EmpiricalMoments exact_moments(const bmprior::IsingModel& m, double temperature) {
    return as_moments(oracle::enumerate(m.w, m.h, temperature), m.side);
}

bmprior::IsingModel from_matrix(const Eigen::MatrixXd& w, const Eigen::VectorXd& h, int side) {
    bmprior::IsingModel m;
    m.side = side;
    m.w = w;
    m.h = h;
    return m;
}

bmprior::IsingModel random_tree(int n, double wmax, double hmax, bmprior::Rng& rng) {
    bmprior::IsingModel m = bmprior::IsingModel::zeros(n);
    for (int i = 1; i < n; ++i) {
        const auto parent = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(i)));
        const double w = wmax * (2.0 * rng.uniform() - 1.0);
        m.w(i, parent) = w;
        m.w(parent, i) = w;
    }
    for (int i = 0; i < n; ++i) m.h(i) = hmax * (2.0 * rng.uniform() - 1.0);
    return m;
}

bmprior::IsingModel random_dense(int side, double wmax, double hmax, bmprior::Rng& rng) {
    bmprior::IsingModel m = bmprior::IsingModel::lattice(side);
    const auto n = m.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        m.h(i) = hmax * (2.0 * rng.uniform() - 1.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = wmax * (2.0 * rng.uniform() - 1.0);
            m.w(i, j) = w;
            m.w(j, i) = w;
        }
    }
    return m;
}

}  // namespace fixtures
