#include "bmprior/ising_model.hpp"

#include <string>

#include "bmprior/error.hpp"

namespace bmprior {

IsingModel IsingModel::zeros(Eigen::Index sites, int side) {
    return IsingModel{side, Eigen::MatrixXd::Zero(sites, sites), Eigen::VectorXd::Zero(sites)};
}

IsingModel IsingModel::lattice(int side) {
    if (side <= 0) throw InvalidArgument("lattice side must be positive");
    return zeros(static_cast<Eigen::Index>(side) * side, side);
}

void IsingModel::validate() const {
    const Eigen::Index n = h.size();
    if (n == 0) throw InvalidArgument("model has no sites");
    if (w.rows() != n || w.cols() != n)
        throw InvalidArgument("coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if (side < 0 || (side > 0 && static_cast<Eigen::Index>(side) * side != n))
        throw InvalidArgument("lattice side does not match site count");
    if (!h.allFinite() || !w.allFinite()) throw InvalidArgument("model has non-finite entries");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i, i) != 0.0) throw InvalidArgument("coupling diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (w(i, j) != w(j, i)) throw InvalidArgument("coupling matrix must be symmetric");
    }
}

double IsingModel::energy(std::span<const std::int8_t> spins) const {
    const Eigen::Index n = size();
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double si = spins[static_cast<std::size_t>(i)];
        double local = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) local += w(j, i) * spins[static_cast<std::size_t>(j)];
        e -= si * (local + h(i));
    }
    return e;
}

}  // namespace bmprior
