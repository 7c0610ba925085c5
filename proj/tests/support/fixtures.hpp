#pragma once

// Teacher models and moment conversions shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <cstdint>

#include "bmprior/ising_model.hpp"
#include "bmprior/patchset.hpp"
#include "bmprior/rng.hpp"
#include "support/enumeration.hpp"

namespace fixtures {

bmprior::EmpiricalMoments as_moments(const oracle::Exact& e, int side = 0, std::uint64_t count = 0);

// Exact moments of a model by enumeration.
bmprior::EmpiricalMoments exact_moments(const bmprior::IsingModel& m, double temperature = 1.0);

// Random labelled tree on n vertices (random recursive attachment), couplings
// uniform in [-wmax, wmax], fields uniform in [-hmax, hmax].
bmprior::IsingModel random_tree(int n, double wmax, double hmax, bmprior::Rng& rng);

// Dense random couplings of magnitude at most wmax on an L x L lattice.
bmprior::IsingModel random_dense(int side, double wmax, double hmax, bmprior::Rng& rng);

bmprior::IsingModel from_matrix(const Eigen::MatrixXd& w, const Eigen::VectorXd& h, int side = 0);

}  // namespace fixtures
