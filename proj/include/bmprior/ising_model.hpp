#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace bmprior {

/// Pairwise model H(S) = -sum_{i<j} w_ij S_i S_j - sum_i h_i S_i.
/// `side` is the lattice side when the sites form an L x L patch (N = L^2),
/// or 0 for an arbitrary graph.
struct IsingModel {
    int side = 0;
    Eigen::MatrixXd w;
    Eigen::VectorXd h;

    static IsingModel zeros(Eigen::Index sites, int side = 0);
    static IsingModel lattice(int side);

    Eigen::Index size() const noexcept { return h.size(); }

    // Throws InvalidArgument unless w is square, symmetric, zero-diagonal and
    // finite, h matches, and side^2 == N when side > 0.
    void validate() const;

    double energy(std::span<const std::int8_t> spins) const;
};

}  // namespace bmprior
