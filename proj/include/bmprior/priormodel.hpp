#pragma once

#include <cstddef>

#include "bmprior/analysis.hpp"
#include "bmprior/gibbs.hpp"
#include "bmprior/ising_model.hpp"
#include "bmprior/patchset.hpp"

namespace bmprior {

inline constexpr double kDefaultTailCutoff = 8.0;

/// Lattice model of the six-parameter prior on an L x L patch. NN and NNN
/// links take the coupling of their sublattice class; any other pair at
/// distance r <= r_cut gets a exp(-|r - 2| / b), and 0 beyond. Every site
/// gets the uniform field h0.
IsingModel build_prior(const PriorParams& params, int side, double h0 = 0.0,
                       double r_cut = kDefaultTailCutoff);

struct ExtractedPrior {
    PriorParams params;
    ExpFit fit_a;  // tail fit from origin (1,1)
    ExpFit fit_b;  // tail fit from origin (2,2)
    bool tail_ok = false;
};

/// Class means of the NN and NNN couplings and the average of the two tail
/// fits over r in [2, 6]. When either fit does not decay, tail_ok is false and
/// params.b is infinite. Needs L >= 8; FitDomainError from the fits
/// propagates.
ExtractedPrior extract_params(const IsingModel& model);

/// `count` patches, each the final state of its own Metropolis chain run for
/// cfg.burn_in + cfg.sweeps sweeps from a random start at cfg.temperature.
/// Chain p is seeded from (cfg.seed, p), so output does not depend on the
/// thread count. cfg.chains is ignored.
PatchSet generate_patches(const IsingModel& model, std::size_t count, const McConfig& cfg);

}  // namespace bmprior
