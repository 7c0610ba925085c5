#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "bmprior/imageio.hpp"
#include "bmprior/ising_model.hpp"
#include "bmprior/lattice.hpp"
#include "bmprior/patchset.hpp"

namespace bmprior {

enum class LinkKind { nn, nnn };

// Sublattice class of a nearest or next-nearest neighbour link: 1 or 2.
struct LinkClass {
    LinkKind kind = LinkKind::nn;
    int cls = 1;
    friend bool operator==(const LinkClass&, const LinkClass&) = default;
};

/// Horizontal NN (x,y)-(x+1,y): class 1 iff x is odd. Vertical NN
/// (x,y)-(x,y+1): class 1 iff y is odd. Diagonal NNN (x,y)-(x+-1,y+1):
/// class 1 iff y (the upper row) is odd. Endpoints may come in either order.
/// Throws InvalidArgument for any other pair.
LinkClass classify_link(Site a, Site b);

struct Link {
    std::size_t i = 0;  // linear indices, i < j
    std::size_t j = 0;
    Site a, b;
    LinkClass cls;
};

// Every NN or NNN link of an L x L patch, each exactly once.
std::vector<Link> lattice_links(int side, LinkKind kind);

struct DistanceProfile {
    Site origin;  // (1,1) = sublattice A, (2,2) = sublattice B
    std::vector<int> r_values;
    std::vector<double> w_bar;
    std::vector<double> std_error;  // sigma(r) / sqrt(2(L-2))
};

/// Row/column-averaged couplings: for each r, the mean of the 2(L-2) terms
/// w((x0, y), (x0 + r, y)) for y in [2, L-1] and w((x, y0), (x, y0 + r)) for
/// x in [2, L-1], with (x0, y0) the origin.
DistanceProfile distance_profile(const IsingModel& model, Site origin);

struct Histogram {
    double lo = 0.0;     // left edge of bin 0
    double width = 0.0;  // 0 when all data coincide (single bin)
    std::vector<double> counts;
    std::size_t samples = 0;
    double mean = 0.0;

    double total() const;
    // Index of the bin containing v, or -1 when outside.
    long bin_of(double v) const;
};

// Bins are aligned to integer multiples of `width`.
Histogram make_histogram(const std::vector<double>& values, double width);
// `bins` equal bins spanning [min, max], normalized to unit mass.
Histogram normalized_histogram(const std::vector<double>& values, std::size_t bins = 40);

struct ClassHistograms {
    LinkKind kind = LinkKind::nn;
    Histogram cls1;
    Histogram cls2;
};

ClassHistograms coupling_histogram(const IsingModel& model, LinkKind kind, double bin_width = 0.02);

struct ExpFit {
    double a = 0.0;
    double b = 0.0;
    double a_err = 0.0;
    double b_err = 0.0;
    int r_min = 2;
    int r_max = 6;
    bool ok = false;  // false when the data do not decay (b would be infinite or negative)
};

/// Fits w_bar(r) = a exp(-(r - 2) / b) by least squares on ln w_bar over
/// [r_min, r_max], weighted by stderr when every stderr in range is nonzero.
/// Throws FitDomainError if some w_bar <= 0 in range, InvalidArgument if
/// fewer than 3 points fall in range.
ExpFit fit_exponential(const DistanceProfile& profile, int r_min = 2, int r_max = 6);

struct FrustrationReport {
    std::size_t count = 0;
    std::size_t considered = 0;   // plaquettes whose four links all exceed the threshold
    std::vector<Site> plaquettes; // upper-left corner of each frustrated unit square
};

FrustrationReport frustration_count(const IsingModel& model, double threshold = 0.05);

struct FieldMagnetizationHistograms {
    Histogram fields;
    Histogram magnetizations;
};

FieldMagnetizationHistograms field_and_magnetization_histograms(const IsingModel& model,
                                                                const EmpiricalMoments& m,
                                                                std::size_t bins = 40);

struct RBodySolution {
    double m = 0.0;
    double w_pair = 0.0;
    double h = 0.0;
};

/// Pair coupling and field of the mean-field inversion of the fully
/// connected r-body model H = -N K (sum_i S_i / N)^r, with m solving
/// m = tanh(K r m^(r-1)).
RBodySolution r_body_solution(int r, double k, double n);

// Six-parameter lattice prior: NN and NNN couplings per sublattice class,
// plus the exponential tail a exp(-|r - 2| / b) for every other pair.
struct PriorParams {
    double w_nn_1 = 0.0;
    double w_nn_2 = 0.0;
    double w_nnn_1 = 0.0;
    double w_nnn_2 = 0.0;
    double a = 0.0;
    double b = 1.0;
    friend bool operator==(const PriorParams&, const PriorParams&) = default;
};

struct Spectrum {
    std::vector<double> frequency;  // annulus centre |f|, integer
    std::vector<double> amplitude;  // mean |F(f)| over the annulus and patches
    double slope = 0.0;             // log-log regression slope over the central decade
    double fit_lo = 0.0;
    double fit_hi = 0.0;
};

/// Radially averaged DFT amplitude of square fields. `values` holds
/// `count` row-major side x side fields.
Spectrum fourier_spectrum(const std::vector<double>& values, int side, std::size_t count = 1);
Spectrum fourier_spectrum(const PatchSet& ps);
// Tiles the image into the largest square patches that fit.
Spectrum fourier_spectrum(const BinaryImage& img);

// Sum over all frequencies of |F|^2 for one field (used to check Parseval).
double spectral_energy(const std::vector<double>& field, int side);

}  // namespace bmprior
