#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmprior/imageio.hpp"

namespace bmprior {

/// One L x L patch of +-1 spins, row-major (see lattice.hpp for coordinates).
struct SpinPatch {
    int side = 0;
    std::vector<std::int8_t> spins;
};

/// Equal-sized patches stored contiguously.
class PatchSet {
public:
    PatchSet() = default;
    explicit PatchSet(int side);

    int side() const noexcept { return side_; }
    std::size_t sites() const noexcept { return static_cast<std::size_t>(side_) * side_; }
    std::size_t size() const noexcept { return side_ == 0 ? 0 : spins_.size() / sites(); }
    bool empty() const noexcept { return spins_.empty(); }

    std::span<const std::int8_t> patch(std::size_t i) const {
        return {spins_.data() + i * sites(), sites()};
    }
    std::span<std::int8_t> patch(std::size_t i) { return {spins_.data() + i * sites(), sites()}; }

    void add(std::span<const std::int8_t> spins);
    void add(const SpinPatch& p) { add(p.spins); }
    void append(const PatchSet& other);
    void resize(std::size_t count) { spins_.resize(count * sites()); }

    const std::vector<std::int8_t>& data() const noexcept { return spins_; }

    friend bool operator==(const PatchSet&, const PatchSet&) = default;

private:
    int side_ = 0;
    std::vector<std::int8_t> spins_;
};

/// First and connected second moments of a patch collection.
/// `side` is 0 for systems that are not square lattices.
struct EmpiricalMoments {
    int side = 0;
    std::uint64_t count = 0;
    Eigen::VectorXd mu;
    Eigen::MatrixXd gamma;

    Eigen::Index size() const noexcept { return mu.size(); }
};

// Non-overlapping raster tiling; partial tiles at the right/bottom are dropped.
PatchSet patchify(const BinaryImage& img, int side);

/// Exact accumulator of sum(s) and sum(s s^T) over +-1 configurations.
/// Sums are integers held in doubles, so merging is exact and
/// order-independent for fewer than 2^53 samples.
class SpinMomentAccumulator {
public:
    explicit SpinMomentAccumulator(Eigen::Index sites, Eigen::Index block = 512);

    void add(std::span<const std::int8_t> spins);
    void merge(SpinMomentAccumulator& other);

    std::uint64_t count() const noexcept { return count_ + pending_; }
    // Raw sums, symmetric. Flushes buffered samples.
    const Eigen::VectorXd& first();
    const Eigen::MatrixXd& second();

    EmpiricalMoments moments(int side);

private:
    void flush();

    Eigen::Index sites_;
    Eigen::MatrixXd buffer_;
    Eigen::Index pending_ = 0;
    std::uint64_t count_ = 0;
    Eigen::VectorXd sum_;
    Eigen::MatrixXd outer_;  // lower triangle accumulates; mirrored on read
    bool mirrored_ = true;
};

// mu_i = <S_i>, gamma_ij = <S_i S_j> - mu_i mu_j. Throws on an empty set.
EmpiricalMoments compute_moments(const PatchSet& ps);

// "BMPATCH1" | u32 L | u64 B | B records of ceil(L^2/8) bytes, MSB-first,
// bit 1 = +1. Little-endian integers.
std::vector<std::uint8_t> encode_patchset(const PatchSet& ps);
PatchSet decode_patchset(std::span<const std::uint8_t> bytes);
void save_patchset(const std::string& path, const PatchSet& ps);
PatchSet load_patchset(const std::string& path);

}  // namespace bmprior
