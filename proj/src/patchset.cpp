#include "bmprior/patchset.hpp"

#include <algorithm>
#include <cstring>

#include "bmprior/error.hpp"
#include "bmprior/parallel.hpp"

namespace bmprior {

PatchSet::PatchSet(int side) : side_(side) {
    if (side <= 0) throw InvalidArgument("patch side must be positive");
}

void PatchSet::add(std::span<const std::int8_t> spins) {
    if (spins.size() != sites()) throw InvalidArgument("patch has wrong number of sites");
    for (auto s : spins)
        if (s != 1 && s != -1) throw InvalidArgument("patch entries must be +1 or -1");
    spins_.insert(spins_.end(), spins.begin(), spins.end());
}

void PatchSet::append(const PatchSet& other) {
    if (other.empty()) return;
    if (other.side_ != side_) throw InvalidArgument("cannot mix patch sides");
    spins_.insert(spins_.end(), other.spins_.begin(), other.spins_.end());
}

PatchSet patchify(const BinaryImage& img, int side) {
    if (side <= 0) throw InvalidArgument("patchify: side must be positive");
    if (img.width < side || img.height < side)
        throw InvalidArgument("patchify: image " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + " smaller than patch side " +
                              std::to_string(side));
    PatchSet ps(side);
    const int nx = img.width / side, ny = img.height / side;
    ps.resize(static_cast<std::size_t>(nx) * ny);
    std::size_t k = 0;
    for (int ty = 0; ty < ny; ++ty)
        for (int tx = 0; tx < nx; ++tx, ++k) {
            auto dst = ps.patch(k);
            for (int y = 0; y < side; ++y) {
                const auto* row = img.spins.data() + static_cast<std::size_t>(ty * side + y) * img.width + tx * side;
                std::copy(row, row + side, dst.begin() + static_cast<std::ptrdiff_t>(y) * side);
            }
        }
    return ps;
}

SpinMomentAccumulator::SpinMomentAccumulator(Eigen::Index sites, Eigen::Index block)
    : sites_(sites),
      buffer_(block, sites),
      sum_(Eigen::VectorXd::Zero(sites)),
      outer_(Eigen::MatrixXd::Zero(sites, sites)) {}

void SpinMomentAccumulator::add(std::span<const std::int8_t> spins) {
    for (Eigen::Index i = 0; i < sites_; ++i) buffer_(pending_, i) = spins[static_cast<std::size_t>(i)];
    if (++pending_ == buffer_.rows()) flush();
}

void SpinMomentAccumulator::flush() {
    if (pending_ == 0) return;
    const auto block = buffer_.topRows(pending_);
    sum_ += block.colwise().sum().transpose();
    outer_.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    count_ += static_cast<std::uint64_t>(pending_);
    pending_ = 0;
    mirrored_ = false;
}

void SpinMomentAccumulator::merge(SpinMomentAccumulator& other) {
    flush();
    other.flush();
    sum_ += other.sum_;
    outer_.triangularView<Eigen::Lower>() += other.outer_;
    count_ += other.count_;
    mirrored_ = false;
}

const Eigen::VectorXd& SpinMomentAccumulator::first() {
    flush();
    return sum_;
}

const Eigen::MatrixXd& SpinMomentAccumulator::second() {
    flush();
    if (!mirrored_) {
        outer_.triangularView<Eigen::StrictlyUpper>() = outer_.transpose();
        mirrored_ = true;
    }
    return outer_;
}

EmpiricalMoments SpinMomentAccumulator::moments(int side) {
    if (count() == 0) throw InvalidArgument("moments of an empty sample");
    const Eigen::VectorXd& s = first();
    const Eigen::MatrixXd& ss = second();
    const double b = static_cast<double>(count_);
    EmpiricalMoments m;
    m.side = side;
    m.count = count_;
    m.mu = s / b;
    m.gamma.resize(sites_, sites_);
    for (Eigen::Index j = 0; j < sites_; ++j) {
        m.gamma(j, j) = 1.0 - m.mu(j) * m.mu(j);
        for (Eigen::Index i = j + 1; i < sites_; ++i) {
            const double g = ss(i, j) / b - m.mu(i) * m.mu(j);
            m.gamma(i, j) = g;
            m.gamma(j, i) = g;
        }
    }
    return m;
}

EmpiricalMoments compute_moments(const PatchSet& ps) {
    if (ps.empty()) throw InvalidArgument("compute_moments: empty patch set");
    const auto n = static_cast<Eigen::Index>(ps.sites());
    const std::size_t shards = std::min<std::size_t>(thread_count(), ps.size());
    std::vector<SpinMomentAccumulator> partial;
    partial.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) partial.emplace_back(n);
    parallel_for(shards, [&](std::size_t s) {
        const std::size_t begin = ps.size() * s / shards, end = ps.size() * (s + 1) / shards;
        for (std::size_t k = begin; k < end; ++k) partial[s].add(ps.patch(k));
    });
    for (std::size_t s = 1; s < shards; ++s) partial[0].merge(partial[s]);
    return partial[0].moments(ps.side());
}

namespace {

constexpr char kMagic[8] = {'B', 'M', 'P', 'A', 'T', 'C', 'H', '1'};
constexpr std::size_t kHeader = 8 + 4 + 8;

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_patchset(const PatchSet& ps) {
    if (ps.empty()) throw InvalidArgument("refusing to encode an empty patch set");
    const std::size_t record = (ps.sites() + 7) / 8;
    std::vector<std::uint8_t> out(kMagic, kMagic + 8);
    out.reserve(kHeader + record * ps.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ps.side()));
    put_le<std::uint64_t>(out, ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const auto spins = ps.patch(k);
        const std::size_t at = out.size();
        out.resize(at + record, 0);
        for (std::size_t i = 0; i < spins.size(); ++i)
            if (spins[i] > 0) out[at + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return out;
}

PatchSet decode_patchset(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeader) throw FormatError("patch file: truncated header");
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw FormatError("patch file: bad magic");
    const auto side = get_le<std::uint32_t>(bytes.data() + 8);
    const auto count = get_le<std::uint64_t>(bytes.data() + 12);
    if (side == 0) throw FormatError("patch file: L is zero");
    if (count == 0) throw FormatError("patch file: B is zero");
    if (side > 4096) throw FormatError("patch file: L too large");
    const std::size_t sites = static_cast<std::size_t>(side) * side;
    const std::size_t record = (sites + 7) / 8;
    if ((bytes.size() - kHeader) / record != count || (bytes.size() - kHeader) % record != 0)
        throw FormatError("patch file: header claims " + std::to_string(count) + " patches, payload holds " +
                          std::to_string(static_cast<double>(bytes.size() - kHeader) / record));

    PatchSet ps(static_cast<int>(side));
    ps.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto* rec = bytes.data() + kHeader + k * record;
        auto dst = ps.patch(k);
        for (std::size_t i = 0; i < sites; ++i) dst[i] = ((rec[i / 8] >> (7 - i % 8)) & 1u) ? 1 : -1;
    }
    return ps;
}

void save_patchset(const std::string& path, const PatchSet& ps) { write_file(path, encode_patchset(ps)); }

PatchSet load_patchset(const std::string& path) { return decode_patchset(read_file(path)); }

}  // namespace bmprior
