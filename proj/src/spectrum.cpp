#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "bmprior/analysis.hpp"
#include "bmprior/error.hpp"

namespace bmprior {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftBuffers {
    int side;
    double* in;
    fftw_complex* out;
    fftw_plan plan;

    explicit FftBuffers(int n) : side(n) {
        const auto half = static_cast<std::size_t>(n / 2 + 1);
        in = fftw_alloc_real(static_cast<std::size_t>(n) * n);
        out = fftw_alloc_complex(static_cast<std::size_t>(n) * half);
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_2d(n, n, in, out, FFTW_ESTIMATE);
    }
    ~FftBuffers() {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
        fftw_free(in);
        fftw_free(out);
    }
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;

    void run(const double* field) {
        std::copy(field, field + static_cast<std::size_t>(side) * side, in);
        fftw_execute(plan);
    }

    // |F(kx, ky)| on the full grid, using Hermitian symmetry for the half
    // that r2c does not store.
    double magnitude(int kx, int ky) const {
        const int half = side / 2 + 1;
        if (kx >= half) {
            kx = (side - kx) % side;
            ky = (side - ky) % side;
        }
        const fftw_complex& c = out[static_cast<std::size_t>(ky) * half + kx];
        return std::hypot(c[0], c[1]);
    }
};

int signed_freq(int k, int side) { return k <= side / 2 ? k : k - side; }

}  // namespace

Spectrum fourier_spectrum(const std::vector<double>& values, int side, std::size_t count) {
    if (side < 8) throw InvalidArgument("fourier_spectrum: side must be >= 8");
    const std::size_t area = static_cast<std::size_t>(side) * side;
    if (count == 0 || values.size() != area * count)
        throw InvalidArgument("fourier_spectrum: data size does not match side and count");

    const int bins = side / 2;
    std::vector<int> annulus(area, -1);
    std::vector<double> modes(static_cast<std::size_t>(bins) + 1, 0.0);
    for (int ky = 0; ky < side; ++ky)
        for (int kx = 0; kx < side; ++kx) {
            const double f = std::hypot(signed_freq(kx, side), signed_freq(ky, side));
            const auto k = static_cast<int>(std::floor(f + 0.5));
            if (k < 1 || k > bins) continue;
            annulus[static_cast<std::size_t>(ky) * side + kx] = k;
            modes[static_cast<std::size_t>(k)] += 1.0;
        }

    std::vector<double> sums(static_cast<std::size_t>(bins) + 1, 0.0);
    FftBuffers fft(side);
    for (std::size_t p = 0; p < count; ++p) {
        fft.run(values.data() + p * area);
        for (int ky = 0; ky < side; ++ky)
            for (int kx = 0; kx < side; ++kx) {
                const int k = annulus[static_cast<std::size_t>(ky) * side + kx];
                if (k > 0) sums[static_cast<std::size_t>(k)] += fft.magnitude(kx, ky);
            }
    }

    Spectrum s;
    for (int k = 1; k <= bins; ++k) {
        s.frequency.push_back(k);
        s.amplitude.push_back(sums[static_cast<std::size_t>(k)] / (modes[static_cast<std::size_t>(k)] * count));
    }

    // Least squares of ln A on ln f over one decade centred (geometrically)
    // on the available band.
    const double centre = std::sqrt(static_cast<double>(bins));
    s.fit_lo = std::max(1.0, centre / std::sqrt(10.0));
    s.fit_hi = std::min(static_cast<double>(bins), centre * std::sqrt(10.0));
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < s.frequency.size(); ++i) {
        const double f = s.frequency[i], a = s.amplitude[i];
        if (f < s.fit_lo || f > s.fit_hi || !(a > 0.0)) continue;
        const double x = std::log(f), y = std::log(a);
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    s.slope = (n >= 2 && det > 0.0) ? (n * sxy - sx * sy) / det : 0.0;
    return s;
}

Spectrum fourier_spectrum(const PatchSet& ps) {
    const std::size_t sites = ps.sites();
    std::vector<double> values(ps.size() * sites);
    for (std::size_t p = 0; p < ps.size(); ++p) {
        auto patch = ps.patch(p);
        std::copy(patch.begin(), patch.end(), values.begin() + static_cast<std::ptrdiff_t>(p * sites));
    }
    return fourier_spectrum(values, ps.side(), ps.size());
}

Spectrum fourier_spectrum(const BinaryImage& img) {
    const int side = std::min(img.width, img.height);
    if (side < 8) throw InvalidArgument("fourier_spectrum: image is smaller than 8 x 8");
    const int nx = img.width / side, ny = img.height / side;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(nx) * ny * side * side);
    for (int ty = 0; ty < ny; ++ty)
        for (int tx = 0; tx < nx; ++tx)
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x)
                    values.push_back(img.spins[static_cast<std::size_t>(ty * side + y) * img.width + tx * side + x]);
    return fourier_spectrum(values, side, static_cast<std::size_t>(nx) * ny);
}

double spectral_energy(const std::vector<double>& field, int side) {
    if (side < 1 || field.size() != static_cast<std::size_t>(side) * side)
        throw InvalidArgument("spectral_energy: field size does not match side");
    FftBuffers fft(side);
    fft.run(field.data());
    double e = 0.0;
    for (int ky = 0; ky < side; ++ky)
        for (int kx = 0; kx < side; ++kx) {
            const double m = fft.magnitude(kx, ky);
            e += m * m;
        }
    return e;
}

}  // namespace bmprior
