#include "support/synthetic.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "bmprior/rng.hpp"

namespace synthetic {

namespace {

int wrap(int k, int side) { return ((k % side) + side) % side; }
int signed_index(int k, int side) { return k <= side / 2 ? k : k - side; }

}  // namespace

std::vector<double> power_law_field(int side, double c, std::uint64_t seed) {
    using cd = std::complex<double>;
    const auto n = static_cast<std::size_t>(side);
    std::vector<cd> spec(n * n, cd(0.0, 0.0));
    bmprior::Rng rng(seed);
    for (int ky = 0; ky < side; ++ky)
        for (int kx = 0; kx < side; ++kx) {
            const int mx = wrap(-kx, side), my = wrap(-ky, side);
            // Fill each conjugate pair once, from its lexicographically smaller member.
            if (std::make_pair(my, mx) < std::make_pair(ky, kx)) continue;
            const double f = std::hypot(signed_index(kx, side), signed_index(ky, side));
            if (f == 0.0) continue;
            const double amp = c / f;
            if (mx == kx && my == ky) {
                // Self-conjugate frequencies must be real.
                spec[static_cast<std::size_t>(ky) * n + kx] = rng.uniform() < 0.5 ? amp : -amp;
                continue;
            }
            const double phase = 2.0 * std::numbers::pi * rng.uniform();
            const cd v = std::polar(amp, phase);
            spec[static_cast<std::size_t>(ky) * n + kx] = v;
            spec[static_cast<std::size_t>(my) * n + mx] = std::conj(v);
        }
    std::vector<double> field(n * n, 0.0);
    const double step = 2.0 * std::numbers::pi / side;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            cd acc(0.0, 0.0);
            for (int ky = 0; ky < side; ++ky)
                for (int kx = 0; kx < side; ++kx)
                    acc += spec[static_cast<std::size_t>(ky) * n + kx] * std::polar(1.0, step * (kx * x + ky * y));
            field[static_cast<std::size_t>(y) * n + x] = acc.real() / (side * side);
        }
    return field;
}

std::vector<double> naive_dft_magnitude(const std::vector<double>& field, int side) {
    using cd = std::complex<double>;
    const auto n = static_cast<std::size_t>(side);
    std::vector<double> out(n * n);
    const double step = 2.0 * std::numbers::pi / side;
    for (int ky = 0; ky < side; ++ky)
        for (int kx = 0; kx < side; ++kx) {
            cd acc(0.0, 0.0);
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x)
                    acc += field[static_cast<std::size_t>(y) * n + x] * std::polar(1.0, -step * (kx * x + ky * y));
            out[static_cast<std::size_t>(ky) * n + kx] = std::abs(acc);
        }
    return out;
}

}  // namespace synthetic
