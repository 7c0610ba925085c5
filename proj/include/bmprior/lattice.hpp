#pragma once

#include <cstddef>

namespace bmprior {

// Pixel coordinate on an L x L patch: x grows rightward, y downward, and the
// upper-left pixel is (1, 1).
struct Site {
    int x = 1;
    int y = 1;
    friend bool operator==(const Site&, const Site&) = default;
};

// Row-major linear index of a site.
constexpr std::size_t site_index(Site s, int side) noexcept {
    return static_cast<std::size_t>(s.y - 1) * static_cast<std::size_t>(side) +
           static_cast<std::size_t>(s.x - 1);
}

constexpr Site site_at(std::size_t index, int side) noexcept {
    return Site{static_cast<int>(index % static_cast<std::size_t>(side)) + 1,
                static_cast<int>(index / static_cast<std::size_t>(side)) + 1};
}

}  // namespace bmprior
