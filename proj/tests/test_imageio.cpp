#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

#include "bmprior/error.hpp"
#include "bmprior/imageio.hpp"
#include "bmprior/rng.hpp"

using namespace bmprior;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

GrayImage constant_image(int w, int h, std::uint16_t value, int maxval = 255) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.maxval = maxval;
    img.samples.assign(static_cast<std::size_t>(w) * h, value);
    return img;
}

GrayImage random_image(int w, int h, std::uint64_t seed) {
    GrayImage img = constant_image(w, h, 0);
    Rng rng(seed);
    for (auto& s : img.samples) s = static_cast<std::uint16_t>(rng.index(256));
    return img;
}

}  // namespace

TEST_CASE("read_pgm parses a minimal ASCII file") {
    const GrayImage img = read_pgm(bytes_of("P2 2 1 255 \n 0 255"));
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.maxval == 255);
    CHECK(img.samples == std::vector<std::uint16_t>{0, 255});
}

TEST_CASE("read_pgm parses binary payloads and skips comments") {
    std::string s = "P5\n# a comment\n3 2\n# another\n255\n";
    s += std::string("\x01\x02\x03\x04\x05\x06", 6);
    const GrayImage img = read_pgm(bytes_of(s));
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    CHECK(img.samples == std::vector<std::uint16_t>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("read_pgm reads 16-bit big-endian samples") {
    std::string s = "P5 2 1 65535\n";
    s += std::string("\x12\x34\xff\xff", 4);
    const GrayImage img = read_pgm(bytes_of(s));
    CHECK(img.samples == std::vector<std::uint16_t>{0x1234, 0xffff});
}

TEST_CASE("read_pgm rejects malformed input") {
    std::string truncated = "P5 2 2 255\n";
    truncated += std::string("\x01\x02\x03", 3);
    CHECK_THROWS_AS(read_pgm(bytes_of(truncated)), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2 2 1 255 0")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P3 1 1 255 0 0 0")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2 1 1 0 0")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2 1 1 65536 0")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2 1 1 255 256")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2 x 1 255 0")), FormatError);
    CHECK_THROWS_AS(read_pgm(bytes_of("")), FormatError);
}

TEST_CASE("write_pgm round-trips 8-bit and 16-bit images") {
    GrayImage a = random_image(7, 5, 3);
    CHECK(read_pgm(write_pgm(a)).samples == a.samples);
    GrayImage b = constant_image(3, 3, 0, 1000);
    b.samples[4] = 999;
    const GrayImage back = read_pgm(write_pgm(b));
    CHECK(back.maxval == 1000);
    CHECK(back.samples == b.samples);
}

TEST_CASE("PBM round-trip and P1 reading") {
    BinaryImage img;
    img.width = 11;
    img.height = 3;
    Rng rng(5);
    for (int i = 0; i < 33; ++i) img.spins.push_back(rng.spin());
    const BinaryImage back = read_pbm(write_pbm(img));
    CHECK(back.width == 11);
    CHECK(back.spins == img.spins);

    const BinaryImage p1 = read_pbm(bytes_of("P1\n# c\n3 1\n1 0 1\n"));
    CHECK(p1.spins == std::vector<std::int8_t>{1, -1, 1});
    CHECK_THROWS_AS(read_pbm(bytes_of("P4 9 2\n\x01")), FormatError);
}

TEST_CASE("threshold tie maps to light") {
    // 128/255 is not exactly 0.5, so use maxval 2 where sample 1 sits on it.
    const BinaryImage out = binarize(constant_image(4, 4, 1, 2), Dither::none, 0.5);
    CHECK(std::all_of(out.spins.begin(), out.spins.end(), [](auto s) { return s == -1; }));
}

TEST_CASE("plain threshold separates dark from light") {
    GrayImage img = constant_image(2, 1, 0);
    img.samples = {100, 200};
    const BinaryImage out = binarize(img, Dither::none, 0.5);
    CHECK(out.spins == std::vector<std::int8_t>{1, -1});
}

TEST_CASE("black images are all +1 and white images all -1 under every method") {
    for (Dither d : {Dither::none, Dither::floyd, Dither::riemersma}) {
        CAPTURE(to_string(d));
        const BinaryImage black = binarize(constant_image(13, 9, 0), d);
        CHECK(std::all_of(black.spins.begin(), black.spins.end(), [](auto s) { return s == 1; }));
        const BinaryImage white = binarize(constant_image(13, 9, 255), d);
        CHECK(std::all_of(white.spins.begin(), white.spins.end(), [](auto s) { return s == -1; }));
    }
}

TEST_CASE("plain threshold of a constant image darker than threshold is all +1") {
    const BinaryImage out = binarize(constant_image(5, 5, 90), Dither::none, 0.5);
    CHECK(std::all_of(out.spins.begin(), out.spins.end(), [](auto s) { return s == 1; }));
}

TEST_CASE("dithering keeps the mean of a constant gray") {
    // Error diffusion reproduces gray levels, so a dark gray is not all +1.
    for (Dither d : {Dither::floyd, Dither::riemersma}) {
        const BinaryImage out = binarize(constant_image(32, 32, 64), d);
        const double dark = std::count(out.spins.begin(), out.spins.end(), 1) / 1024.0;
        CHECK(dark == doctest::Approx(1.0 - 64.0 / 255.0).epsilon(0.05));
    }
}

TEST_CASE("Floyd-Steinberg on 50% gray is balanced and textured") {
    const BinaryImage out = binarize(constant_image(16, 16, 1, 2), Dither::floyd, 0.5);
    const double mean = std::accumulate(out.spins.begin(), out.spins.end(), 0.0) / 256.0;
    CHECK(std::abs(mean) <= 0.1);
    // Alternating texture: most horizontal neighbours differ.
    int differ = 0;
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x + 1 < 16; ++x) differ += out.at(x, y) != out.at(x + 1, y);
    CHECK(differ > 200);
}

TEST_CASE("Floyd-Steinberg matches a hand-run 3x2 diffusion") {
    GrayImage img = constant_image(3, 2, 0, 10);
    img.samples = {4, 6, 5, 3, 7, 5};
    // Values as fractions of maxval; 0 black, 1 white, threshold 0.5.
    std::vector<double> v = {0.4, 0.6, 0.5, 0.3, 0.7, 0.5};
    std::vector<std::int8_t> expected(6);
    auto at = [&](int x, int y) -> double& { return v[static_cast<std::size_t>(y * 3 + x)]; };
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) {
            const double level = at(x, y) < 0.5 ? 0.0 : 1.0;
            expected[static_cast<std::size_t>(y * 3 + x)] = level == 0.0 ? 1 : -1;
            const double e = at(x, y) - level;
            if (x + 1 < 3) at(x + 1, y) += e * 7 / 16;
            if (y + 1 < 2) {
                if (x > 0) at(x - 1, y + 1) += e * 3 / 16;
                at(x, y + 1) += e * 5 / 16;
                if (x + 1 < 3) at(x + 1, y + 1) += e * 1 / 16;
            }
        }
    CHECK(binarize(img, Dither::floyd).spins == expected);
}

TEST_CASE("Floyd-Steinberg error bookkeeping balances per row and overall") {
    const GrayImage img = random_image(23, 17, 11);
    FloydLedger ledger;
    const BinaryImage out = binarize(img, Dither::floyd, 0.5, &ledger);
    REQUIRE(ledger.generated.size() == 17);
    double dropped = 0.0;
    for (std::size_t y = 0; y < 17; ++y) {
        CHECK(ledger.generated[y] == doctest::Approx(ledger.kept[y] + ledger.dropped[y]).epsilon(1e-12));
        dropped += ledger.dropped[y];
    }
    // Whatever error was not absorbed inside the image is the total
    // difference between input luminance and output levels.
    double residual = 0.0;
    for (std::size_t i = 0; i < img.samples.size(); ++i)
        residual += img.samples[i] / 255.0 - (out.spins[i] == 1 ? 0.0 : 1.0);
    CHECK(dropped == doctest::Approx(residual).epsilon(1e-9));
}

TEST_CASE("Hilbert order visits every in-image pixel once with unit steps on square images") {
    for (auto [w, h] : {std::pair{8, 8}, std::pair{5, 3}, std::pair{1, 7}, std::pair{16, 9}}) {
        const auto order = hilbert_order(w, h);
        CHECK(order.size() == static_cast<std::size_t>(w * h));
        CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == order.size());
    }
    const auto order = hilbert_order(8, 8);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const int dx = std::abs(static_cast<int>(order[k] % 8) - static_cast<int>(order[k - 1] % 8));
        const int dy = std::abs(static_cast<int>(order[k] / 8) - static_cast<int>(order[k - 1] / 8));
        CHECK(dx + dy == 1);
    }
}

TEST_CASE("binarize is deterministic") {
    const GrayImage img = random_image(19, 21, 7);
    for (Dither d : {Dither::none, Dither::floyd, Dither::riemersma})
        CHECK(binarize(img, d).spins == binarize(img, d).spins);
}

TEST_CASE("binarize validates its arguments") {
    CHECK_THROWS_AS(binarize(GrayImage{}, Dither::none), InvalidArgument);
    CHECK_THROWS_AS(binarize(constant_image(2, 2, 0), Dither::none, 0.0), InvalidArgument);
    CHECK_THROWS_AS(binarize(constant_image(2, 2, 0), Dither::none, 1.5), InvalidArgument);
    CHECK_THROWS_AS(parse_dither("sierra"), InvalidArgument);
    CHECK(parse_dither("floyd") == Dither::floyd);
}

TEST_CASE("file helpers round-trip and report missing files") {
    const std::string path = "imageio_roundtrip.pgm";
    const GrayImage img = random_image(4, 4, 1);
    write_file(path, write_pgm(img));
    CHECK(read_pgm_file(path).samples == img.samples);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_file("does/not/exist.pgm"), Error);
}
