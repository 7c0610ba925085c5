#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bmprior {

/// Grayscale raster as read from a PGM file. Sample 0 is black.
struct GrayImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> samples;  // row-major, each in [0, maxval]

    std::uint16_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
};

/// Binarized raster: +1 is a dark pixel, -1 a light one.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::int8_t> spins;  // row-major, each exactly +1 or -1

    std::int8_t at(int x, int y) const { return spins[static_cast<std::size_t>(y) * width + x]; }
};

enum class Dither { riemersma, floyd, none };

Dither parse_dither(const std::string& name);
const char* to_string(Dither d) noexcept;

// Parses PGM (P2 ASCII or P5 binary). Throws FormatError.
GrayImage read_pgm(std::span<const std::uint8_t> bytes);
GrayImage read_pgm_file(const std::string& path);

// Encodes as binary P5.
std::vector<std::uint8_t> write_pgm(const GrayImage& img);

// PBM with bit 1 = black = +1. Writes P4; reads P1 and P4.
std::vector<std::uint8_t> write_pbm(const BinaryImage& img);
BinaryImage read_pbm(std::span<const std::uint8_t> bytes);
BinaryImage read_pbm_file(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

/// Per-row bookkeeping of Floyd-Steinberg error diffusion. For each row,
/// `generated` (quantization error made in that row) equals `kept`
/// (error handed to in-image pixels) plus `dropped` (weights that fell off
/// the image edges).
struct FloydLedger {
    std::vector<double> generated;
    std::vector<double> kept;
    std::vector<double> dropped;
};

/// Binarizes a gray image. Luminance is taken relative to maxval; pixels
/// darker than `threshold` become +1, a pixel exactly at the threshold is
/// light (-1).
///
/// - none: plain threshold.
/// - floyd: Floyd-Steinberg (7/16, 3/16, 5/16, 1/16), plain raster order.
/// - riemersma: Hilbert-curve walk over the smallest enclosing power-of-two
///   square with a 16-entry error queue whose weights grow geometrically from
///   1 (oldest) to 16 (newest).
BinaryImage binarize(const GrayImage& img, Dither method, double threshold = 0.5,
                     FloydLedger* ledger = nullptr);

// Visit order of the Riemersma walk restricted to in-image pixels, as
// row-major indices.
std::vector<std::size_t> hilbert_order(int width, int height);

}  // namespace bmprior
