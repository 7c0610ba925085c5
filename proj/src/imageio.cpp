#include "bmprior/imageio.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "bmprior/error.hpp"

namespace bmprior {
namespace {

// Whitespace/comment-aware tokenizer for netpbm headers.
class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long number(const char* what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw FormatError(std::string("netpbm: expected ") + what);
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000) throw FormatError(std::string("netpbm: ") + what + " too large");
            ++pos_;
        }
        return v;
    }

    // Exactly one whitespace byte separates the header from a binary payload.
    void end_of_header() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw FormatError("netpbm: missing whitespace after header");
        ++pos_;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_dimensions(long w, long h) {
    if (w <= 0 || h <= 0) throw FormatError("netpbm: width and height must be positive");
    if (w * h > (1L << 30)) throw FormatError("netpbm: image too large");
}

std::string magic_of(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2) throw FormatError("netpbm: file too short");
    return {static_cast<char>(bytes[0]), static_cast<char>(bytes[1])};
}

}  // namespace

Dither parse_dither(const std::string& name) {
    if (name == "riemersma") return Dither::riemersma;
    if (name == "floyd") return Dither::floyd;
    if (name == "none") return Dither::none;
    throw InvalidArgument("unknown dither method '" + name + "'");
}

const char* to_string(Dither d) noexcept {
    switch (d) {
        case Dither::riemersma: return "riemersma";
        case Dither::floyd: return "floyd";
        case Dither::none: return "none";
    }
    return "?";
}

GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
    const std::string magic = magic_of(bytes);
    if (magic != "P2" && magic != "P5") throw FormatError("pgm: bad magic '" + magic + "'");
    HeaderReader hdr(bytes);
    hdr.advance(2);
    const long w = hdr.number("width");
    const long h = hdr.number("height");
    const long maxval = hdr.number("maxval");
    check_dimensions(w, h);
    if (maxval < 1 || maxval > 65535) throw FormatError("pgm: maxval must be in [1, 65535]");

    GrayImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.maxval = static_cast<int>(maxval);
    const std::size_t count = static_cast<std::size_t>(w * h);
    img.samples.resize(count);

    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            long v;
            try {
                v = hdr.number("sample");
            } catch (const FormatError&) {
                throw FormatError("pgm: truncated payload");
            }
            if (v > maxval) throw FormatError("pgm: sample exceeds maxval");
            img.samples[i] = static_cast<std::uint16_t>(v);
        }
        return img;
    }

    hdr.end_of_header();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    const std::size_t need = count * bytes_per;
    if (bytes.size() - hdr.pos() < need) throw FormatError("pgm: truncated payload");
    const auto* p = bytes.data() + hdr.pos();
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = bytes_per == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
        if (v > static_cast<unsigned>(maxval)) throw FormatError("pgm: sample exceeds maxval");
        img.samples[i] = static_cast<std::uint16_t>(v);
    }
    return img;
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width) + " " +
                               std::to_string(img.height) + "\n" + std::to_string(img.maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (auto s : img.samples) {
        if (img.maxval > 255) out.push_back(static_cast<std::uint8_t>(s >> 8));
        out.push_back(static_cast<std::uint8_t>(s & 0xff));
    }
    return out;
}

std::vector<std::uint8_t> write_pbm(const BinaryImage& img) {
    const std::string header =
        "P4\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::size_t row_bytes = (static_cast<std::size_t>(img.width) + 7) / 8;
    for (int y = 0; y < img.height; ++y) {
        std::vector<std::uint8_t> row(row_bytes, 0);
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) > 0) row[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

BinaryImage read_pbm(std::span<const std::uint8_t> bytes) {
    const std::string magic = magic_of(bytes);
    if (magic != "P1" && magic != "P4") throw FormatError("pbm: bad magic '" + magic + "'");
    HeaderReader hdr(bytes);
    hdr.advance(2);
    const long w = hdr.number("width");
    const long h = hdr.number("height");
    check_dimensions(w, h);

    BinaryImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.spins.resize(static_cast<std::size_t>(w * h));

    if (magic == "P1") {
        for (auto& s : img.spins) {
            hdr.skip_space_and_comments();
            if (hdr.pos() >= bytes.size()) throw FormatError("pbm: truncated payload");
            const auto c = bytes[hdr.pos()];
            if (c != '0' && c != '1') throw FormatError("pbm: bad ASCII pixel");
            s = c == '1' ? 1 : -1;
            hdr.advance(1);
        }
        return img;
    }

    hdr.end_of_header();
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    if (bytes.size() - hdr.pos() < row_bytes * static_cast<std::size_t>(h))
        throw FormatError("pbm: truncated payload");
    const auto* p = bytes.data() + hdr.pos();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const bool black = (p[y * row_bytes + x / 8] >> (7 - x % 8)) & 1u;
            img.spins[static_cast<std::size_t>(y) * img.width + x] = black ? 1 : -1;
        }
    return img;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

GrayImage read_pgm_file(const std::string& path) { return read_pgm(read_file(path)); }
BinaryImage read_pbm_file(const std::string& path) { return read_pbm(read_file(path)); }

std::vector<std::size_t> hilbert_order(int width, int height) {
    int n = 1;
    while (n < width || n < height) n *= 2;
    std::vector<std::size_t> order;
    order.reserve(static_cast<std::size_t>(width) * height);
    const std::size_t cells = static_cast<std::size_t>(n) * n;
    for (std::size_t d = 0; d < cells; ++d) {
        // Distance along the curve -> (x, y), rotating quadrants as we go.
        std::size_t t = d;
        long x = 0, y = 0;
        for (long s = 1; s < n; s *= 2) {
            const long rx = 1 & static_cast<long>(t / 2);
            const long ry = 1 & static_cast<long>(t ^ static_cast<std::size_t>(rx));
            if (ry == 0) {
                if (rx == 1) {
                    x = s - 1 - x;
                    y = s - 1 - y;
                }
                std::swap(x, y);
            }
            x += s * rx;
            y += s * ry;
            t /= 4;
        }
        if (x < width && y < height) order.push_back(static_cast<std::size_t>(y) * width + x);
    }
    return order;
}

namespace {

inline std::int8_t quantize(double luminance, double threshold) {
    return luminance < threshold ? std::int8_t{1} : std::int8_t{-1};
}

inline double level_of(std::int8_t spin) { return spin > 0 ? 0.0 : 1.0; }

BinaryImage floyd_steinberg(const GrayImage& img, double threshold, FloydLedger* ledger) {
    const int w = img.width, h = img.height;
    BinaryImage out{w, h, std::vector<std::int8_t>(img.samples.size())};
    std::vector<double> current(static_cast<std::size_t>(w), 0.0), next(static_cast<std::size_t>(w), 0.0);
    if (ledger) *ledger = FloydLedger{std::vector<double>(h), std::vector<double>(h), std::vector<double>(h)};

    for (int y = 0; y < h; ++y) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 0; x < w; ++x) {
            const double value = img.at(x, y) / static_cast<double>(img.maxval) + current[x];
            const std::int8_t s = quantize(value, threshold);
            out.spins[static_cast<std::size_t>(y) * w + x] = s;
            const double err = value - level_of(s);

            double kept = 0.0;
            auto give = [&](std::vector<double>& row, int xx, bool in_image, double weight) {
                if (in_image) {
                    row[xx] += err * weight;
                    kept += err * weight;
                }
            };
            const bool has_right = x + 1 < w, has_below = y + 1 < h;
            give(current, x + 1, has_right, 7.0 / 16.0);
            give(next, x - 1, has_below && x > 0, 3.0 / 16.0);
            give(next, x, has_below, 5.0 / 16.0);
            give(next, x + 1, has_below && has_right, 1.0 / 16.0);
            if (ledger) {
                ledger->generated[y] += err;
                ledger->kept[y] += kept;
                ledger->dropped[y] += err - kept;
            }
        }
        std::swap(current, next);
    }
    return out;
}

BinaryImage riemersma(const GrayImage& img, double threshold) {
    constexpr int queue_len = 16;
    constexpr double newest_over_oldest = 16.0;
    std::array<double, queue_len> weights{};
    const double ratio = std::pow(newest_over_oldest, 1.0 / (queue_len - 1));
    for (int i = 0; i < queue_len; ++i) weights[i] = std::pow(ratio, i);  // [0] oldest

    BinaryImage out{img.width, img.height, std::vector<std::int8_t>(img.samples.size())};
    std::array<double, queue_len> errors{};
    for (std::size_t idx : hilbert_order(img.width, img.height)) {
        double carried = 0.0;
        for (int i = 0; i < queue_len; ++i) carried += errors[i] * weights[i];
        const double original = img.samples[idx] / static_cast<double>(img.maxval);
        const std::int8_t s = quantize(original + carried / newest_over_oldest, threshold);
        out.spins[idx] = s;
        std::rotate(errors.begin(), errors.begin() + 1, errors.end());
        errors[queue_len - 1] = original - level_of(s);
    }
    return out;
}

}  // namespace

BinaryImage binarize(const GrayImage& img, Dither method, double threshold, FloydLedger* ledger) {
    if (img.width <= 0 || img.height <= 0 || img.samples.empty())
        throw InvalidArgument("binarize: empty image");
    if (img.samples.size() != static_cast<std::size_t>(img.width) * img.height)
        throw InvalidArgument("binarize: sample count does not match dimensions");
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw InvalidArgument("binarize: threshold must be in (0, 1]");

    switch (method) {
        case Dither::floyd: return floyd_steinberg(img, threshold, ledger);
        case Dither::riemersma: return riemersma(img, threshold);
        case Dither::none: break;
    }
    BinaryImage out{img.width, img.height, std::vector<std::int8_t>(img.samples.size())};
    for (std::size_t i = 0; i < img.samples.size(); ++i)
        out.spins[i] = quantize(img.samples[i] / static_cast<double>(img.maxval), threshold);
    return out;
}

}  // namespace bmprior
