#include "gcm/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace gcm {
namespace {

void write_all(const std::filesystem::path& path, const std::string& header,
               const std::vector<unsigned char>& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (!out) throw io_error("write failed: " + path.string());
}

int read_pnm_token(std::istream& in, const std::filesystem::path& path) {
    // Skips whitespace and '#' comments between header fields.
    int c = in.get();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        }
        c = in.get();
    }
    int value = 0;
    bool any = false;
    while (std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw io_error("malformed PGM header: " + path.string());
    return value;
}

}  // namespace

void write_pgm16(const std::filesystem::path& path, const ImageGrid& image) {
    image.require_valid();
    std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                         "\n65535\n";
    std::vector<unsigned char> body;
    body.reserve(image.pixels.size() * 2);
    for (double v : image.pixels) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        const auto q = static_cast<std::uint16_t>(std::lround(clamped * 65535.0));
        body.push_back(static_cast<unsigned char>(q >> 8));
        body.push_back(static_cast<unsigned char>(q & 0xFF));
    }
    write_all(path, header, body);
}

void write_pgm8(const std::filesystem::path& path, const ImageGrid& image) {
    image.require_valid();
    std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                         "\n255\n";
    std::vector<unsigned char> body;
    body.reserve(image.pixels.size());
    for (double v : image.pixels) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        body.push_back(static_cast<unsigned char>(std::lround(clamped * 255.0)));
    }
    write_all(path, header, body);
}

ImageGrid read_pgm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') {
        throw io_error("not a binary PGM (P5): " + path.string());
    }
    const int width = read_pnm_token(in, path);
    const int height = read_pnm_token(in, path);
    const int maxval = read_pnm_token(in, path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
        throw io_error("bad PGM geometry in " + path.string());
    }

    ImageGrid img(height, width);
    const std::size_t n = img.pixels.size();
    const bool wide = maxval > 255;
    std::vector<unsigned char> body(n * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (static_cast<std::size_t>(in.gcount()) != body.size()) {
        throw io_error("truncated PGM body: " + path.string());
    }
    const double inv = 1.0 / maxval;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned sample =
            wide ? (static_cast<unsigned>(body[2 * i]) << 8 | body[2 * i + 1]) : body[i];
        img.pixels[i] = sample * inv;
    }
    return img;
}

}  // namespace gcm
