#pragma once

#include <filesystem>

#include "gcm/types.hpp"

namespace gcm {

/// Writes a 16-bit binary PGM (P5, maxval 65535, big-endian samples).
/// Intensities map linearly from [0,1] to [0,65535]; values are clamped.
void write_pgm16(const std::filesystem::path& path, const ImageGrid& image);

/// Reads a binary PGM written by write_pgm16 (8-bit files are accepted too)
/// and maps samples back into [0,1].
ImageGrid read_pgm16(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM; used for plot output.
void write_pgm8(const std::filesystem::path& path, const ImageGrid& image);

}  // namespace gcm
