#pragma once

// Binary PGM (P5) / PPM (P6) with maxval 255 or 65535, and PFM (32-bit
// float, little-endian, scale -1.0). Integer formats clip to [0, 1] and
// round half away from zero on export.

#include <filesystem>
#include <iosfwd>

#include "hyperlens/grid.hpp"

namespace hyperlens::io {

enum class Format { Pgm, Ppm, Pfm };

/// Picks the format from the file extension (.pgm, .ppm, .pfm).
Format format_for(const std::filesystem::path& path);

void write_pfm(std::ostream& os, const ImageGrid& img);
void write_pnm(std::ostream& os, const ImageGrid& img, unsigned maxval);
ImageGrid read_image(std::istream& is);

/// `bits` selects 8- or 16-bit samples for the integer formats.
void write_image(const std::filesystem::path& path, const ImageGrid& img, int bits = 16);
ImageGrid read_image(const std::filesystem::path& path);

/// Integer code written for a sample at the given maxval.
unsigned quantize(double v, unsigned maxval);

}  // namespace hyperlens::io
