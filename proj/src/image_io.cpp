#include "hyperlens/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hyperlens/error.hpp"

namespace hyperlens::io {
namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::IoError, "malformed image: " + what);
}

// Skips whitespace and '#' comments between header fields.
void skip_separators(std::istream& is) {
  while (true) {
    const int ch = is.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(is, ignored);
    } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      is.get();
    } else {
      return;
    }
  }
}

std::size_t read_header_uint(std::istream& is, const char* field) {
  skip_separators(is);
  std::size_t v = 0;
  if (!(is >> v)) malformed(std::string("missing ") + field);
  return v;
}

void read_exact(std::istream& is, char* dst, std::size_t n) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) malformed("truncated pixel data");
}

ImageGrid read_pnm_body(std::istream& is, std::size_t channels) {
  const std::size_t w = read_header_uint(is, "width");
  const std::size_t h = read_header_uint(is, "height");
  const std::size_t maxval = read_header_uint(is, "maxval");
  if (w == 0 || h == 0) malformed("zero dimension");
  if (maxval == 0 || maxval > 65535) malformed("maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(is.get())) malformed("missing raster separator");
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(w * h * channels * bytes_per);
  read_exact(is, reinterpret_cast<char*>(raw.data()), raw.size());
  std::vector<double> samples(channels * h * w);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < h * w; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t k = i * channels + c;
      const unsigned v = bytes_per == 2 ? (unsigned(raw[2 * k]) << 8) | raw[2 * k + 1] : raw[k];
      samples[c * h * w + i] = static_cast<double>(v) * scale;
    }
  }
  return ImageGrid(channels, h, w, std::move(samples));
}

ImageGrid read_pfm_body(std::istream& is, std::size_t channels) {
  const std::size_t w = read_header_uint(is, "width");
  const std::size_t h = read_header_uint(is, "height");
  skip_separators(is);
  double scale = 0.0;
  if (!(is >> scale) || scale == 0.0) malformed("missing scale");
  if (!std::isspace(is.get())) malformed("missing raster separator");
  if (w == 0 || h == 0) malformed("zero dimension");
  const bool little = scale < 0.0;
  std::vector<std::uint32_t> raw(w * h * channels);
  read_exact(is, reinterpret_cast<char*>(raw.data()), raw.size() * 4);
  const bool swap = little != (std::endian::native == std::endian::little);
  std::vector<double> samples(channels * h * w);
  for (std::size_t row = 0; row < h; ++row) {
    // PFM stores the bottom row first.
    const std::size_t dst_row = h - 1 - row;
    for (std::size_t col = 0; col < w; ++col) {
      for (std::size_t c = 0; c < channels; ++c) {
        std::uint32_t bits = raw[(row * w + col) * channels + c];
        if (swap) bits = __builtin_bswap32(bits);
        float f = 0.0f;
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f)) malformed("non-finite sample");
        samples[(c * h + dst_row) * w + col] = static_cast<double>(f);
      }
    }
  }
  return ImageGrid(channels, h, w, std::move(samples));
}

}  // namespace

Format format_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".pgm") return Format::Pgm;
  if (ext == ".ppm") return Format::Ppm;
  if (ext == ".pfm") return Format::Pfm;
  throw Error(ErrorCode::IoError, "unsupported image extension '" + ext + "' for " + path.string());
}

unsigned quantize(double v, unsigned maxval) {
  const double clipped = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned>(std::round(clipped * static_cast<double>(maxval)));
}

void write_pfm(std::ostream& os, const ImageGrid& img) {
  const std::size_t h = img.height(), w = img.width(), ch = img.channels();
  os << (ch == 3 ? "PF" : "Pf") << '\n' << w << ' ' << h << '\n' << "-1.0" << '\n';
  std::vector<unsigned char> row(w * ch * 4);
  for (std::size_t r = h; r-- > 0;) {
    for (std::size_t col = 0; col < w; ++col) {
      for (std::size_t c = 0; c < ch; ++c) {
        const float f = static_cast<float>(img.at(c, r, col));
        std::uint32_t bits = 0;
        std::memcpy(&bits, &f, 4);
        unsigned char* dst = row.data() + (col * ch + c) * 4;
        for (int b = 0; b < 4; ++b) dst[b] = static_cast<unsigned char>(bits >> (8 * b));
      }
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

void write_pnm(std::ostream& os, const ImageGrid& img, unsigned maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw Error(ErrorCode::InvalidArgument, "maxval must be 255 or 65535");
  }
  const std::size_t h = img.height(), w = img.width(), ch = img.channels();
  os << (ch == 3 ? "P6" : "P5") << '\n' << w << ' ' << h << '\n' << maxval << '\n';
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> row(w * ch * bytes_per);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) {
      for (std::size_t c = 0; c < ch; ++c) {
        const unsigned q = quantize(img.at(c, r, col), maxval);
        const std::size_t k = col * ch + c;
        if (bytes_per == 2) {
          row[2 * k] = static_cast<unsigned char>(q >> 8);
          row[2 * k + 1] = static_cast<unsigned char>(q & 0xFF);
        } else {
          row[k] = static_cast<unsigned char>(q);
        }
      }
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

ImageGrid read_image(std::istream& is) {
  char magic[2] = {0, 0};
  is.read(magic, 2);
  if (is.gcount() != 2 || magic[0] != 'P') malformed("unknown magic number");
  switch (magic[1]) {
    case '5': return read_pnm_body(is, 1);
    case '6': return read_pnm_body(is, 3);
    case 'f': return read_pfm_body(is, 1);
    case 'F': return read_pfm_body(is, 3);
    default: malformed(std::string("unsupported magic P") + magic[1]);
  }
}

void write_image(const std::filesystem::path& path, const ImageGrid& img, int bits) {
  const Format format = format_for(path);
  if (format == Format::Pgm && img.channels() != 1) {
    throw Error(ErrorCode::IoError, "PGM holds one channel; use .ppm for " + path.string());
  }
  if (format == Format::Ppm && img.channels() != 3) {
    throw Error(ErrorCode::IoError, "PPM holds three channels; use .pgm for " + path.string());
  }
  if (bits != 8 && bits != 16) throw Error(ErrorCode::InvalidArgument, "bits must be 8 or 16");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  if (format == Format::Pfm) {
    write_pfm(os, img);
  } else {
    write_pnm(os, img, bits == 8 ? 255u : 65535u);
  }
  os.flush();
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

ImageGrid read_image(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_image(is);
}

}  // namespace hyperlens::io
