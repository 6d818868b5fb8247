// Copyright 2026 The anodet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace anodet {
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_file(const std::string& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) fail(ErrorKind::NotFound, "no such file: " + path);
  if (fs::is_directory(path, ec)) fail(ErrorKind::Io, "is a directory: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path);
  return out;
}

// ---------------------------------------------------------------- PNG

struct PngReadState {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_mem(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->size) png_error(png, "unexpected end of data");
  std::memcpy(out, st->data + st->pos, len);
  st->pos += len;
}

void png_quiet_warning(png_structp, png_const_charp) {}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<unsigned char> pixels;
  char message[256] = {0};
};

void png_error_to_buffer(png_structp png, png_const_charp msg) {
  auto* out = static_cast<DecodedPng*>(png_get_error_ptr(png));
  std::snprintf(out->message, sizeof(out->message), "%s", msg);
  png_longjmp(png, 1);
}

// Returns false on a libpng error; no C++ object with a destructor is live
// across the setjmp boundary except the caller-owned buffers.
bool decode_png(const std::vector<unsigned char>& bytes, DecodedPng* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, out, png_error_to_buffer,
                                           png_quiet_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  PngReadState state{bytes.data(), bytes.size(), 0};
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    return false;
  }
  png_set_read_fn(png, &state, png_read_mem);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->channels = png_get_channels(png, info);
  out->bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out->pixels.resize(stride * out->height);
  rows->resize(out->height);
  for (int y = 0; y < out->height; ++y) (*rows)[y] = out->pixels.data() + y * stride;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  return true;
}

Image load_png(const std::string& path, const std::vector<unsigned char>& bytes) {
  DecodedPng dec;
  if (!decode_png(bytes, &dec)) {
    fail(ErrorKind::CorruptInput, "corrupt PNG " + path + ": " + dec.message);
  }
  if (dec.channels != 1 && dec.channels != 3) {
    fail(ErrorKind::UnsupportedFormat, "unsupported PNG channel layout in " + path);
  }
  Image img(dec.channels, dec.height, dec.width);
  const double scale = dec.bit_depth == 16 ? 65535.0 : 255.0;
  const std::size_t stride = dec.pixels.size() / dec.height;
  for (int y = 0; y < dec.height; ++y) {
    const unsigned char* row = dec.pixels.data() + y * stride;
    for (int x = 0; x < dec.width; ++x) {
      for (int c = 0; c < dec.channels; ++c) {
        const std::size_t i = static_cast<std::size_t>(x) * dec.channels + c;
        const double v = dec.bit_depth == 16 ? (row[2 * i] << 8 | row[2 * i + 1]) : row[i];
        img.at(c, y, x) = v / scale;
      }
    }
  }
  return img;
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<unsigned char>& pixels) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) fail(ErrorKind::Io, "cannot write: " + path);
  DecodedPng err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_to_buffer,
                                            png_quiet_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  volatile bool ok = png && info;
  if (ok) {
    if (setjmp(png_jmpbuf(png))) {
      ok = false;
    } else {
      png_init_io(png, fp);
      png_set_IHDR(png, info, width, height, 8,
                   channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                   PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
      png_write_info(png, info);
      for (int y = 0; y < height; ++y) {
        png_write_row(png, pixels.data() + static_cast<std::size_t>(y) * width * channels);
      }
      png_write_end(png, nullptr);
    }
  }
  png_destroy_write_struct(&png, &info);
  const bool closed = std::fclose(fp) == 0;
  if (!ok || !closed) fail(ErrorKind::Io, "failed writing PNG " + path);
}

// ---------------------------------------------------------------- PNM / PFM

class HeaderReader {
 public:
  HeaderReader(const std::vector<unsigned char>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_space_and_comments();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
    if (t.empty()) fail(ErrorKind::CorruptInput, "truncated header in " + path_);
    return t;
  }

  long integer() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0' || v <= 0) fail(ErrorKind::CorruptInput, "bad header field '" + t + "' in " + path_);
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0' || v == 0.0 || !std::isfinite(v)) {
      fail(ErrorKind::CorruptInput, "bad scale field '" + t + "' in " + path_);
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorKind::CorruptInput, "truncated header in " + path_);
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

Image load_pnm(const std::string& path, const std::vector<unsigned char>& bytes, int channels) {
  HeaderReader hdr(bytes, path);
  const long w = hdr.integer();
  const long h = hdr.integer();
  const long maxval = hdr.integer();
  if (maxval > 65535) fail(ErrorKind::UnsupportedFormat, "PNM maxval above 65535 in " + path);
  const std::size_t offset = hdr.raster_offset();
  const std::size_t bps = maxval < 256 ? 1 : 2;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels * bps;
  if (bytes.size() < offset + need) fail(ErrorKind::CorruptInput, "truncated raster in " + path);
  Image img(channels, static_cast<int>(h), static_cast<int>(w));
  const unsigned char* p = bytes.data() + offset;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        double v;
        if (bps == 1) {
          v = *p++;
        } else {
          v = (p[0] << 8) | p[1];
          p += 2;
        }
        img.at(c, y, x) = v / static_cast<double>(maxval);
      }
    }
  }
  return img;
}

Image load_pfm(const std::string& path, const std::vector<unsigned char>& bytes, int channels) {
  HeaderReader hdr(bytes, path);
  const long w = hdr.integer();
  const long h = hdr.integer();
  const double scale = hdr.real();
  const std::size_t offset = hdr.raster_offset();
  const std::size_t need = static_cast<std::size_t>(w) * h * channels * 4;
  if (bytes.size() < offset + need) fail(ErrorKind::CorruptInput, "truncated raster in " + path);
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  Image img(channels, static_cast<int>(h), static_cast<int>(w));
  const unsigned char* p = bytes.data() + offset;
  for (long y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        unsigned char b[4] = {p[0], p[1], p[2], p[3]};
        if (swap) {
          std::swap(b[0], b[3]);
          std::swap(b[1], b[2]);
        }
        float f;
        std::memcpy(&f, b, 4);
        img.at(c, static_cast<int>(y), x) = f;
        p += 4;
      }
    }
  }
  return img;
}

void write_pfm(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3) fail(ErrorKind::InvalidArgument, "PFM holds 1 or 3 channels");
  auto out = open_for_write(path);
  out << (img.channels == 3 ? "PF" : "Pf") << '\n' << img.width << ' ' << img.height << "\n-1.0\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * img.channels * 4);
  for (int y = img.height - 1; y >= 0; --y) {
    unsigned char* p = row.data();
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const double v = img.at(c, y, x);
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "PFM needs finite samples: " + path);
        const float f = static_cast<float>(v);
        unsigned char b[4];
        std::memcpy(b, &f, 4);
        if constexpr (std::endian::native == std::endian::big) {
          std::swap(b[0], b[3]);
          std::swap(b[1], b[2]);
        }
        std::memcpy(p, b, 4);
        p += 4;
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path);
}

}  // namespace

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(data.begin(), data.end(), 1)); }

Image load_image(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return load_png(path, bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    switch (bytes[1]) {
      case '5': return load_pnm(path, bytes, 1);
      case '6': return load_pnm(path, bytes, 3);
      case 'f': return load_pfm(path, bytes, 1);
      case 'F': return load_pfm(path, bytes, 3);
      default: break;
    }
  }
  if (bytes.empty()) fail(ErrorKind::CorruptInput, "empty file: " + path);
  fail(ErrorKind::UnsupportedFormat, "unrecognized image format: " + path);
}

Mask load_mask(const std::string& path) {
  const Image img = load_image(path);
  Mask m(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      m.data[static_cast<std::size_t>(y) * img.width + x] = img.at(0, y, x) * 255.0 > 127.5 ? 1 : 0;
    }
  }
  return m;
}

void save_float_map(const Map& map, const std::string& path) { write_pfm(Image::from_map(map), path); }

void save_pfm(const Image& img, const std::string& path) { write_pfm(img, path); }

std::array<std::uint8_t, 3> heatmap_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {{
      {0, 0, 0},
      {64, 0, 128},
      {200, 30, 60},
      {255, 160, 0},
      {255, 255, 200},
  }};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), stops.size() - 2);
  const double f = pos - static_cast<double>(i);
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<std::uint8_t>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
  }
  return rgb;
}

std::string heatmap_range_path(const std::string& heatmap_path) {
  fs::path p(heatmap_path);
  return (p.parent_path() / (p.stem().string() + ".range.txt")).string();
}

void save_heatmap(const Map& map, const std::string& path) {
  const double lo = map.min();
  const double hi = map.max();
  std::vector<unsigned char> px(map.size() * 3);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double t = hi > lo ? (map.data[i] - lo) / (hi - lo) : 0.5;
    const auto rgb = heatmap_color(t);
    std::copy(rgb.begin(), rgb.end(), px.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  write_png(path, map.width, map.height, 3, px);
  auto side = open_for_write(heatmap_range_path(path));
  side << std::setprecision(17) << lo << ' ' << hi << '\n';
  if (!side) fail(ErrorKind::Io, "failed writing heatmap range for " + path);
}

void save_mask(const Mask& mask, const std::string& path) {
  std::vector<unsigned char> px(mask.data.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (mask.data[i] > 1) fail(ErrorKind::InvalidArgument, "mask values must be 0 or 1");
    px[i] = mask.data[i] ? 255 : 0;
  }
  write_png(path, mask.width, mask.height, 1, px);
}

void save_gray_png(const Map& map, const std::string& path, double lo, double hi) {
  std::vector<unsigned char> px(map.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double t = hi > lo ? (map.data[i] - lo) / (hi - lo) : 0.5;
    px[i] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
  }
  write_png(path, map.width, map.height, 1, px);
}

}  // namespace anodet
