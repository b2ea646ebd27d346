#include "vesselaudit/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace vaudit {
namespace {

struct DecodedImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int maxval = 255;
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels

  [[nodiscard]] std::uint16_t at(int row, int col, int ch) const {
    return samples[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    throw Error("cannot open " + path.string());
  }
  return f;
}

DecodedImage decode_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng initialization failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("invalid PNG file: " + path.string());
  }

  png_init_io(png, f.get());
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);

  png_read_update_info(png, info);
  bit_depth = png_get_bit_depth(png, info);
  int channels = png_get_channels(png, info);
  std::size_t row_bytes = png_get_rowbytes(png, info);

  data.resize(row_bytes * height);
  row_ptrs.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) {
    row_ptrs[r] = data.data() + r * row_bytes;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw Error("unsupported PNG channel count in " + path.string());
  }

  DecodedImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = channels;
  img.maxval = bit_depth == 16 ? 65535 : 255;
  img.samples.resize(static_cast<std::size_t>(width) * height * channels);
  if (bit_depth == 16) {
    std::memcpy(img.samples.data(), data.data(), img.samples.size() * 2);
  } else {
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
      img.samples[i] = data[i];
    }
  }
  return img;
}

void skip_pnm_space(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
  skip_pnm_space(in);
  int v = -1;
  if (!(in >> v) || v < 0) {
    throw Error("malformed PNM header in " + path.string());
  }
  return v;
}

DecodedImage decode_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());

  char p = 0, digit = 0;
  in.get(p);
  in.get(digit);
  if (p != 'P' || (digit != '2' && digit != '3' && digit != '5' && digit != '6')) {
    throw Error("unsupported image format in " + path.string());
  }
  bool ascii = digit == '2' || digit == '3';
  int channels = (digit == '3' || digit == '6') ? 3 : 1;

  DecodedImage img;
  img.channels = channels;
  img.width = read_pnm_int(in, path);
  img.height = read_pnm_int(in, path);
  img.maxval = read_pnm_int(in, path);
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535) {
    throw Error("malformed PNM header in " + path.string());
  }

  std::size_t n = static_cast<std::size_t>(img.width) * img.height * channels;
  img.samples.resize(n);
  if (ascii) {
    for (std::size_t i = 0; i < n; ++i) {
      int v = read_pnm_int(in, path);
      if (v > img.maxval) throw Error("PNM sample exceeds maxval in " + path.string());
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    in.get();  // single whitespace byte after maxval
    int bytes_per = img.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw Error("truncated PNM data in " + path.string());
    }
    for (std::size_t i = 0; i < n; ++i) {
      img.samples[i] = bytes_per == 2
                           ? static_cast<std::uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1])
                           : raw[i];
    }
  }
  return img;
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

DecodedImage decode_image(const std::filesystem::path& path) {
  return has_png_signature(path) ? decode_png(path) : decode_pnm(path);
}

std::uint16_t gray_sample(const DecodedImage& img, int row, int col,
                          const std::filesystem::path& path) {
  if (img.channels == 1) return img.at(row, col, 0);
  std::uint16_t r = img.at(row, col, 0);
  if (r != img.at(row, col, 1) || r != img.at(row, col, 2)) {
    throw Error("mask has non-gray pixels: " + path.string());
  }
  return r;
}

void encode_png_gray(const std::filesystem::path& path, int width, int height,
                     int bit_depth, const std::vector<std::uint16_t>& samples) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }
  std::vector<png_byte> data;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG write failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::size_t row_bytes = static_cast<std::size_t>(width) * (bit_depth == 16 ? 2 : 1);
  data.resize(row_bytes * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::uint16_t v = samples[static_cast<std::size_t>(r) * width + c];
      if (bit_depth == 16) {
        data[r * row_bytes + 2 * c] = static_cast<png_byte>(v >> 8);
        data[r * row_bytes + 2 * c + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        data[r * row_bytes + c] = static_cast<png_byte>(v);
      }
    }
  }
  row_ptrs.resize(height);
  for (int r = 0; r < height; ++r) row_ptrs[r] = data.data() + r * row_bytes;
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void encode_pgm(const std::filesystem::path& path, int width, int height,
                int maxval, const std::vector<std::uint16_t>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
  if (maxval > 255) {
    for (std::uint16_t v : samples) {
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  } else {
    for (std::uint16_t v : samples) out.put(static_cast<char>(v));
  }
  if (!out) throw Error("write failed: " + path.string());
}

bool has_extension(const std::filesystem::path& path, const char* ext) {
  auto e = path.extension().string();
  for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return e == ext;
}

}  // namespace

BinaryMask load_mask(const std::filesystem::path& path) {
  DecodedImage img = decode_image(path);
  Plane<std::uint8_t> plane(img.height, img.width);
  int cut = img.maxval / 2;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      plane(r, c) = gray_sample(img, r, c, path) > cut ? 1 : 0;
    }
  }
  return BinaryMask(std::move(plane));
}

ProbabilityMap load_probability_map(const std::filesystem::path& path) {
  DecodedImage img = decode_image(path);
  if (img.channels != 1) {
    throw Error("probability map must be grayscale: " + path.string());
  }
  Plane<double> plane(img.height, img.width);
  double scale = 1.0 / img.maxval;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      plane(r, c) = img.at(r, c, 0) * scale;
    }
  }
  return ProbabilityMap(std::move(plane));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(static_cast<std::size_t>(mask.width()) * mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      samples[static_cast<std::size_t>(r) * mask.width() + c] = mask(r, c) ? 255 : 0;
    }
  }
  if (has_extension(path, ".png")) {
    encode_png_gray(path, mask.width(), mask.height(), 8, samples);
  } else if (has_extension(path, ".pgm")) {
    encode_pgm(path, mask.width(), mask.height(), 255, samples);
  } else {
    throw Error("unsupported mask format: " + path.string());
  }
}

void save_probability_map(const ProbabilityMap& prob, const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(static_cast<std::size_t>(prob.width()) * prob.height());
  for (int r = 0; r < prob.height(); ++r) {
    for (int c = 0; c < prob.width(); ++c) {
      samples[static_cast<std::size_t>(r) * prob.width() + c] =
          static_cast<std::uint16_t>(prob(r, c) * 65535.0 + 0.5);
    }
  }
  if (has_extension(path, ".png")) {
    encode_png_gray(path, prob.width(), prob.height(), 16, samples);
  } else if (has_extension(path, ".pgm")) {
    encode_pgm(path, prob.width(), prob.height(), 65535, samples);
  } else {
    throw Error("unsupported probability map format: " + path.string());
  }
}

void save_stratum_png(const StratumLabels& labels, const std::filesystem::path& path) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialization failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG write failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, labels.width(), labels.height(), 8, PNG_COLOR_TYPE_PALETTE,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_color palette[4] = {{0, 0, 0}, {255, 0, 0}, {0, 255, 0}, {0, 0, 255}};
  png_set_PLTE(png, info, palette, 4);
  png_write_info(png, info);

  int w = labels.width();
  int h = labels.height();
  data.resize(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      data[static_cast<std::size_t>(r) * w + c] = labels.plane()(r, c);
    }
  }
  row_ptrs.resize(h);
  for (int r = 0; r < h; ++r) row_ptrs[r] = data.data() + static_cast<std::size_t>(r) * w;
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace vaudit
