#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabletop/geometry.hpp"

namespace tabletop {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

// Row-major 8-bit RGB raster.
class Image {
 public:
  Image() = default;
  Image(int w, int h, Rgb fill = {0, 0, 0});

  int width() const { return w_; }
  int height() const { return h_; }
  bool empty() const { return w_ == 0 || h_ == 0; }

  Rgb get(int x, int y) const {
    const std::uint8_t* p = &data_[idx(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    std::uint8_t* p = &data_[idx(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  const std::vector<std::uint8_t>& bytes() const { return data_; }
  std::vector<std::uint8_t>& bytes() { return data_; }

  Image crop(const Box& b) const;
  // Bilinear resample to the requested extent; exact copy when sizes match.
  Image resample(int new_w, int new_h) const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t idx(int x, int y) const { return (static_cast<std::size_t>(y) * w_ + x) * 3; }

  int w_ = 0;
  int h_ = 0;
  std::vector<std::uint8_t> data_;
};

// Binary coverage raster anchored to an owning box (mask dims == box dims).
struct Mask {
  Box box;
  std::vector<std::uint8_t> bits;  // 0 or 1, row-major, box.w * box.h

  Mask() = default;
  explicit Mask(const Box& b) : box(b), bits(static_cast<std::size_t>(b.w) * b.h, 0) {}

  bool at(int local_x, int local_y) const {
    return bits[static_cast<std::size_t>(local_y) * box.w + local_x] != 0;
  }
  void set(int local_x, int local_y, bool v) {
    bits[static_cast<std::size_t>(local_y) * box.w + local_x] = v ? 1 : 0;
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  // Nearest-neighbor resample into a destination box.
  Mask resample_to(const Box& dst) const;

  bool operator==(const Mask&) const = default;
};

double mask_iou(const Mask& a, const Mask& b);

// Lossless raster I/O: binary PPM (P6) for RGB, binary PGM (P5) for masks.
void write_ppm(const Image& img, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);
void write_pgm(const Mask& mask, const std::filesystem::path& path);
Mask read_pgm(const std::filesystem::path& path, const Box& owning_box);

// FNV-1a 64-bit content hash, hex-encoded. Used for manifest integrity and
// determinism checks.
std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fnv1a_hex(const std::vector<std::uint8_t>& data);
std::string fnv1a_hex(const std::string& data);
std::string hash_file(const std::filesystem::path& path);

}  // namespace tabletop
