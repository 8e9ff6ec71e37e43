#include "tabletop/image.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tabletop/errors.hpp"

namespace tabletop {

Image::Image(int w, int h, Rgb fill) : w_(w), h_(h), data_(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i + 2 < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Image Image::crop(const Box& b) const {
  Image out(b.w, b.h);
  for (int y = 0; y < b.h; ++y) {
    for (int x = 0; x < b.w; ++x) {
      int sx = std::clamp(b.x + x, 0, w_ - 1);
      int sy = std::clamp(b.y + y, 0, h_ - 1);
      out.set(x, y, get(sx, sy));
    }
  }
  return out;
}

Image Image::resample(int new_w, int new_h) const {
  if (new_w == w_ && new_h == h_) return *this;
  Image out(new_w, new_h);
  for (int y = 0; y < new_h; ++y) {
    double sy = (y + 0.5) * h_ / new_h - 0.5;
    int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, h_ - 1);
    int y1 = std::min(y0 + 1, h_ - 1);
    double fy = std::clamp(sy - y0, 0.0, 1.0);
    for (int x = 0; x < new_w; ++x) {
      double sx = (x + 0.5) * w_ / new_w - 0.5;
      int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, w_ - 1);
      int x1 = std::min(x0 + 1, w_ - 1);
      double fx = std::clamp(sx - x0, 0.0, 1.0);
      Rgb c00 = get(x0, y0), c10 = get(x1, y0), c01 = get(x0, y1), c11 = get(x1, y1);
      auto lerp = [&](std::uint8_t a00, std::uint8_t a10, std::uint8_t a01, std::uint8_t a11) {
        double top = a00 + (a10 - a00) * fx;
        double bot = a01 + (a11 - a01) * fx;
        double v = top + (bot - top) * fy;
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      };
      out.set(x, y, {lerp(c00.r, c10.r, c01.r, c11.r), lerp(c00.g, c10.g, c01.g, c11.g),
                     lerp(c00.b, c10.b, c01.b, c11.b)});
    }
  }
  return out;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::accumulate(bits.begin(), bits.end(), 0LL));
}

Mask Mask::resample_to(const Box& dst) const {
  if (dst.w <= 0 || dst.h <= 0) {
    throw Error(ErrorCategory::DegenerateBox, "mask resample destination has zero extent");
  }
  Mask out(dst);
  if (dst.w == box.w && dst.h == box.h) {
    out.bits = bits;
    return out;
  }
  for (int y = 0; y < dst.h; ++y) {
    int sy = std::min(box.h - 1, static_cast<int>((y + 0.5) * box.h / dst.h));
    for (int x = 0; x < dst.w; ++x) {
      int sx = std::min(box.w - 1, static_cast<int>((x + 0.5) * box.w / dst.w));
      out.set(x, y, at(sx, sy));
    }
  }
  return out;
}

double mask_iou(const Mask& a, const Mask& b) {
  // Masks live in frame coordinates via their owning boxes.
  int x0 = std::min(a.box.left(), b.box.left());
  int x1 = std::max(a.box.right(), b.box.right());
  int y0 = std::min(a.box.top(), b.box.top());
  int y1 = std::max(a.box.bottom(), b.box.bottom());
  long long inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      bool in_a = a.box.contains(x, y) && a.at(x - a.box.x, y - a.box.y);
      bool in_b = b.box.contains(x, y) && b.at(x - b.box.x, y - b.box.y);
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void write_ppm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::IoError, "cannot open for write: " + path.string());
  out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.bytes().data()),
            static_cast<std::streamsize>(img.bytes().size()));
  if (!out) throw Error(ErrorCategory::IoError, "write failed: " + path.string());
}

namespace {

void read_pnm_header(std::ifstream& in, const std::string& magic, int& w, int& h,
                     const std::filesystem::path& path) {
  std::string tag;
  in >> tag;
  if (tag != magic) throw Error(ErrorCategory::IoError, "bad raster magic in " + path.string());
  int maxval = 0;
  in >> w >> h >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval != 255) {
    throw Error(ErrorCategory::IoError, "bad raster header in " + path.string());
  }
  in.get();  // single whitespace after header
}

}  // namespace

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::IoError, "cannot open: " + path.string());
  int w = 0, h = 0;
  read_pnm_header(in, "P6", w, h, path);
  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.bytes().data()),
          static_cast<std::streamsize>(img.bytes().size()));
  if (in.gcount() != static_cast<std::streamsize>(img.bytes().size())) {
    throw Error(ErrorCategory::IoError, "truncated raster: " + path.string());
  }
  return img;
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::IoError, "cannot open for write: " + path.string());
  out << "P5\n" << mask.box.w << " " << mask.box.h << "\n255\n";
  std::vector<std::uint8_t> bytes(mask.bits.size());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) bytes[i] = mask.bits[i] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCategory::IoError, "write failed: " + path.string());
}

Mask read_pgm(const std::filesystem::path& path, const Box& owning_box) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::IoError, "cannot open: " + path.string());
  int w = 0, h = 0;
  read_pnm_header(in, "P5", w, h, path);
  if (w != owning_box.w || h != owning_box.h) {
    throw Error(ErrorCategory::MaskMismatch, "mask dims do not match owning box: " + path.string());
  }
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCategory::IoError, "truncated raster: " + path.string());
  }
  Mask mask(owning_box);
  for (std::size_t i = 0; i < bytes.size(); ++i) mask.bits[i] = bytes[i] >= 128 ? 1 : 0;
  return mask;
}

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {
std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}
}  // namespace

std::string fnv1a_hex(const std::vector<std::uint8_t>& data) {
  return to_hex(fnv1a(data.data(), data.size()));
}

std::string fnv1a_hex(const std::string& data) {
  return to_hex(fnv1a(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::MissingAsset, "missing file: " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(data);
}

}  // namespace tabletop
