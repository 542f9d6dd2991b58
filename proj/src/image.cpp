#include "nsd/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "nsd/errors.hpp"

namespace nsd {

namespace {

constexpr std::size_t kMaxDim = 65535;

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_token(const std::string& buf, std::size_t& off) {
  while (off < buf.size()) {
    const char c = buf[off];
    if (c == '#') {
      while (off < buf.size() && buf[off] != '\n') ++off;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++off;
    } else {
      break;
    }
  }
  const std::size_t start = off;
  while (off < buf.size() && !std::isspace(static_cast<unsigned char>(buf[off])))
    ++off;
  if (start == off) throw FormatError("image header ended unexpectedly");
  return buf.substr(start, off - start);
}

std::size_t parse_header_number(const std::string& buf, std::size_t& off,
                                const char* what) {
  const std::string tok = next_token(buf, off);
  std::size_t value = 0;
  for (char c : tok) {
    if (c < '0' || c > '9')
      throw FormatError(std::string("bad ") + what + " in image header");
    value = value * 10 + static_cast<std::size_t>(c - '0');
    if (value > 10 * kMaxDim)
      throw FormatError(std::string("bad ") + what + " in image header");
  }
  return value;
}

}  // namespace

Image::Image(std::vector<Grid2D> p) : planes(std::move(p)) {
  if (planes.size() != 1 && planes.size() != 3)
    throw ContractError("image needs 1 or 3 planes");
  for (const Grid2D& g : planes)
    if (g.rows() != planes.front().rows() || g.cols() != planes.front().cols())
      throw ContractError("image planes must share dims");
  color_space = planes.size() == 1 ? ColorSpace::gray : ColorSpace::rgb;
}

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  std::size_t off = 0;
  const std::string magic = next_token(buf, off);
  std::size_t channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else if (magic == "P2" || magic == "P3" || magic == "P1" || magic == "P4") {
    throw FormatError("unsupported image format: " + magic +
                      " (binary P5/P6 only)");
  } else {
    throw FormatError("unsupported image format");
  }
  const std::size_t cols = parse_header_number(buf, off, "width");
  const std::size_t rows = parse_header_number(buf, off, "height");
  const std::size_t maxval = parse_header_number(buf, off, "maxval");
  if (cols == 0 || rows == 0 || cols > kMaxDim || rows > kMaxDim)
    throw FormatError("image dimensions out of range");
  if (maxval != 255)
    throw FormatError("unsupported bit depth: maxval " +
                      std::to_string(maxval) + " (8-bit only)");
  if (off >= buf.size()) throw FormatError("truncated pixel data");
  ++off;  // the single whitespace byte after maxval
  const std::size_t need = rows * cols * channels;
  if (buf.size() - off < need) throw FormatError("truncated pixel data");

  std::vector<Grid2D> planes(channels, Grid2D(rows, cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const auto byte = static_cast<unsigned char>(buf[off++]);
        planes[ch](i, j) = static_cast<double>(byte) / 255.0;
      }
  return Image(std::move(planes));
}

void save_image(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const bool rgb = img.color_space == ColorSpace::rgb;
  out << (rgb ? "P6" : "P5") << "\n"
      << img.cols() << " " << img.rows() << "\n255\n";
  std::string data;
  data.reserve(img.rows() * img.cols() * img.planes.size());
  for (std::size_t i = 0; i < img.rows(); ++i)
    for (std::size_t j = 0; j < img.cols(); ++j)
      for (const Grid2D& plane : img.planes) {
        const double v = std::clamp(plane(i, j), 0.0, 1.0);
        data.push_back(static_cast<char>(
            static_cast<unsigned char>(std::llround(255.0 * v))));
      }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write: " + path);
}

Grid2D luminance(const Image& img) {
  if (img.color_space == ColorSpace::gray) return img.planes.front();
  Grid2D out(img.rows(), img.cols());
  const Grid2D& r = img.planes[0];
  const Grid2D& g = img.planes[1];
  const Grid2D& b = img.planes[2];
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = 0.299 * r(i, j) + 0.587 * g(i, j) + 0.114 * b(i, j);
  return out;
}

Image clamp_image(const Image& img) {
  std::vector<Grid2D> planes;
  planes.reserve(img.planes.size());
  for (const Grid2D& p : img.planes) {
    Grid2D q(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j)
        q(i, j) = std::clamp(p(i, j), 0.0, 1.0);
    planes.push_back(std::move(q));
  }
  return Image(std::move(planes));
}

Image crop_border(const Image& img, std::size_t margin) {
  if (img.rows() <= 2 * margin || img.cols() <= 2 * margin)
    throw ContractError("crop margin leaves no pixels");
  std::vector<Grid2D> planes;
  planes.reserve(img.planes.size());
  for (const Grid2D& p : img.planes) {
    Grid2D q(img.rows() - 2 * margin, img.cols() - 2 * margin);
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (std::size_t j = 0; j < q.cols(); ++j)
        q(i, j) = p(i + margin, j + margin);
    planes.push_back(std::move(q));
  }
  return Image(std::move(planes));
}

}  // namespace nsd
