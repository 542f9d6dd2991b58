#ifndef NSD_IMAGE_HPP
#define NSD_IMAGE_HPP

#include <string>
#include <vector>

#include "nsd/grid.hpp"

namespace nsd {

enum class ColorSpace { gray, rgb };

// 1 (gray) or 3 (rgb) planes sharing one shape, nominal range [0,1].
// Intermediate results may exceed the range; file I/O clamps.
struct Image {
  std::vector<Grid2D> planes;
  ColorSpace color_space = ColorSpace::gray;

  explicit Image(std::vector<Grid2D> p);
  std::size_t rows() const { return planes.front().rows(); }
  std::size_t cols() const { return planes.front().cols(); }
};

// Binary PGM (P5) and PPM (P6), 8-bit only. Load maps bytes to v/255;
// save writes round(255 * clamp(v, 0, 1)).
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

// BT.601 luma for rgb; the single plane for gray.
Grid2D luminance(const Image& img);

Image clamp_image(const Image& img);

// Central crop dropping `margin` pixels from every side.
Image crop_border(const Image& img, std::size_t margin);

}  // namespace nsd

#endif  // NSD_IMAGE_HPP
