#include "nsd/restore.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "nsd/errors.hpp"

namespace nsd {

namespace {

constexpr double kSingularFloor = 1e-12;

void require_kernel_fits(const Image& img, std::size_t krows,
                         std::size_t kcols, const char* what) {
  if (img.rows() < krows || img.cols() < kcols)
    throw ContractError(std::string("image smaller than the ") + what);
}

Image map_planes(const Image& img, const auto& fn) {
  std::vector<Grid2D> planes;
  planes.reserve(img.planes.size());
  for (const Grid2D& p : img.planes) planes.push_back(fn(p));
  return Image(std::move(planes));
}

}  // namespace

Image deblur_with_drk(const Image& img, const Drk& drk, PadMode pad) {
  if (drk.rows() % 2 == 0 || drk.cols() % 2 == 0)
    throw ContractError("restoration kernel dims must be odd");
  require_kernel_fits(img, drk.rows(), drk.cols(), "restoration kernel");
  Image out = map_planes(
      img, [&](const Grid2D& p) { return conv2d_same(p, drk, pad); });
  return clamp_image(out);
}

Image deblur_with_model(const Image& img, const Lcnn& model, PadMode pad) {
  const std::size_t radius = model.depth();
  require_kernel_fits(img, model.drk_size(), model.drk_size(),
                      "restoration kernel");
  Image out = map_planes(img, [&](const Grid2D& p) {
    const Grid2D ext = pad_extend(p, radius, pad);
    const Grid2D y = model.forward(ext);
    Grid2D cropped(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j)
        cropped(i, j) = y(i + radius, j + radius);
    return cropped;
  });
  return clamp_image(out);
}

Image super_resolve(const Image& img, double scale, const Drk& drk,
                    PadMode pad) {
  Image up = map_planes(
      img, [&](const Grid2D& p) { return bicubic_resize(p, scale); });
  return deblur_with_drk(up, drk, pad);
}

Image super_resolve(const Image& img, double scale, const Lcnn& model,
                    PadMode pad) {
  Image up = map_planes(
      img, [&](const Grid2D& p) { return bicubic_resize(p, scale); });
  return deblur_with_model(up, model, pad);
}

Image wiener_deconvolve(const Image& img, const Kernel& k, double nsr) {
  if (nsr < 0.0) throw ContractError("noise-to-signal ratio must be >= 0");
  validate_kernel(k);
  require_kernel_fits(img, k.grid.rows(), k.grid.cols(), "kernel");
  const std::size_t rows = img.rows(), cols = img.cols();
  const std::size_t big_r = rows + k.grid.rows() - 1;
  const std::size_t big_c = cols + k.grid.cols() - 1;

  // Kernel embedded top-left, then rotated so its center sits at (0,0);
  // on the padded circular grid this is the matching transfer function.
  Grid2D kp(big_r, big_c);
  for (std::size_t i = 0; i < k.grid.rows(); ++i)
    for (std::size_t j = 0; j < k.grid.cols(); ++j) kp(i, j) = k.grid(i, j);
  kp = circular_shift_to_origin(kp, (k.grid.rows() - 1) / 2,
                                (k.grid.cols() - 1) / 2);
  const ComplexGrid2D khat = dft2d(kp, big_r, big_c);

  if (nsr == 0.0) {
    for (std::size_t i = 0; i < khat.size(); ++i)
      if (std::abs(khat.data()[i]) < kSingularFloor)
        throw NumericError(
            "singular kernel spectrum: exact inversion needs nsr > 0");
  }

  Image out = map_planes(img, [&](const Grid2D& p) {
    const ComplexGrid2D phat = dft2d(p, big_r, big_c);
    ComplexGrid2D yhat(big_r, big_c);
    for (std::size_t i = 0; i < yhat.size(); ++i) {
      const std::complex<double> kh = khat.data()[i];
      const double denom = std::norm(kh) + nsr;
      yhat.data()[i] = phat.data()[i] * std::conj(kh) / denom;
    }
    const ComplexGrid2D y = idft2d(yhat);
    Grid2D res(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) res(i, j) = y(i, j).real();
    return res;
  });
  return clamp_image(out);
}

}  // namespace nsd
