#include "nsd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsd/errors.hpp"

namespace nsd {

namespace {

constexpr double kPsnrCap = 100.0;
constexpr std::size_t kWindow = 11;

void require_same_shape(const Image& a, const Image& b) {
  if (a.planes.size() != b.planes.size())
    throw ContractError("images have different channel counts");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ContractError("images have different dims");
}

// 11x11 Gaussian window, sigma 1.5, normalized to unit sum.
std::vector<double> ssim_window() {
  std::vector<double> w(kWindow * kWindow);
  const double sigma = 1.5;
  const double c = (static_cast<double>(kWindow) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i)
    for (std::size_t j = 0; j < kWindow; ++j) {
      const double dy = static_cast<double>(i) - c;
      const double dx = static_cast<double>(j) - c;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      w[i * kWindow + j] = v;
      sum += v;
    }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same_shape(a, b);
  if (!(peak > 0.0)) throw ContractError("psnr peak must be positive");
  double sq = 0.0;
  for (std::size_t ch = 0; ch < a.planes.size(); ++ch) {
    const Grid2D& pa = a.planes[ch];
    const Grid2D& pb = b.planes[ch];
    for (std::size_t i = 0; i < pa.rows(); ++i)
      for (std::size_t j = 0; j < pa.cols(); ++j) {
        const double d = pa(i, j) - pb(i, j);
        sq += d * d;
      }
  }
  const double mse = sq / (static_cast<double>(a.planes.size()) *
                           static_cast<double>(a.rows()) *
                           static_cast<double>(a.cols()));
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (a.rows() < kWindow || a.cols() < kWindow)
    throw ContractError("image smaller than the ssim window");
  const Grid2D la = luminance(a);
  const Grid2D lb = luminance(b);
  static const std::vector<double> w = ssim_window();
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  const std::size_t nr = la.rows() - kWindow + 1;
  const std::size_t nc = la.cols() - kWindow + 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
      for (std::size_t u = 0; u < kWindow; ++u)
        for (std::size_t v = 0; v < kWindow; ++v) {
          const double wv = w[u * kWindow + v];
          const double x = la(i + u, j + v);
          const double y = lb(i + u, j + v);
          mx += wv * x;
          my += wv * y;
          xx += wv * x * x;
          yy += wv * y * y;
          xy += wv * x * y;
        }
      const double vx = xx - mx * mx;
      const double vy = yy - my * my;
      const double cxy = xy - mx * my;
      acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return acc / (static_cast<double>(nr) * static_cast<double>(nc));
}

}  // namespace nsd
