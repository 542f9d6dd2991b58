#include <cmath>

#include "doctest.h"
#include "nsd/errors.hpp"
#include "nsd/metrics.hpp"
#include "support.hpp"

using namespace nsd;
using testutil::make_test_image;

namespace {

// b = a + amp * checkerboard: zero-mean, exactly computable MSE.
Image perturb_checker(const Image& a, double amp) {
  std::vector<Grid2D> planes;
  for (const Grid2D& p : a.planes) {
    Grid2D q = p;
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (std::size_t j = 0; j < q.cols(); ++j)
        q(i, j) += ((i + j) % 2 == 0) ? amp : -amp;
    planes.push_back(std::move(q));
  }
  return Image(std::move(planes));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr: identical images hit the documented cap") {
  Image a = make_test_image(1, 32, 32);
  CHECK(psnr(a, a) == 100.0);
}

TEST_CASE("psnr: closed-form value at MSE 0.01") {
  Grid2D x(16, 16), y(16, 16);
  for (double& v : x.data()) v = 0.4;
  for (double& v : y.data()) v = 0.5;
  CHECK(psnr(Image({x}), Image({y})) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("psnr: matches a direct per-pixel oracle across channels") {
  Image a = make_test_image(2, 24, 24);
  Image b = perturb_checker(a, 0.03);
  double mse = 0.0;
  std::size_t n = 0;
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < a.planes[ch].size(); ++i) {
      const double d = a.planes[ch].data()[i] - b.planes[ch].data()[i];
      mse += d * d;
      ++n;
    }
  mse /= static_cast<double>(n);
  const double want = 10.0 * std::log10(1.0 / mse);
  CHECK(std::fabs(psnr(a, b) - want) <= 1e-10);
}

TEST_CASE("psnr: strictly decreasing in the perturbation amplitude") {
  Image a = make_test_image(3, 32, 32);
  const double p1 = psnr(a, perturb_checker(a, 0.01));
  const double p2 = psnr(a, perturb_checker(a, 0.05));
  const double p3 = psnr(a, perturb_checker(a, 0.10));
  CHECK(p1 > p2);
  CHECK(p2 > p3);
}

TEST_CASE("psnr: contract violations") {
  Image a = make_test_image(4, 16, 16);
  Image b = make_test_image(4, 16, 17);
  CHECK_THROWS_AS(psnr(a, b), ContractError);
  CHECK_THROWS_AS(psnr(a, a, 0.0), ContractError);
}

TEST_CASE("ssim: self-similarity is exactly one") {
  Image a = make_test_image(5, 40, 40);
  CHECK(ssim(a, a) == 1.0);
}

TEST_CASE("ssim: a constant offset costs less than structure loss") {
  Image a = make_test_image(6, 40, 40);
  // Keep the shifted copy inside [0,1] so nothing clips.
  std::vector<Grid2D> planes;
  for (const Grid2D& p : a.planes) {
    Grid2D q = p;
    for (double& v : q.data()) v = v * 0.8 + 0.1;
    planes.push_back(std::move(q));
  }
  Image b(std::move(planes));
  const double s = ssim(a, b);
  CHECK(s < 1.0);
  CHECK(s > 0.0);
}

TEST_CASE("ssim: symmetric in its arguments") {
  Image a = make_test_image(7, 32, 32);
  Image b = make_test_image(8, 32, 32);
  CHECK(std::fabs(ssim(a, b) - ssim(b, a)) <= 1e-12);
}

TEST_CASE("ssim: translation sensitivity") {
  Image a = make_test_image(9, 48, 48);
  std::vector<Grid2D> sa, sb;
  for (const Grid2D& p : a.planes) {
    Grid2D left(48, 47), right(48, 47);
    for (std::size_t i = 0; i < 48; ++i)
      for (std::size_t j = 0; j < 47; ++j) {
        left(i, j) = p(i, j);
        right(i, j) = p(i, j + 1);
      }
    sa.push_back(std::move(left));
    sb.push_back(std::move(right));
  }
  CHECK(ssim(Image(std::move(sa)), Image(std::move(sb))) < 1.0);
}

TEST_CASE("ssim: window contract") {
  Image small({Grid2D(10, 10)});
  CHECK_THROWS_AS(ssim(small, small), ContractError);
  Image a = make_test_image(10, 16, 16);
  Image b = make_test_image(10, 16, 17);
  CHECK_THROWS_AS(ssim(a, b), ContractError);
}

}  // TEST_SUITE
