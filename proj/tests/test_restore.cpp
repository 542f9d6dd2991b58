#include <cmath>

#include "doctest.h"
#include "nsd/errors.hpp"
#include "nsd/gallery.hpp"
#include "nsd/metrics.hpp"
#include "nsd/restore.hpp"
#include "nsd/signal.hpp"
#include "support.hpp"

using namespace nsd;
using testutil::make_test_image;
using testutil::max_abs_diff;
using testutil::read_file;
using testutil::TempDir;
using testutil::write_file;

namespace {

Image blur_image(const Image& img, const Kernel& k) {
  std::vector<Grid2D> planes;
  for (const Grid2D& p : img.planes)
    planes.push_back(conv2d_same(p, k.grid, PadMode::reflect));
  return Image(std::move(planes));
}

}  // namespace

TEST_SUITE("restore") {

TEST_CASE("load_image: known-byte P5 and P6 files decode exactly") {
  TempDir dir;
  write_file(dir.file("g.pgm"),
             std::string("P5\n2 2\n255\n") +
                 std::string({'\x00', '\x80', '\xff', '\x40'}));
  Image g = load_image(dir.file("g.pgm"));
  CHECK(g.color_space == ColorSpace::gray);
  REQUIRE(g.planes.size() == 1);
  CHECK(g.planes[0](0, 0) == 0.0);
  CHECK(g.planes[0](0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(g.planes[0](1, 0) == 1.0);
  CHECK(g.planes[0](1, 1) == doctest::Approx(64.0 / 255.0));

  write_file(dir.file("c.ppm"),
             std::string("P6\n# comment line\n2 1\n255\n") +
                 std::string({'\x01', '\x02', '\x03', '\x04', '\x05',
                              '\x06'}));
  Image c = load_image(dir.file("c.ppm"));
  CHECK(c.color_space == ColorSpace::rgb);
  REQUIRE(c.planes.size() == 3);
  CHECK(c.planes[0](0, 0) == doctest::Approx(1.0 / 255.0));
  CHECK(c.planes[1](0, 0) == doctest::Approx(2.0 / 255.0));
  CHECK(c.planes[2](0, 1) == doctest::Approx(6.0 / 255.0));
}

TEST_CASE("load_image: unsupported formats and bad files") {
  TempDir dir;
  write_file(dir.file("a.pgm"), "P2\n2 2\n255\n0 1 2 3\n");
  CHECK_THROWS_AS(load_image(dir.file("a.pgm")), FormatError);
  write_file(dir.file("b.pgm"), "P5\n2 2\n65535\n" + std::string(8, '\0'));
  CHECK_THROWS_AS(load_image(dir.file("b.pgm")), FormatError);
  write_file(dir.file("c.pgm"), "P5\n2 2\n255\n" + std::string(3, '\0'));
  CHECK_THROWS_AS(load_image(dir.file("c.pgm")), FormatError);
  write_file(dir.file("d.pgm"), "garbage");
  CHECK_THROWS_AS(load_image(dir.file("d.pgm")), FormatError);
  CHECK_THROWS_AS(load_image(dir.file("missing.pgm")), IoError);
}

TEST_CASE("save_image: exact bytes, and save(load(x)) is the identity") {
  TempDir dir;
  Grid2D p(1, 2);
  p(0, 0) = 0.0;
  p(0, 1) = 1.0;
  save_image(Image({p}), dir.file("t.pgm"));
  CHECK(read_file(dir.file("t.pgm")) ==
        std::string("P5\n2 1\n255\n") + std::string({'\x00', '\xff'}));

  Image img = make_test_image(3, 32, 32);
  save_image(img, dir.file("x.ppm"));
  const std::string bytes = read_file(dir.file("x.ppm"));
  save_image(load_image(dir.file("x.ppm")), dir.file("y.ppm"));
  CHECK(read_file(dir.file("y.ppm")) == bytes);

  // Quantization bound for arbitrary (non-byte-aligned) values.
  Image q = load_image(dir.file("x.ppm"));
  for (std::size_t ch = 0; ch < 3; ++ch)
    CHECK(max_abs_diff(q.planes[ch], img.planes[ch]) <= 0.5 / 255.0 + 1e-12);
}

TEST_CASE("luminance and crop_border behave as documented") {
  Grid2D r(2, 2), g(2, 2), b(2, 2);
  r(0, 0) = 1.0;
  g(0, 0) = 0.5;
  b(0, 0) = 0.25;
  Image rgb({r, g, b});
  CHECK(luminance(rgb)(0, 0) ==
        doctest::Approx(0.299 * 1.0 + 0.587 * 0.5 + 0.114 * 0.25));

  Image img = make_test_image(4, 128, 128);
  Image cropped = crop_border(img, 13);
  CHECK(cropped.rows() == 102);
  CHECK(cropped.cols() == 102);
  CHECK(cropped.planes[1](0, 0) == img.planes[1](13, 13));
  CHECK_THROWS_AS(crop_border(img, 64), ContractError);
}

TEST_CASE("deblur_with_drk: delta kernel is the identity, dims preserved") {
  Image img = make_test_image(5, 40, 40);
  Drk delta = make_impulse(11, 11, ImpulsePlacement::center);
  Image out = deblur_with_drk(img, delta, PadMode::reflect);
  CHECK(out.rows() == 40);
  for (std::size_t ch = 0; ch < 3; ++ch)
    CHECK(max_abs_diff(out.planes[ch], img.planes[ch]) == 0.0);

  Grid2D tiny(5, 5);
  CHECK_THROWS_AS(deblur_with_drk(Image({tiny}), delta, PadMode::reflect),
                  ContractError);
}

TEST_CASE("deblur_with_model matches deblur_with_drk in both pad modes") {
  Rng rng(6);
  Lcnn model = Lcnn::init_model(rng, Lcnn::default_channels(),
                                InitScheme::near_identity, 1e-2);
  Drk drk = model.extract_drk();
  Image img = make_test_image(7, 48, 40);
  for (PadMode pad : {PadMode::reflect, PadMode::zero}) {
    Image via_model = deblur_with_model(img, model, pad);
    Image via_drk = deblur_with_drk(img, drk, pad);
    for (std::size_t ch = 0; ch < 3; ++ch)
      CHECK(max_abs_diff(via_model.planes[ch], via_drk.planes[ch]) <= 1e-8);
  }
}

TEST_CASE("deblur_with_model: near-identity model is the identity map") {
  Rng rng(8);
  Lcnn model = Lcnn::init_model(rng, Lcnn::default_channels(),
                                InitScheme::near_identity, 0.0);
  Image img = make_test_image(9, 32, 32);
  Image out = deblur_with_model(img, model, PadMode::reflect);
  for (std::size_t ch = 0; ch < 3; ++ch)
    CHECK(max_abs_diff(out.planes[ch], img.planes[ch]) == 0.0);

  // Gray input goes through the single-plane path.
  Image gray({img.planes[0]});
  Image gout = deblur_with_model(gray, model, PadMode::reflect);
  CHECK(gout.planes.size() == 1);
  CHECK(max_abs_diff(gout.planes[0], gray.planes[0]) == 0.0);
}

TEST_CASE("super_resolve: delta restorer reduces to plain bicubic") {
  Image img = make_test_image(10, 24, 24);
  Drk delta = make_impulse(11, 11, ImpulsePlacement::center);
  Image sr = super_resolve(img, 2.0, delta);
  CHECK(sr.rows() == 48);
  CHECK(sr.cols() == 48);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    Grid2D plain = bicubic_resize(img.planes[ch], 2.0);
    // Output is clamped to [0,1]; mirror that on the oracle.
    for (double& v : plain.data()) v = std::clamp(v, 0.0, 1.0);
    CHECK(max_abs_diff(sr.planes[ch], plain) == 0.0);
  }
}

TEST_CASE("wiener_deconvolve: delta kernel, identity map") {
  Image img = make_test_image(11, 30, 30);
  Kernel delta{make_impulse(11, 11, ImpulsePlacement::center), std::nullopt};
  Image out = wiener_deconvolve(img, delta, 0.0);
  for (std::size_t ch = 0; ch < 3; ++ch)
    CHECK(max_abs_diff(out.planes[ch], img.planes[ch]) <= 1e-10);
}

TEST_CASE("wiener_deconvolve: noiseless narrow blur inverts to >= 40 dB") {
  Image sharp = make_test_image(12, 96, 96);
  Kernel k = render_gaussian_kernel({0.5, 0.5, 0.0, 11});
  Image blurred = blur_image(sharp, k);
  Image recovered = wiener_deconvolve(blurred, k, 0.0);
  const double db = psnr(crop_border(recovered, 13), crop_border(sharp, 13));
  CHECK(db >= 40.0);
}

TEST_CASE("wiener_deconvolve: kernel mismatch costs fidelity") {
  Image sharp = make_test_image(13, 80, 80);
  Kernel truth = render_gaussian_kernel({1.0, 1.0, 0.0, 11});
  Kernel wrong = render_gaussian_kernel({2.0, 2.0, 0.0, 11});
  Image blurred = blur_image(sharp, truth);
  const double matched =
      psnr(crop_border(wiener_deconvolve(blurred, truth, 1e-3), 13),
           crop_border(sharp, 13));
  const double mismatched =
      psnr(crop_border(wiener_deconvolve(blurred, wrong, 1e-3), 13),
           crop_border(sharp, 13));
  CHECK(matched > mismatched);
}

TEST_CASE("wiener_deconvolve: exact inversion needs a nonzero spectrum") {
  // Four corner taps at radius 1: the padded spectrum is
  // cos(2 pi p / P) cos(2 pi q / Q), which hits zero when P = 64.
  Grid2D g(3, 3);
  g(0, 0) = g(0, 2) = g(2, 0) = g(2, 2) = 0.25;
  Kernel k{g, std::nullopt};
  Image img = make_test_image(14, 62, 62);
  CHECK_THROWS_AS(wiener_deconvolve(img, k, 0.0), NumericError);
  CHECK_NOTHROW(wiener_deconvolve(img, k, 1e-3));
  CHECK_THROWS_AS(wiener_deconvolve(img, k, -1e-3), ContractError);
}

TEST_CASE("restoration output always lands in [0,1]") {
  Rng rng(15);
  Lcnn model = Lcnn::init_model(rng, Lcnn::default_channels(),
                                InitScheme::scaled_normal);
  Image img = make_test_image(16, 32, 32);
  for (const Image& out :
       {deblur_with_model(img, model, PadMode::reflect),
        deblur_with_drk(img, model.extract_drk(), PadMode::zero)}) {
    for (const Grid2D& p : out.planes)
      for (double v : p.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
  }
}

}  // TEST_SUITE
