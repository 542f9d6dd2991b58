#include "nsd/gallery.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nsd/errors.hpp"
#include "nsd/grid_io.hpp"

namespace nsd {

namespace {

constexpr double kSumTol = 1e-9;

}  // namespace

void validate_kernel(const Kernel& k) {
  if (k.grid.rows() != k.grid.cols())
    throw ContractError("kernel must be square");
  if (k.grid.rows() % 2 == 0) throw ContractError("kernel size must be odd");
  for (std::size_t i = 0; i < k.grid.rows(); ++i)
    for (std::size_t j = 0; j < k.grid.cols(); ++j)
      if (k.grid(i, j) < 0.0)
        throw ContractError("kernel entries must be non-negative");
  if (std::fabs(k.grid.sum() - 1.0) > kSumTol)
    throw ContractError("kernel must sum to 1");
}

GaussianKernelSpec sample_spec(Rng& rng, std::size_t size, double lo,
                               double hi) {
  if (size == 0 || size % 2 == 0)
    throw ContractError("kernel size must be odd and positive");
  if (lo <= 0.0) throw ContractError("sigma range must be positive");
  if (hi < lo) throw ContractError("sigma range is inverted");
  GaussianKernelSpec spec;
  spec.sigma1 = rng.uniform(lo, hi);
  spec.sigma2 = rng.uniform(lo, hi);
  spec.theta = rng.uniform(0.0, std::numbers::pi);
  spec.size = size;
  return spec;
}

Kernel render_gaussian_kernel(const GaussianKernelSpec& spec) {
  if (spec.size == 0 || spec.size % 2 == 0)
    throw ContractError("kernel size must be odd and positive");
  if (spec.sigma1 <= 0.0 || spec.sigma2 <= 0.0)
    throw ContractError("sigma must be positive");
  const double c = std::cos(spec.theta);
  const double s = std::sin(spec.theta);
  // Inverse covariance of R(theta) diag(s1^2, s2^2) R(theta)^T.
  const double i1 = 1.0 / (spec.sigma1 * spec.sigma1);
  const double i2 = 1.0 / (spec.sigma2 * spec.sigma2);
  const double a = c * c * i1 + s * s * i2;
  const double b = s * c * (i1 - i2);
  const double d = s * s * i1 + c * c * i2;
  const std::size_t n = spec.size;
  const double ctr = (static_cast<double>(n) - 1.0) / 2.0;
  Grid2D g(n, n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // v = (row offset, col offset) from the kernel center.
      const double y = static_cast<double>(i) - ctr;
      const double x = static_cast<double>(j) - ctr;
      const double q = a * y * y + 2.0 * b * x * y + d * x * x;
      const double val = std::exp(-0.5 * q);
      g(i, j) = val;
      sum += val;
    }
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericError("gaussian kernel mass is degenerate");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) /= sum;
  return Kernel{std::move(g), spec};
}

Kernel perturb_multiplicative(const Kernel& k, Rng& rng, double amplitude) {
  if (amplitude < 0.0 || amplitude >= 1.0)
    throw ContractError("noise amplitude must be in [0, 1)");
  if (amplitude == 0.0) return k;
  Grid2D g = k.grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const double u = rng.uniform(-amplitude, amplitude);
      double v = g(i, j) * (1.0 + u);
      if (v < 0.0) v = 0.0;
      g(i, j) = v;
      sum += v;
    }
  }
  if (!(sum > 0.0))
    throw NumericError("perturbed kernel lost all mass");
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) /= sum;
  return Kernel{std::move(g), k.spec};
}

RkgDataset generate_rkg(std::size_t count, std::size_t size, double sigma_lo,
                        double sigma_hi, double noise_amplitude,
                        std::uint64_t seed) {
  if (count == 0) throw ContractError("kernel count must be positive");
  RkgDataset ds;
  ds.seed = seed;
  ds.noise_amplitude = noise_amplitude;
  ds.kernels.reserve(count);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    GaussianKernelSpec spec = sample_spec(rng, size, sigma_lo, sigma_hi);
    Kernel k = render_gaussian_kernel(spec);
    ds.kernels.push_back(perturb_multiplicative(k, rng, noise_amplitude));
  }
  return ds;
}

void save_rkg(const RkgDataset& ds, const std::string& path) {
  if (ds.kernels.empty()) throw ContractError("cannot save an empty gallery");
  const std::size_t size = ds.kernel_size();
  for (const Kernel& k : ds.kernels) {
    if (k.grid.rows() != size || k.grid.cols() != size)
      throw ContractError("gallery kernels must share one size");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  wire::put_magic(os, "RKG1");
  wire::put_u32(os, static_cast<std::uint32_t>(ds.kernels.size()));
  wire::put_u32(os, static_cast<std::uint32_t>(size));
  wire::put_f64(os, ds.noise_amplitude);
  wire::put_u64(os, ds.seed);
  for (const Kernel& k : ds.kernels)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) wire::put_f64(os, k.grid(i, j));
  for (const Kernel& k : ds.kernels) {
    if (k.spec) {
      os.put('\x01');
      wire::put_f64(os, k.spec->sigma1);
      wire::put_f64(os, k.spec->sigma2);
      wire::put_f64(os, k.spec->theta);
    } else {
      os.put('\x00');
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

RkgDataset load_rkg(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  wire::check_magic(is, "RKG1", path.c_str());
  const std::uint32_t count = wire::get_u32(is);
  const std::uint32_t size = wire::get_u32(is);
  if (count == 0) throw FormatError("RKG1: zero kernels");
  if (size == 0 || size % 2 == 0)
    throw FormatError("RKG1: kernel size must be odd");
  RkgDataset ds;
  ds.noise_amplitude = wire::get_f64(is);
  ds.seed = wire::get_u64(is);
  ds.kernels.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    Grid2D g(size, size);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) g(i, j) = wire::get_f64(is);
    ds.kernels.push_back(Kernel{std::move(g), std::nullopt});
  }
  for (std::uint32_t n = 0; n < count; ++n) {
    const int flag = is.get();
    if (flag == std::char_traits<char>::eof())
      throw FormatError("RKG1: truncated spec table");
    if (flag == 1) {
      GaussianKernelSpec spec;
      spec.sigma1 = wire::get_f64(is);
      spec.sigma2 = wire::get_f64(is);
      spec.theta = wire::get_f64(is);
      spec.size = size;
      ds.kernels[n].spec = spec;
    } else if (flag != 0) {
      throw FormatError("RKG1: bad spec presence flag");
    }
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("RKG1: trailing bytes");
  for (const Kernel& k : ds.kernels) {
    try {
      validate_kernel(k);
    } catch (const ContractError& e) {
      throw FormatError(std::string("RKG1: invalid kernel: ") + e.what());
    }
  }
  return ds;
}

}  // namespace nsd
