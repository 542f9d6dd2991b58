#ifndef NSD_GALLERY_HPP
#define NSD_GALLERY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsd/grid.hpp"
#include "nsd/rng.hpp"

namespace nsd {

// Anisotropic Gaussian blur parameters: axis spreads in pixels and the
// rotation of the first axis.
struct GaussianKernelSpec {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double theta = 0.0;  // radians, [0, pi]
  std::size_t size = 11;
};

// Unit-sum non-negative degradation kernel.
struct Kernel {
  Grid2D grid;
  std::optional<GaussianKernelSpec> spec;
};

// Checks the kernel invariants (entries >= 0, sum == 1 within 1e-9).
void validate_kernel(const Kernel& k);

struct RkgDataset {
  std::vector<Kernel> kernels;
  std::uint64_t seed = 0;
  double noise_amplitude = 0.0;
  std::size_t kernel_size() const {
    return kernels.empty() ? 0 : kernels.front().grid.rows();
  }
};

// sigma1, sigma2 ~ U[lo, hi] independently, theta ~ U[0, pi].
GaussianKernelSpec sample_spec(Rng& rng, std::size_t size, double lo,
                               double hi);

// Rotated-covariance Gaussian sampled at pixel centers, normalized to
// unit sum.
Kernel render_gaussian_kernel(const GaussianKernelSpec& spec);

// Each entry scaled by (1+u), u ~ U[-amplitude, amplitude], clipped at 0
// and renormalized. amplitude == 0 returns the input untouched (and draws
// nothing from the generator).
Kernel perturb_multiplicative(const Kernel& k, Rng& rng, double amplitude);

RkgDataset generate_rkg(std::size_t count, std::size_t size, double sigma_lo,
                        double sigma_hi, double noise_amplitude,
                        std::uint64_t seed);

// "RKG1" file format: magic, count (u32 LE), size (u32 LE),
// noise_amplitude (f64 LE), seed (u64 LE), count*size*size kernel entries
// (f64 LE), then per kernel a presence byte followed (if 1) by
// sigma1, sigma2, theta (f64 LE each).
void save_rkg(const RkgDataset& ds, const std::string& path);
RkgDataset load_rkg(const std::string& path);

}  // namespace nsd

#endif  // NSD_GALLERY_HPP
