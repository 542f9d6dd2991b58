#ifndef NSD_DIL_HPP
#define NSD_DIL_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nsd/gallery.hpp"
#include "nsd/grid.hpp"
#include "nsd/lcnn.hpp"

namespace nsd {

struct TrainConfig {
  double lambda1 = 0.8;
  double lambda2 = 0.8;
  double lambda3 = 0.4;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::size_t spectrum_rows = 21;
  std::size_t spectrum_cols = 21;
  double epsilon_spec = 1e-12;
  // When set, the identity residual is restricted to the central
  // kernel-sized window of the full convolution (what the net would emit
  // under same padding) instead of the whole 21x21 grid.
  bool identity_on_padded_output = false;

  // drk_size/kernel_size are the collapsed-kernel and blur-kernel side
  // lengths the config will be used with.
  void validate(std::size_t drk_size, std::size_t kernel_size) const;
};

struct LossBreakdown {
  double identity = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double total = 0.0;
};

// Per-tap Adam moments mirroring the model's layer layout.
struct AdamState {
  std::size_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  static AdamState for_model(const Lcnn& model);
};

// Gradient of the (mean) loss w.r.t. every tap, same layout as the layers.
using TapGradients = std::vector<std::vector<double>>;

// DFT of a centered kernel placed on a (P,Q) circular grid with its center
// at the origin, so symmetric kernels get real spectra. Forward and adjoint
// share one set of twiddle factors, which keeps analytic gradients exactly
// consistent with the loss.
class LossSpectrumMap {
 public:
  LossSpectrumMap(std::size_t in_rows, std::size_t in_cols, std::size_t p,
                  std::size_t q);
  ComplexGrid2D forward(const Grid2D& g) const;
  // Maps d(loss)/d(spectrum) back to d(loss)/d(grid entries).
  Grid2D adjoint(const ComplexGrid2D& gbar) const;

 private:
  std::size_t in_rows_, in_cols_, p_, q_;
  std::vector<std::complex<double>> wr_;  // [p][m]
  std::vector<std::complex<double>> wc_;  // [q][n]
};

ComplexGrid2D loss_spectrum(const Grid2D& g, std::size_t p, std::size_t q);

double identity_loss(const Kernel& k, const Drk& drk, const TrainConfig& cfg);
double r1_conv_area(const Drk& drk);
double r2_zero_phase(const Kernel& k, const Drk& drk, const TrainConfig& cfg);
double r3_unit_mag(const Kernel& k, const Drk& drk, const TrainConfig& cfg);

LossBreakdown total_loss(const Lcnn& model, const Kernel& k,
                         const TrainConfig& cfg);

// Gradient of the mean total loss over the batch. Optionally reports the
// batch-mean loss components alongside (they fall out of the same pass).
TapGradients gradients(const Lcnn& model, const std::vector<Kernel>& batch,
                       const TrainConfig& cfg,
                       LossBreakdown* mean_loss = nullptr);

void adam_step(Lcnn& model, const TapGradients& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainResult {
  Lcnn model;
  std::vector<LossBreakdown> history;  // per-epoch means
  bool aborted = false;                // non-finite loss cut the run short
};

TrainResult train(Lcnn model, const RkgDataset& rkg, const TrainConfig& cfg);

void write_loss_history_csv(const std::vector<LossBreakdown>& history,
                            const std::string& path);

}  // namespace nsd

#endif  // NSD_DIL_HPP
