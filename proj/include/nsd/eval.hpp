#ifndef NSD_EVAL_HPP
#define NSD_EVAL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nsd/dil.hpp"
#include "nsd/gallery.hpp"
#include "nsd/image.hpp"
#include "nsd/lcnn.hpp"

namespace nsd {

struct BlurPair {
  Image sharp;
  Image blurred;
  Kernel kernel;
  std::size_t kernel_size = 0;
  std::string sharp_path;
  std::uint64_t pair_seed = 0;
};

struct SimulateOptions {
  std::vector<std::size_t> sizes = {11, 15, 19, 23, 27};
  double sigma_lo = 0.175;
  double sigma_hi = 3.0;
  double noise_amplitude = 0.25;
  std::uint64_t seed = 0;
};

// Sorted *.pgm / *.ppm paths under dir.
std::vector<std::string> list_images(const std::string& dir);

// One kernel per (image, size) pair, derived from a per-pair seed so any
// pair is reproducible in isolation; blurred = reflect-padded convolution.
// Pairs come back grouped by kernel size.
std::vector<BlurPair> simulate_blur_dataset(const std::string& sharp_dir,
                                            const SimulateOptions& opt);

// Line-oriented companion file: per pair the sharp path, blurred path (or
// "-"), kernel size, sigmas, theta, and pair seed.
void write_manifest(const std::vector<BlurPair>& pairs,
                    const SimulateOptions& opt,
                    const std::vector<std::string>& blurred_paths,
                    const std::string& path);

// Rebuilds pairs from a manifest: reloads the sharp images, regenerates
// each kernel from its pair seed (cross-checked against the recorded
// sigmas), and re-applies the blur.
std::vector<BlurPair> load_blur_pairs(const std::string& manifest_path);

enum class EvalMethod { identity, drk, lcnn, wiener };

EvalMethod parse_eval_method(const std::string& name);
std::string eval_method_name(EvalMethod m);

struct EvalRow {
  std::size_t kernel_size = 0;  // 0 marks the aggregate row
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
};

struct EvalReport {
  std::string method;
  std::vector<EvalRow> rows;  // per-size rows then the aggregate
  double runtime_per_image_s = 0.0;
};

struct EvalOptions {
  double wiener_nsr = 1e-3;
  std::size_t crop_margin = 13;  // half the largest kernel
};

// model may be null for identity/wiener. Metrics are computed on
// border-cropped interiors; wiener runs in oracle-kernel mode.
EvalReport evaluate(EvalMethod method, const std::vector<BlurPair>& pairs,
                    const Lcnn* model, const EvalOptions& opt = {});

void write_eval_csv(const EvalReport& report, const std::string& path);

struct AblationRow {
  std::string config;
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
  double learning_rate = 0.0;
  double psnr = 0.0, ssim = 0.0;
};

// Trains the seven loss configurations (identity only; +R1; +R2; +R3;
// +R2+R3; +R1+R2; all three — evaluated last) from one shared init, plus a
// 1e-4 learning-rate variant of the full loss, and scores each on `pairs`.
std::vector<AblationRow> ablation_grid(const Lcnn& init,
                                       const RkgDataset& rkg,
                                       const TrainConfig& base,
                                       const std::vector<BlurPair>& pairs,
                                       const EvalOptions& opt = {});

void write_ablation_csv(const std::vector<AblationRow>& rows,
                        const std::string& path);

struct SweepRow {
  double sigma_lo = 0.0, sigma_hi = 0.0;
  double psnr = 0.0, ssim = 0.0;
  double drop_pct = 0.0;  // PSNR drop relative to the first band
};

// Same images and per-pair seeds in every band; only the kernel sigma
// range moves. Kernel size stays 11 (the trained range).
std::vector<SweepRow> robustness_sweep(
    const Lcnn& model, const std::string& sharp_dir,
    const std::vector<std::pair<double, double>>& bands, std::uint64_t seed,
    double noise_amplitude, const EvalOptions& opt = {});

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path);

}  // namespace nsd

#endif  // NSD_EVAL_HPP
