// nsd: null-shot deblurring pipeline driver.
//
// Subcommands cover the whole flow: gallery synthesis (gen-rkg), inverse-
// kernel training (train), kernel export (extract-drk), restoration
// (deblur, sr), dataset simulation (simulate), and the reporting harness
// (eval, ablate, sweep). Every generative command takes an explicit --seed;
// each run writes its resolved key=value config next to its main output.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsd/config.hpp"
#include "nsd/dil.hpp"
#include "nsd/errors.hpp"
#include "nsd/eval.hpp"
#include "nsd/gallery.hpp"
#include "nsd/grid_io.hpp"
#include "nsd/image.hpp"
#include "nsd/lcnn.hpp"
#include "nsd/log.hpp"
#include "nsd/metrics.hpp"
#include "nsd/restore.hpp"
#include "nsd/rng.hpp"

namespace fs = std::filesystem;
using namespace nsd;

namespace {

// Invocation mistakes that CLI11 cannot see (cross-flag constraints, knobs
// that may arrive via --config instead of a flag).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generative commands refuse to fall back to an implicit seed; it has to
// come from the flag or from a --config file.
void require_seed(const RunConfig& cfg) {
  if (!cfg.has("seed"))
    throw UsageError("--seed is required (flag or config file)");
}

// Ties a CLI flag to a config key so precedence is uniform everywhere:
// built-in default, then --config file, then explicitly passed flags.
struct Knobs {
  RunConfig cfg;
  std::set<std::string> keys;
  std::vector<std::function<void()>> overrides;

  void add_double(CLI::App* sub, const std::string& flag,
                  const std::string& key, double def, double* slot,
                  const std::string& desc) {
    *slot = def;
    cfg.set_double(key, def);
    keys.insert(key);
    CLI::Option* opt = sub->add_option(flag, *slot, desc);
    overrides.push_back([this, key, opt, slot] {
      if (opt->count() > 0) cfg.set_double(key, *slot);
    });
  }
  void add_u64(CLI::App* sub, const std::string& flag, const std::string& key,
               std::uint64_t def, std::uint64_t* slot, const std::string& desc,
               bool required = false, bool write_default = true) {
    *slot = def;
    if (!required && write_default) cfg.set_u64(key, def);
    keys.insert(key);
    CLI::Option* opt = sub->add_option(flag, *slot, desc);
    if (required) opt->required();
    overrides.push_back([this, key, opt, slot] {
      if (opt->count() > 0) cfg.set_u64(key, *slot);
    });
  }
  void add_string(CLI::App* sub, const std::string& flag,
                  const std::string& key, const std::string& def,
                  std::string* slot, const std::string& desc) {
    *slot = def;
    cfg.set(key, def);
    keys.insert(key);
    CLI::Option* opt = sub->add_option(flag, *slot, desc);
    overrides.push_back([this, key, opt, slot] {
      if (opt->count() > 0) cfg.set(key, *slot);
    });
  }
  void add_bool(CLI::App* sub, const std::string& flag, const std::string& key,
                bool def, bool* slot, const std::string& desc) {
    *slot = def;
    cfg.set_bool(key, def);
    keys.insert(key);
    CLI::Option* opt = sub->add_flag(flag, *slot, desc);
    overrides.push_back([this, key, opt, slot] {
      if (opt->count() > 0) cfg.set_bool(key, *slot);
    });
  }

  void resolve(const std::string& config_path) {
    if (!config_path.empty())
      cfg.merge(RunConfig::parse_file(config_path, keys));
    for (const auto& apply : overrides) apply();
  }
};

void add_common(CLI::App* sub, std::string* config_path,
                std::uint64_t* threads) {
  sub->add_option("--config", *config_path,
                  "key=value config file (flags override it)");
  *threads = 1;
  sub->add_option("--threads", *threads,
                  "parallelism cap; 1 is the deterministic reference")
      ->check(CLI::PositiveNumber);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t v = 0;
    for (char c : tok) {
      if (c < '0' || c > '9')
        throw ContractError("sizes must be a comma list of integers: " + text);
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    sizes.push_back(v);
  }
  if (sizes.empty()) throw ContractError("no kernel sizes given");
  return sizes;
}

std::vector<std::pair<double, double>> parse_bands(const std::string& text) {
  std::vector<std::pair<double, double>> bands;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    double lo = 0.0, hi = 0.0;
    int used = 0;
    if (std::sscanf(tok.c_str(), "%lg:%lg%n", &lo, &hi, &used) != 2 ||
        used != static_cast<int>(tok.size()))
      throw ContractError("bands must look like lo:hi,lo:hi — got: " + text);
    bands.emplace_back(lo, hi);
  }
  if (bands.empty()) throw ContractError("no sigma bands given");
  return bands;
}

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "near_identity") return InitScheme::near_identity;
  if (name == "scaled_normal") return InitScheme::scaled_normal;
  throw ContractError("unknown init scheme: " + name +
                      " (near_identity|scaled_normal)");
}

Drk load_drk_arg(const std::string& checkpoint, const std::string& drk_path) {
  if (checkpoint.empty() == drk_path.empty())
    throw ContractError("give exactly one of --checkpoint and --drk");
  if (!checkpoint.empty()) return Lcnn::load(checkpoint).extract_drk();
  Drk drk = load_grid(drk_path);
  if (drk.rows() != drk.cols() || drk.rows() % 2 == 0)
    throw ContractError("restoration kernel must be odd and square");
  return drk;
}

PadMode parse_pad(const std::string& name) {
  if (name == "reflect") return PadMode::reflect;
  if (name == "zero") return PadMode::zero;
  throw ContractError("unknown pad mode: " + name + " (reflect|zero)");
}

// Knob names shared by train and ablate.
struct TrainKnobs {
  double lambda1, lambda2, lambda3, learning_rate, beta1, beta2;
  double epsilon_spec, init_noise_std;
  std::uint64_t epochs, batch_size, spectrum_rows, spectrum_cols;
  std::uint64_t depth, width, seed;
  bool identity_padded;
  std::string init_scheme;

  void wire(CLI::App* sub, Knobs* k,
            const std::string& default_init = "near_identity") {
    k->add_u64(sub, "--depth", "depth", 5, &depth, "number of conv layers");
    k->add_u64(sub, "--width", "width", 32, &width, "hidden channels");
    k->add_string(sub, "--init", "init_scheme", default_init, &init_scheme,
                  "near_identity|scaled_normal");
    k->add_double(sub, "--init-noise-std", "init_noise_std", 1e-2,
                  &init_noise_std, "off-path noise for near_identity");
    k->add_double(sub, "--lambda1", "lambda1", 0.8, &lambda1,
                  "area-term weight");
    k->add_double(sub, "--lambda2", "lambda2", 0.8, &lambda2,
                  "zero-phase-term weight");
    k->add_double(sub, "--lambda3", "lambda3", 0.4, &lambda3,
                  "unit-magnitude-term weight");
    k->add_double(sub, "--lr", "learning_rate", 1e-3, &learning_rate,
                  "Adam learning rate");
    k->add_double(sub, "--beta1", "beta1", 0.9, &beta1, "Adam beta1");
    k->add_double(sub, "--beta2", "beta2", 0.999, &beta2, "Adam beta2");
    k->add_u64(sub, "--epochs", "epochs", 40, &epochs, "training epochs");
    k->add_u64(sub, "--batch-size", "batch_size", 32, &batch_size,
               "kernels per optimizer step");
    k->add_u64(sub, "--spectrum-rows", "spectrum_rows", 21, &spectrum_rows,
               "loss spectrum rows");
    k->add_u64(sub, "--spectrum-cols", "spectrum_cols", 21, &spectrum_cols,
               "loss spectrum cols");
    k->add_double(sub, "--epsilon-spec", "epsilon_spec", 1e-12, &epsilon_spec,
                  "spectral magnitude floor");
    k->add_bool(sub, "--identity-padded", "identity_on_padded_output", false,
                &identity_padded,
                "restrict the identity residual to the same-padded window");
    k->add_u64(sub, "--seed", "seed", 0, &seed,
               "master seed (init, shuffling)", /*required=*/false,
               /*write_default=*/false);
  }

  TrainConfig to_train_config(const RunConfig& cfg) const {
    TrainConfig tc;
    tc.lambda1 = cfg.get_double("lambda1");
    tc.lambda2 = cfg.get_double("lambda2");
    tc.lambda3 = cfg.get_double("lambda3");
    tc.learning_rate = cfg.get_double("learning_rate");
    tc.beta1 = cfg.get_double("beta1");
    tc.beta2 = cfg.get_double("beta2");
    tc.epochs = cfg.get_size("epochs");
    tc.batch_size = cfg.get_size("batch_size");
    tc.spectrum_rows = cfg.get_size("spectrum_rows");
    tc.spectrum_cols = cfg.get_size("spectrum_cols");
    tc.epsilon_spec = cfg.get_double("epsilon_spec");
    tc.identity_on_padded_output = cfg.get_bool("identity_on_padded_output");
    tc.seed = mix_seed(cfg.get_u64("seed"), 2, 0);
    return tc;
  }

  Lcnn build_init(const RunConfig& cfg) const {
    Rng rng(mix_seed(cfg.get_u64("seed"), 1, 0));
    return Lcnn::init_model(
        rng,
        Lcnn::default_channels(cfg.get_size("depth"), cfg.get_size("width")),
        parse_init_scheme(cfg.get_string("init_scheme")),
        cfg.get_double("init_noise_std"));
  }
};

// Knobs for building an evaluation dataset from a sharp-image directory.
struct SimKnobs {
  std::string sizes;
  double sigma_lo, sigma_hi, noise;
  std::uint64_t seed;

  void wire(CLI::App* sub, Knobs* k) {
    k->add_string(sub, "--sizes", "sizes", "11,15,19,23,27", &sizes,
                  "comma list of kernel sizes");
    k->add_double(sub, "--sigma-lo", "sigma_lo", 0.175, &sigma_lo,
                  "kernel sigma lower bound");
    k->add_double(sub, "--sigma-hi", "sigma_hi", 3.0, &sigma_hi,
                  "kernel sigma upper bound");
    k->add_double(sub, "--noise", "noise_amplitude", 0.25, &noise,
                  "multiplicative kernel noise amplitude");
    // The seed never carries an implicit default; it must arrive via the
    // flag or the config file.
    k->add_u64(sub, "--seed", "seed", 0, &seed, "master seed",
               /*required=*/false, /*write_default=*/false);
  }

  SimulateOptions to_options(const RunConfig& cfg) const {
    SimulateOptions opt;
    opt.sizes = parse_sizes(cfg.get_string("sizes"));
    opt.sigma_lo = cfg.get_double("sigma_lo");
    opt.sigma_hi = cfg.get_double("sigma_hi");
    opt.noise_amplitude = cfg.get_double("noise_amplitude");
    opt.seed = cfg.get_u64("seed");
    return opt;
  }
};

int run_gen_rkg(Knobs& k, const std::string& config_path,
                const std::string& out) {
  k.resolve(config_path);
  require_seed(k.cfg);
  const RkgDataset ds = generate_rkg(
      k.cfg.get_size("count"), k.cfg.get_size("size"),
      k.cfg.get_double("sigma_lo"), k.cfg.get_double("sigma_hi"),
      k.cfg.get_double("noise_amplitude"), k.cfg.get_u64("seed"));
  save_rkg(ds, out);
  k.cfg.write_file(out + ".config");
  log_info("wrote " + std::to_string(ds.kernels.size()) + " kernels to " +
           out);
  return 0;
}

int run_train(Knobs& k, const std::string& config_path, TrainKnobs& tk,
              const std::string& rkg_path, const std::string& out,
              std::string loss_csv) {
  k.resolve(config_path);
  require_seed(k.cfg);
  const RkgDataset rkg = load_rkg(rkg_path);
  Lcnn model = tk.build_init(k.cfg);
  const TrainConfig tc = tk.to_train_config(k.cfg);
  log_info("training on " + std::to_string(rkg.kernels.size()) +
           " kernels for " + std::to_string(tc.epochs) + " epochs");
  const TrainResult result = train(std::move(model), rkg, tc);
  if (result.aborted)
    log_info("run ended early on non-finite loss; kept the last good epoch");
  result.model.save(out);
  if (loss_csv.empty()) loss_csv = out + ".loss.csv";
  write_loss_history_csv(result.history, loss_csv);
  k.cfg.write_file(out + ".config");
  log_info("wrote checkpoint " + out + " and loss history " + loss_csv);
  return 0;
}

int run_extract_drk(const std::string& checkpoint, const std::string& out) {
  const Lcnn model = Lcnn::load(checkpoint);
  const Drk drk = model.extract_drk();
  save_grid(drk, out);
  double lo = drk(0, 0), hi = drk(0, 0);
  for (std::size_t i = 0; i < drk.rows(); ++i)
    for (std::size_t j = 0; j < drk.cols(); ++j) {
      lo = std::min(lo, drk(i, j));
      hi = std::max(hi, drk(i, j));
    }
  const double center = drk((drk.rows() - 1) / 2, (drk.cols() - 1) / 2);
  std::printf("sum=%.17g min=%.17g max=%.17g center=%.17g\n", drk.sum(), lo,
              hi, center);
  return 0;
}

int run_deblur(const std::string& in, const std::string& out,
               const std::string& checkpoint, const std::string& drk_path,
               const std::string& pad) {
  const Drk drk = load_drk_arg(checkpoint, drk_path);
  const Image img = load_image(in);
  save_image(deblur_with_drk(img, drk, parse_pad(pad)), out);
  log_info("wrote " + out);
  return 0;
}

int run_sr(const std::string& in, const std::string& out,
           const std::string& checkpoint, const std::string& drk_path,
           const std::string& pad, double scale) {
  if (!(scale > 0.0)) throw ContractError("scale must be positive");
  const Drk drk = load_drk_arg(checkpoint, drk_path);
  const Image img = load_image(in);
  save_image(super_resolve(img, scale, drk, parse_pad(pad)), out);
  log_info("wrote " + out);
  return 0;
}

int run_simulate(Knobs& k, const std::string& config_path, SimKnobs& sk,
                 const std::string& sharp_dir, const std::string& out_dir) {
  k.resolve(config_path);
  require_seed(k.cfg);
  const SimulateOptions opt = sk.to_options(k.cfg);
  const std::vector<BlurPair> pairs = simulate_blur_dataset(sharp_dir, opt);
  fs::create_directories(out_dir);
  std::vector<std::string> blurred_paths;
  blurred_paths.reserve(pairs.size());
  for (const BlurPair& bp : pairs) {
    const fs::path src(bp.sharp_path);
    const std::string name = src.stem().string() + "_k" +
                             std::to_string(bp.kernel_size) +
                             src.extension().string();
    const std::string path = (fs::path(out_dir) / name).string();
    save_image(bp.blurred, path);
    blurred_paths.push_back(path);
  }
  const std::string manifest = (fs::path(out_dir) / "manifest.txt").string();
  write_manifest(pairs, opt, blurred_paths, manifest);
  k.cfg.write_file((fs::path(out_dir) / "run.config").string());
  log_info("wrote " + std::to_string(pairs.size()) + " blurred images and " +
           manifest);
  return 0;
}

int run_eval(Knobs& k, const std::string& config_path, SimKnobs& sk,
             const std::string& manifest, const std::string& sharp_dir,
             const std::string& checkpoint, const std::string& out) {
  k.resolve(config_path);
  if (manifest.empty() == sharp_dir.empty())
    throw ContractError("give exactly one of --manifest and --sharp-dir");
  std::vector<BlurPair> pairs;
  if (!manifest.empty()) {
    pairs = load_blur_pairs(manifest);
  } else {
    if (!k.cfg.has("seed"))
      throw UsageError("--seed is required with --sharp-dir");
    pairs = simulate_blur_dataset(sharp_dir, sk.to_options(k.cfg));
  }
  const EvalMethod method = parse_eval_method(k.cfg.get_string("method"));
  std::optional<Lcnn> model;
  if (method == EvalMethod::drk || method == EvalMethod::lcnn) {
    if (checkpoint.empty())
      throw ContractError("method " + eval_method_name(method) +
                          " needs --checkpoint");
    model.emplace(Lcnn::load(checkpoint));
  }
  const Lcnn* model_ptr = model ? &*model : nullptr;
  EvalOptions opt;
  opt.wiener_nsr = k.cfg.get_double("wiener_nsr");
  opt.crop_margin = k.cfg.get_size("crop_margin");
  const EvalReport report = evaluate(method, pairs, model_ptr, opt);
  write_eval_csv(report, out);
  k.cfg.write_file(out + ".config");
  log_info("wrote " + out);
  return 0;
}

int run_ablate(Knobs& k, const std::string& config_path, TrainKnobs& tk,
               SimKnobs& sk, const std::string& rkg_path,
               const std::string& sharp_dir, const std::string& out) {
  k.resolve(config_path);
  require_seed(k.cfg);
  const RkgDataset rkg = load_rkg(rkg_path);
  SimulateOptions sim = sk.to_options(k.cfg);
  sim.seed = mix_seed(k.cfg.get_u64("seed"), 3, 0);
  const std::vector<BlurPair> pairs = simulate_blur_dataset(sharp_dir, sim);
  const Lcnn init = tk.build_init(k.cfg);
  const TrainConfig base = tk.to_train_config(k.cfg);
  EvalOptions opt;
  opt.crop_margin = k.cfg.get_size("crop_margin");
  const std::vector<AblationRow> rows =
      ablation_grid(init, rkg, base, pairs, opt);
  write_ablation_csv(rows, out);
  k.cfg.write_file(out + ".config");
  log_info("wrote " + out);
  return 0;
}

int run_sweep(Knobs& k, const std::string& config_path,
              const std::string& checkpoint, const std::string& sharp_dir,
              const std::string& out) {
  k.resolve(config_path);
  require_seed(k.cfg);
  const Lcnn model = Lcnn::load(checkpoint);
  const std::vector<SweepRow> rows = robustness_sweep(
      model, sharp_dir, parse_bands(k.cfg.get_string("bands")),
      k.cfg.get_u64("seed"), k.cfg.get_double("noise_amplitude"),
      EvalOptions{1e-3, k.cfg.get_size("crop_margin")});
  write_sweep_csv(rows, out);
  k.cfg.write_file(out + ".config");
  log_info("wrote " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"null-shot deblurring: image-free inverse-kernel training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nsd 1.0");

  // gen-rkg
  auto* c_gen = app.add_subcommand("gen-rkg", "synthesize a kernel gallery");
  Knobs k_gen;
  std::string gen_config, gen_out;
  std::uint64_t gen_threads = 1, gen_count = 0, gen_size = 0, gen_seed = 0;
  double gen_lo = 0, gen_hi = 0, gen_noise = 0;
  add_common(c_gen, &gen_config, &gen_threads);
  c_gen->add_option("--out", gen_out, "RKG1 output path")->required();
  k_gen.add_u64(c_gen, "--count", "count", 2400, &gen_count,
                "number of kernels");
  k_gen.add_u64(c_gen, "--size", "size", 11, &gen_size, "kernel side length");
  k_gen.add_double(c_gen, "--sigma-lo", "sigma_lo", 0.175, &gen_lo,
                   "sigma lower bound");
  k_gen.add_double(c_gen, "--sigma-hi", "sigma_hi", 3.0, &gen_hi,
                   "sigma upper bound");
  k_gen.add_double(c_gen, "--noise", "noise_amplitude", 0.25, &gen_noise,
                   "multiplicative noise amplitude");
  k_gen.add_u64(c_gen, "--seed", "seed", 0, &gen_seed, "master seed",
                /*required=*/false, /*write_default=*/false);

  // train
  auto* c_train = app.add_subcommand("train", "fit the inverse kernel");
  Knobs k_train;
  TrainKnobs tk_train;
  std::string train_config, train_rkg, train_out, train_loss_csv;
  std::uint64_t train_threads = 1;
  add_common(c_train, &train_config, &train_threads);
  c_train->add_option("--rkg", train_rkg, "RKG1 gallery path")->required();
  c_train->add_option("--out", train_out, "checkpoint output path")
      ->required();
  c_train->add_option("--loss-csv", train_loss_csv,
                      "loss history path (default: <out>.loss.csv)");
  tk_train.wire(c_train, &k_train);

  // extract-drk
  auto* c_extract =
      app.add_subcommand("extract-drk", "collapse a checkpoint into a kernel");
  std::string ex_checkpoint, ex_out;
  c_extract->add_option("--checkpoint", ex_checkpoint, "LCNN checkpoint")
      ->required();
  c_extract->add_option("--out", ex_out, "GRD1 output path")->required();

  // deblur
  auto* c_deblur = app.add_subcommand("deblur", "restore a blurred image");
  std::string db_in, db_out, db_ckpt, db_drk, db_pad = "reflect";
  c_deblur->add_option("--in", db_in, "input image (pgm/ppm)")->required();
  c_deblur->add_option("--out", db_out, "output image")->required();
  c_deblur->add_option("--checkpoint", db_ckpt, "LCNN checkpoint");
  c_deblur->add_option("--drk", db_drk, "GRD1 restoration kernel");
  c_deblur->add_option("--pad", db_pad, "border handling: reflect|zero");

  // sr
  auto* c_sr = app.add_subcommand("sr", "bicubic-upsample then restore");
  std::string sr_in, sr_out, sr_ckpt, sr_drk, sr_pad = "reflect";
  double sr_scale = 2.0;
  c_sr->add_option("--in", sr_in, "input image (pgm/ppm)")->required();
  c_sr->add_option("--out", sr_out, "output image")->required();
  c_sr->add_option("--checkpoint", sr_ckpt, "LCNN checkpoint");
  c_sr->add_option("--drk", sr_drk, "GRD1 restoration kernel");
  c_sr->add_option("--pad", sr_pad, "border handling: reflect|zero");
  c_sr->add_option("--scale", sr_scale, "upsampling factor (2 or 4)");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "build a blurred dataset");
  Knobs k_sim;
  SimKnobs sk_sim;
  std::string sim_config, sim_sharp, sim_out;
  std::uint64_t sim_threads = 1;
  add_common(c_sim, &sim_config, &sim_threads);
  c_sim->add_option("--sharp-dir", sim_sharp, "directory of sharp images")
      ->required();
  c_sim->add_option("--out-dir", sim_out, "output directory")->required();
  sk_sim.wire(c_sim, &k_sim);

  // eval
  auto* c_eval = app.add_subcommand("eval", "score a restoration method");
  Knobs k_eval;
  SimKnobs sk_eval;
  std::string ev_config, ev_manifest, ev_sharp, ev_ckpt, ev_out, ev_method;
  std::uint64_t ev_threads = 1, ev_crop = 0;
  double ev_nsr = 0;
  add_common(c_eval, &ev_config, &ev_threads);
  c_eval->add_option("--manifest", ev_manifest, "blur-pair manifest");
  c_eval->add_option("--sharp-dir", ev_sharp,
                     "sharp images (simulate in memory)");
  c_eval->add_option("--checkpoint", ev_ckpt, "LCNN checkpoint");
  c_eval->add_option("--out", ev_out, "report CSV path")->required();
  k_eval.add_string(c_eval, "--method", "method", "drk", &ev_method,
                    "identity|drk|lcnn|wiener");
  k_eval.add_double(c_eval, "--nsr", "wiener_nsr", 1e-3, &ev_nsr,
                    "wiener noise-to-signal ratio");
  k_eval.add_u64(c_eval, "--crop", "crop_margin", 13, &ev_crop,
                 "metric border crop in pixels");
  sk_eval.wire(c_eval, &k_eval);

  // ablate
  auto* c_abl = app.add_subcommand("ablate", "loss-term ablation grid");
  Knobs k_abl;
  TrainKnobs tk_abl;
  SimKnobs sk_abl;
  std::string ab_config, ab_rkg, ab_sharp, ab_out;
  std::uint64_t ab_threads = 1, ab_crop = 0;
  add_common(c_abl, &ab_config, &ab_threads);
  c_abl->add_option("--rkg", ab_rkg, "RKG1 gallery path")->required();
  c_abl->add_option("--sharp-dir", ab_sharp, "directory of sharp images")
      ->required();
  c_abl->add_option("--out", ab_out, "ablation CSV path")->required();
  // Random init by default: starting at the identity would mask what the
  // regularizers contribute, which is the whole point of the grid.
  tk_abl.wire(c_abl, &k_abl, "scaled_normal");
  k_abl.add_u64(c_abl, "--crop", "crop_margin", 13, &ab_crop,
                "metric border crop in pixels");
  // sim knobs minus the seed flag (the train seed drives everything)
  {
    k_abl.add_string(c_abl, "--sizes", "sizes", "11,15,19,23,27",
                     &sk_abl.sizes, "comma list of kernel sizes");
    k_abl.add_double(c_abl, "--sigma-lo", "sigma_lo", 0.175, &sk_abl.sigma_lo,
                     "kernel sigma lower bound");
    k_abl.add_double(c_abl, "--sigma-hi", "sigma_hi", 3.0, &sk_abl.sigma_hi,
                     "kernel sigma upper bound");
    k_abl.add_double(c_abl, "--noise", "noise_amplitude", 0.25, &sk_abl.noise,
                     "multiplicative kernel noise amplitude");
  }

  // sweep
  auto* c_sweep = app.add_subcommand("sweep", "blur-level robustness sweep");
  Knobs k_sweep;
  std::string sw_config, sw_ckpt, sw_sharp, sw_out, sw_bands;
  std::uint64_t sw_threads = 1, sw_seed = 0, sw_crop = 0;
  double sw_noise = 0;
  add_common(c_sweep, &sw_config, &sw_threads);
  c_sweep->add_option("--checkpoint", sw_ckpt, "LCNN checkpoint")->required();
  c_sweep->add_option("--sharp-dir", sw_sharp, "directory of sharp images")
      ->required();
  c_sweep->add_option("--out", sw_out, "sweep CSV path")->required();
  k_sweep.add_string(c_sweep, "--bands", "bands", "0.175:3,3:6,6:9",
                     &sw_bands, "sigma bands lo:hi,lo:hi,...");
  k_sweep.add_double(c_sweep, "--noise", "noise_amplitude", 0.25, &sw_noise,
                     "multiplicative kernel noise amplitude");
  k_sweep.add_u64(c_sweep, "--crop", "crop_margin", 13, &sw_crop,
                  "metric border crop in pixels");
  k_sweep.add_u64(c_sweep, "--seed", "seed", 0, &sw_seed, "master seed",
                  /*required=*/false, /*write_default=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage-error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_gen->parsed()) return run_gen_rkg(k_gen, gen_config, gen_out);
    if (c_train->parsed())
      return run_train(k_train, train_config, tk_train, train_rkg, train_out,
                       train_loss_csv);
    if (c_extract->parsed()) return run_extract_drk(ex_checkpoint, ex_out);
    if (c_deblur->parsed())
      return run_deblur(db_in, db_out, db_ckpt, db_drk, db_pad);
    if (c_sr->parsed())
      return run_sr(sr_in, sr_out, sr_ckpt, sr_drk, sr_pad, sr_scale);
    if (c_sim->parsed())
      return run_simulate(k_sim, sim_config, sk_sim, sim_sharp, sim_out);
    if (c_eval->parsed())
      return run_eval(k_eval, ev_config, sk_eval, ev_manifest, ev_sharp,
                      ev_ckpt, ev_out);
    if (c_abl->parsed())
      return run_ablate(k_abl, ab_config, tk_abl, sk_abl, ab_rkg, ab_sharp,
                        ab_out);
    if (c_sweep->parsed())
      return run_sweep(k_sweep, sw_config, sw_ckpt, sw_sharp, sw_out);
    std::cerr << "usage-error: no subcommand given\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage-error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "contract-error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "format-error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io-error: " << e.what() << "\n";
    return 5;
  } catch (const NumericError& e) {
    std::cerr << "numeric-error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "internal-error: " << e.what() << "\n";
    return 70;
  }
}
