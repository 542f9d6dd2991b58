#ifndef NSD_LCNN_HPP
#define NSD_LCNN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nsd/grid.hpp"
#include "nsd/rng.hpp"

namespace nsd {

// One bias-free 3x3 convolution layer. Taps are stored out-major, then
// in-channel, then row-major over the 3x3 window.
struct ConvLayer {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::vector<double> taps;

  ConvLayer() = default;
  ConvLayer(std::size_t out_ch, std::size_t in_ch);

  double& tap(std::size_t o, std::size_t i, std::size_t r, std::size_t c) {
    return taps[((o * in_channels + i) * 3 + r) * 3 + c];
  }
  double tap(std::size_t o, std::size_t i, std::size_t r,
             std::size_t c) const {
    return taps[((o * in_channels + i) * 3 + r) * 3 + c];
  }
};

enum class InitScheme { scaled_normal, near_identity };

// Deep Restoration Kernel: the network collapsed into one explicit grid.
using Drk = Grid2D;

// Per-layer stacks of impulse responses. stacks[0] is the 1x1 input delta;
// stacks[l] holds layer l's responses, one grid per output channel. The
// last stack has a single grid: the collapsed restoration kernel.
struct ImpulseCascade {
  std::vector<std::vector<Grid2D>> stacks;
  const Grid2D& drk() const { return stacks.back().front(); }
};

// Linear CNN: a chain of bias-free, activation-free 3x3 conv layers mapping
// one channel to one channel. Because every stage is LTI the whole network
// collapses into a single explicit kernel (its impulse response).
class Lcnn {
 public:
  // channels = {1, 32, 32, 32, 32, 1} describes the default 5-layer net.
  explicit Lcnn(const std::vector<std::size_t>& channels);

  static std::vector<std::size_t> default_channels(std::size_t depth = 5,
                                                   std::size_t width = 32);
  static Lcnn init_model(Rng& rng, const std::vector<std::size_t>& channels,
                         InitScheme scheme, double noise_std = 1e-2);

  const std::vector<ConvLayer>& layers() const { return layers_; }
  std::vector<ConvLayer>& layers() { return layers_; }
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;
  // Side length of the collapsed kernel: 1 + 2*depth.
  std::size_t drk_size() const { return 1 + 2 * depth(); }

  // Same-size output; equals conv2d_same(input, drk, zero) by the LTI
  // cascade argument. Internally runs full convolutions and crops once at
  // the end, so no border terms are lost between layers.
  Grid2D forward(const Grid2D& input) const;

  Drk extract_drk() const;
  ImpulseCascade impulse_cascade() const;

  void save(const std::string& path) const;
  static Lcnn load(const std::string& path);

  bool operator==(const Lcnn& other) const;

 private:
  std::vector<ConvLayer> layers_;
};

}  // namespace nsd

#endif  // NSD_LCNN_HPP
