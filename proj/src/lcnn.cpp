#include "nsd/lcnn.hpp"

#include <cmath>
#include <fstream>

#include "nsd/errors.hpp"
#include "nsd/grid_io.hpp"

namespace nsd {

namespace {

constexpr std::size_t kMaxChannels = 65535;

// acc += conv_full(a, layer.taps[o][i]); acc must already have the full
// convolution dims (a.rows()+2, a.cols()+2).
void conv_full_add(const Grid2D& a, const ConvLayer& layer, std::size_t o,
                   std::size_t i, Grid2D& acc) {
  for (std::size_t m = 0; m < a.rows(); ++m) {
    for (std::size_t n = 0; n < a.cols(); ++n) {
      const double av = a(m, n);
      if (av == 0.0) continue;
      for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v)
          acc(m + u, n + v) += av * layer.tap(o, i, u, v);
    }
  }
}

std::vector<Grid2D> apply_layer(const std::vector<Grid2D>& in,
                                const ConvLayer& layer) {
  const std::size_t rows = in.front().rows() + 2;
  const std::size_t cols = in.front().cols() + 2;
  std::vector<Grid2D> out;
  out.reserve(layer.out_channels);
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    Grid2D acc(rows, cols);
    for (std::size_t i = 0; i < layer.in_channels; ++i)
      conv_full_add(in[i], layer, o, i, acc);
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace

ConvLayer::ConvLayer(std::size_t out_ch, std::size_t in_ch)
    : out_channels(out_ch), in_channels(in_ch), taps(out_ch * in_ch * 9, 0.0) {
  if (out_ch == 0 || in_ch == 0)
    throw ContractError("conv layer needs at least one channel per side");
}

Lcnn::Lcnn(const std::vector<std::size_t>& channels) {
  if (channels.size() < 2)
    throw ContractError("topology needs at least one layer");
  if (channels.front() != 1 || channels.back() != 1)
    throw ContractError("network must map one channel to one channel");
  for (std::size_t c : channels)
    if (c == 0 || c > kMaxChannels)
      throw ContractError("channel count out of range");
  layers_.reserve(channels.size() - 1);
  for (std::size_t l = 0; l + 1 < channels.size(); ++l)
    layers_.emplace_back(channels[l + 1], channels[l]);
}

std::vector<std::size_t> Lcnn::default_channels(std::size_t depth,
                                                std::size_t width) {
  if (depth == 0) throw ContractError("depth must be positive");
  std::vector<std::size_t> chain(depth + 1, width);
  chain.front() = 1;
  chain.back() = 1;
  return chain;
}

Lcnn Lcnn::init_model(Rng& rng, const std::vector<std::size_t>& channels,
                      InitScheme scheme, double noise_std) {
  if (noise_std < 0.0) throw ContractError("noise std must be >= 0");
  Lcnn model(channels);
  for (ConvLayer& layer : model.layers_) {
    const double std_dev = scheme == InitScheme::scaled_normal
                               ? std::sqrt(1.0 / (static_cast<double>(
                                                      layer.in_channels) *
                                                  9.0))
                               : noise_std;
    for (double& t : layer.taps) t = rng.normal(0.0, std_dev);
    if (scheme == InitScheme::near_identity) {
      // Route the signal through hidden channel 0 with exact deltas so the
      // composite impulse response starts at a centered delta.
      for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t v = 0; v < 3; ++v)
          layer.tap(0, 0, u, v) = (u == 1 && v == 1) ? 1.0 : 0.0;
    }
  }
  return model;
}

std::size_t Lcnn::parameter_count() const {
  std::size_t n = 0;
  for (const ConvLayer& layer : layers_) n += layer.taps.size();
  return n;
}

Grid2D Lcnn::forward(const Grid2D& input) const {
  std::vector<Grid2D> cur{input};
  for (const ConvLayer& layer : layers_) {
    if (layer.in_channels != cur.size())
      throw ContractError("layer input channels do not match");
    cur = apply_layer(cur, layer);
  }
  // Crop the grown borders back off; equivalent to zero same-padding at
  // every layer but without losing cross-border round trips.
  const std::size_t d = depth();
  Grid2D out(input.rows(), input.cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out(r, c) = cur.front()(r + d, c + d);
  return out;
}

ImpulseCascade Lcnn::impulse_cascade() const {
  ImpulseCascade cascade;
  cascade.stacks.reserve(layers_.size() + 1);
  Grid2D delta(1, 1);
  delta(0, 0) = 1.0;
  cascade.stacks.push_back({std::move(delta)});
  for (const ConvLayer& layer : layers_)
    cascade.stacks.push_back(apply_layer(cascade.stacks.back(), layer));
  return cascade;
}

Drk Lcnn::extract_drk() const {
  return impulse_cascade().stacks.back().front();
}

void Lcnn::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  wire::put_magic(os, "LCNN");
  wire::put_u32(os, static_cast<std::uint32_t>(layers_.size()));
  for (const ConvLayer& layer : layers_) {
    wire::put_u32(os, static_cast<std::uint32_t>(layer.out_channels));
    wire::put_u32(os, static_cast<std::uint32_t>(layer.in_channels));
  }
  for (const ConvLayer& layer : layers_)
    for (double t : layer.taps) wire::put_f64(os, t);
  if (!os) throw IoError("write failed: " + path);
}

Lcnn Lcnn::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  wire::check_magic(is, "LCNN", path.c_str());
  const std::uint32_t depth = wire::get_u32(is);
  if (depth == 0) throw FormatError("LCNN: zero layers");
  std::vector<std::size_t> chain;
  chain.reserve(depth + 1);
  for (std::uint32_t l = 0; l < depth; ++l) {
    const std::uint32_t out_ch = wire::get_u32(is);
    const std::uint32_t in_ch = wire::get_u32(is);
    if (out_ch == 0 || in_ch == 0 || out_ch > kMaxChannels ||
        in_ch > kMaxChannels)
      throw FormatError("LCNN: channel count out of range");
    if (l == 0) {
      chain.push_back(in_ch);
    } else if (chain.back() != in_ch) {
      throw FormatError("LCNN: layer channel counts do not chain");
    }
    chain.push_back(out_ch);
  }
  if (chain.front() != 1 || chain.back() != 1)
    throw FormatError("LCNN: network must map one channel to one channel");
  Lcnn model(chain);
  for (ConvLayer& layer : model.layers_)
    for (double& t : layer.taps) {
      t = wire::get_f64(is);
      if (!std::isfinite(t)) throw FormatError("LCNN: non-finite tap");
    }
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("LCNN: trailing bytes");
  return model;
}

bool Lcnn::operator==(const Lcnn& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].out_channels != other.layers_[l].out_channels ||
        layers_[l].in_channels != other.layers_[l].in_channels ||
        layers_[l].taps != other.layers_[l].taps)
      return false;
  }
  return true;
}

}  // namespace nsd
