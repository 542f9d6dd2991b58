#include "nsd/dil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "nsd/errors.hpp"
#include "nsd/log.hpp"
#include "nsd/signal.hpp"

namespace nsd {

namespace {

constexpr double kAdamEps = 1e-8;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_odd_square(const Grid2D& g, const char* what) {
  if (g.rows() != g.cols() || g.rows() % 2 == 0)
    throw ContractError(std::string(what) + " must be odd and square");
}

// conv_full(k, drk) minus a centered delta. With `masked` the residual is
// restricted to the central k-sized window (the same-padded network output).
Grid2D identity_residual(const Grid2D& k, const Grid2D& drk, bool masked) {
  Grid2D e = conv2d_full(k, drk);
  e((e.rows() - 1) / 2, (e.cols() - 1) / 2) -= 1.0;
  if (masked) {
    const std::size_t r0 = (e.rows() - k.rows()) / 2;
    const std::size_t c0 = (e.cols() - k.cols()) / 2;
    for (std::size_t i = 0; i < e.rows(); ++i)
      for (std::size_t j = 0; j < e.cols(); ++j)
        if (i < r0 || i >= r0 + k.rows() || j < c0 || j >= c0 + k.cols())
          e(i, j) = 0.0;
  }
  return e;
}

struct SpectralEval {
  double r2 = 0.0;
  double r3 = 0.0;
};

// r2/r3 over the product spectrum z = a*b, plus (when gb_out is given) the
// gradient of lambda2*r2 + lambda3*r3 w.r.t. the b spectrum. Angle and
// magnitude derivatives have |z| floored at eps; entries excluded from r2
// contribute no angle gradient.
SpectralEval spectral_terms(const ComplexGrid2D& a, const ComplexGrid2D& b,
                            double eps, double lambda2, double lambda3,
                            ComplexGrid2D* gb_out) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::size_t included = 0;
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t q = 0; q < cols; ++q)
      if (std::abs(a(p, q) * b(p, q)) >= eps) ++included;
  if (included == 0)
    throw NumericError(
        "degenerate spectrum: every entry fell below the floor");
  const double n_all = static_cast<double>(rows * cols);
  const double n_inc = static_cast<double>(included);
  SpectralEval ev;
  for (std::size_t p = 0; p < rows; ++p) {
    for (std::size_t q = 0; q < cols; ++q) {
      const std::complex<double> z = a(p, q) * b(p, q);
      const double mag = std::abs(z);
      const double zf = std::max(mag, eps);
      ev.r3 += std::fabs(1.0 - mag) / n_all;
      double gx = -sgn(1.0 - mag) * lambda3 / (n_all * zf) * z.real();
      double gy = -sgn(1.0 - mag) * lambda3 / (n_all * zf) * z.imag();
      if (mag >= eps) {
        const double ang = std::arg(z);
        ev.r2 += std::fabs(ang) / n_inc;
        const double s2 = sgn(ang) * lambda2 / (n_inc * zf * zf);
        gx += s2 * -z.imag();
        gy += s2 * z.real();
      }
      if (gb_out)
        (*gb_out)(p, q) = std::conj(a(p, q)) * std::complex<double>(gx, gy);
    }
  }
  return ev;
}

// Loss components for one kernel (and the drk-space gradient when g_accum
// is given; contributions are added into it so callers can batch).
LossBreakdown loss_terms(const Kernel& k, const Drk& drk,
                         const TrainConfig& cfg, const LossSpectrumMap& mk,
                         const LossSpectrumMap& md, Grid2D* g_accum) {
  LossBreakdown lb;
  const Grid2D e =
      identity_residual(k.grid, drk, cfg.identity_on_padded_output);
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j)
      lb.identity += e(i, j) * e(i, j);
  const double area = drk.sum();
  lb.r1 = std::fabs(1.0 - area);
  const ComplexGrid2D a = mk.forward(k.grid);
  const ComplexGrid2D b = md.forward(drk);
  ComplexGrid2D gb(a.rows(), a.cols());
  const SpectralEval ev =
      spectral_terms(a, b, cfg.epsilon_spec, cfg.lambda2, cfg.lambda3,
                     g_accum ? &gb : nullptr);
  lb.r2 = ev.r2;
  lb.r3 = ev.r3;
  lb.total = lb.identity + cfg.lambda1 * lb.r1 + cfg.lambda2 * lb.r2 +
             cfg.lambda3 * lb.r3;
  if (g_accum) {
    // Identity term: 2 * valid-correlation of the residual with k.
    for (std::size_t m = 0; m < drk.rows(); ++m)
      for (std::size_t n = 0; n < drk.cols(); ++n) {
        double s = 0.0;
        for (std::size_t u = 0; u < k.grid.rows(); ++u)
          for (std::size_t v = 0; v < k.grid.cols(); ++v)
            s += e(m + u, n + v) * k.grid(u, v);
        (*g_accum)(m, n) += 2.0 * s;
      }
    const double g1 = -sgn(1.0 - area) * cfg.lambda1;
    if (g1 != 0.0)
      for (std::size_t m = 0; m < drk.rows(); ++m)
        for (std::size_t n = 0; n < drk.cols(); ++n) (*g_accum)(m, n) += g1;
    const Grid2D gs = md.adjoint(gb);
    for (std::size_t m = 0; m < drk.rows(); ++m)
      for (std::size_t n = 0; n < drk.cols(); ++n)
        (*g_accum)(m, n) += gs(m, n);
  }
  return lb;
}

}  // namespace

void TrainConfig::validate(std::size_t drk_size,
                           std::size_t kernel_size) const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
    throw ContractError("loss weights must be >= 0");
  if (!(learning_rate > 0.0))
    throw ContractError("learning rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ContractError("adam betas must lie in [0, 1)");
  if (batch_size == 0) throw ContractError("batch size must be positive");
  if (!(epsilon_spec > 0.0))
    throw ContractError("spectral floor must be positive");
  if (drk_size % 2 == 0 || kernel_size % 2 == 0)
    throw ContractError("kernel sizes must be odd");
  if (spectrum_rows % 2 == 0 || spectrum_cols % 2 == 0)
    throw ContractError("spectrum dims must be odd");
  const std::size_t full = kernel_size + drk_size - 1;
  if (spectrum_rows < full || spectrum_cols < full)
    throw ContractError("spectrum dims must cover the full convolution");
}

AdamState AdamState::for_model(const Lcnn& model) {
  AdamState st;
  st.first_moment.reserve(model.depth());
  st.second_moment.reserve(model.depth());
  for (const ConvLayer& layer : model.layers()) {
    st.first_moment.emplace_back(layer.taps.size(), 0.0);
    st.second_moment.emplace_back(layer.taps.size(), 0.0);
  }
  return st;
}

LossSpectrumMap::LossSpectrumMap(std::size_t in_rows, std::size_t in_cols,
                                 std::size_t p, std::size_t q)
    : in_rows_(in_rows), in_cols_(in_cols), p_(p), q_(q) {
  if (in_rows == 0 || in_cols == 0 || in_rows % 2 == 0 || in_cols % 2 == 0)
    throw ContractError("spectrum input dims must be odd");
  if (p < in_rows || q < in_cols || p % 2 == 0 || q % 2 == 0)
    throw ContractError("spectrum dims must be odd and cover the input");
  wr_.resize(p * in_rows);
  wc_.resize(q * in_cols);
  const double cr = (static_cast<double>(in_rows) - 1.0) / 2.0;
  const double cc = (static_cast<double>(in_cols) - 1.0) / 2.0;
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t pp = 0; pp < p; ++pp)
    for (std::size_t m = 0; m < in_rows; ++m) {
      const double ang = -tau * static_cast<double>(pp) *
                         (static_cast<double>(m) - cr) / static_cast<double>(p);
      wr_[pp * in_rows + m] = {std::cos(ang), std::sin(ang)};
    }
  for (std::size_t qq = 0; qq < q; ++qq)
    for (std::size_t n = 0; n < in_cols; ++n) {
      const double ang = -tau * static_cast<double>(qq) *
                         (static_cast<double>(n) - cc) / static_cast<double>(q);
      wc_[qq * in_cols + n] = {std::cos(ang), std::sin(ang)};
    }
}

ComplexGrid2D LossSpectrumMap::forward(const Grid2D& g) const {
  if (g.rows() != in_rows_ || g.cols() != in_cols_)
    throw ContractError("spectrum input dims mismatch");
  std::vector<std::complex<double>> partial(p_ * in_cols_);
  for (std::size_t pp = 0; pp < p_; ++pp)
    for (std::size_t n = 0; n < in_cols_; ++n) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t m = 0; m < in_rows_; ++m)
        s += g(m, n) * wr_[pp * in_rows_ + m];
      partial[pp * in_cols_ + n] = s;
    }
  ComplexGrid2D out(p_, q_);
  for (std::size_t pp = 0; pp < p_; ++pp)
    for (std::size_t qq = 0; qq < q_; ++qq) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t n = 0; n < in_cols_; ++n)
        s += partial[pp * in_cols_ + n] * wc_[qq * in_cols_ + n];
      out(pp, qq) = s;
    }
  return out;
}

Grid2D LossSpectrumMap::adjoint(const ComplexGrid2D& gbar) const {
  if (gbar.rows() != p_ || gbar.cols() != q_)
    throw ContractError("spectrum gradient dims mismatch");
  std::vector<std::complex<double>> apart(p_ * in_cols_);
  for (std::size_t pp = 0; pp < p_; ++pp)
    for (std::size_t n = 0; n < in_cols_; ++n) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t qq = 0; qq < q_; ++qq)
        s += gbar(pp, qq) * std::conj(wc_[qq * in_cols_ + n]);
      apart[pp * in_cols_ + n] = s;
    }
  Grid2D out(in_rows_, in_cols_);
  for (std::size_t m = 0; m < in_rows_; ++m)
    for (std::size_t n = 0; n < in_cols_; ++n) {
      double s = 0.0;
      for (std::size_t pp = 0; pp < p_; ++pp) {
        const std::complex<double> w = wr_[pp * in_rows_ + m];
        const std::complex<double> v = apart[pp * in_cols_ + n];
        s += v.real() * w.real() + v.imag() * w.imag();
      }
      out(m, n) = s;
    }
  return out;
}

ComplexGrid2D loss_spectrum(const Grid2D& g, std::size_t p, std::size_t q) {
  return LossSpectrumMap(g.rows(), g.cols(), p, q).forward(g);
}

double identity_loss(const Kernel& k, const Drk& drk, const TrainConfig& cfg) {
  require_odd_square(k.grid, "kernel");
  require_odd_square(drk, "restoration kernel");
  const Grid2D e =
      identity_residual(k.grid, drk, cfg.identity_on_padded_output);
  double s = 0.0;
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j) s += e(i, j) * e(i, j);
  return s;
}

double r1_conv_area(const Drk& drk) { return std::fabs(1.0 - drk.sum()); }

double r2_zero_phase(const Kernel& k, const Drk& drk, const TrainConfig& cfg) {
  require_odd_square(k.grid, "kernel");
  require_odd_square(drk, "restoration kernel");
  const LossSpectrumMap mk(k.grid.rows(), k.grid.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  const LossSpectrumMap md(drk.rows(), drk.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  return spectral_terms(mk.forward(k.grid), md.forward(drk), cfg.epsilon_spec,
                        0.0, 0.0, nullptr)
      .r2;
}

double r3_unit_mag(const Kernel& k, const Drk& drk, const TrainConfig& cfg) {
  require_odd_square(k.grid, "kernel");
  require_odd_square(drk, "restoration kernel");
  const LossSpectrumMap mk(k.grid.rows(), k.grid.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  const LossSpectrumMap md(drk.rows(), drk.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  return spectral_terms(mk.forward(k.grid), md.forward(drk), cfg.epsilon_spec,
                        0.0, 0.0, nullptr)
      .r3;
}

LossBreakdown total_loss(const Lcnn& model, const Kernel& k,
                         const TrainConfig& cfg) {
  const Drk drk = model.extract_drk();
  require_odd_square(k.grid, "kernel");
  cfg.validate(drk.rows(), k.grid.rows());
  const LossSpectrumMap mk(k.grid.rows(), k.grid.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  const LossSpectrumMap md(drk.rows(), drk.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  return loss_terms(k, drk, cfg, mk, md, nullptr);
}

TapGradients gradients(const Lcnn& model, const std::vector<Kernel>& batch,
                       const TrainConfig& cfg, LossBreakdown* mean_loss) {
  if (batch.empty()) throw ContractError("gradient batch is empty");
  const ImpulseCascade cascade = model.impulse_cascade();
  const Drk& drk = cascade.drk();
  require_odd_square(batch.front().grid, "kernel");
  cfg.validate(drk.rows(), batch.front().grid.rows());
  for (const Kernel& k : batch)
    if (k.grid.rows() != batch.front().grid.rows() ||
        k.grid.cols() != batch.front().grid.cols())
      throw ContractError("batch kernels must share dims");
  const LossSpectrumMap mk(batch.front().grid.rows(),
                           batch.front().grid.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);
  const LossSpectrumMap md(drk.rows(), drk.cols(), cfg.spectrum_rows,
                           cfg.spectrum_cols);

  Grid2D g_drk(drk.rows(), drk.cols());
  LossBreakdown acc;
  for (const Kernel& k : batch) {
    const LossBreakdown lb = loss_terms(k, drk, cfg, mk, md, &g_drk);
    acc.identity += lb.identity;
    acc.r1 += lb.r1;
    acc.r2 += lb.r2;
    acc.r3 += lb.r3;
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  acc.identity *= inv_b;
  acc.r1 *= inv_b;
  acc.r2 *= inv_b;
  acc.r3 *= inv_b;
  acc.total = acc.identity + cfg.lambda1 * acc.r1 + cfg.lambda2 * acc.r2 +
              cfg.lambda3 * acc.r3;
  for (std::size_t m = 0; m < g_drk.rows(); ++m)
    for (std::size_t n = 0; n < g_drk.cols(); ++n) g_drk(m, n) *= inv_b;

  // Push the drk-space gradient back through the impulse cascade. For each
  // layer the tap gradient correlates the downstream gradient with the
  // upstream response; the upstream gradient correlates it with the taps.
  TapGradients grads(model.depth());
  std::vector<Grid2D> g_cur{std::move(g_drk)};
  for (std::size_t l = model.depth(); l >= 1; --l) {
    const ConvLayer& layer = model.layers()[l - 1];
    const std::vector<Grid2D>& h_prev = cascade.stacks[l - 1];
    grads[l - 1].assign(layer.taps.size(), 0.0);
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
      const Grid2D& go = g_cur[o];
      for (std::size_t i = 0; i < layer.in_channels; ++i) {
        const Grid2D& h = h_prev[i];
        for (std::size_t u = 0; u < 3; ++u)
          for (std::size_t v = 0; v < 3; ++v) {
            double s = 0.0;
            for (std::size_t m = 0; m < h.rows(); ++m)
              for (std::size_t n = 0; n < h.cols(); ++n)
                s += go(m + u, n + v) * h(m, n);
            grads[l - 1][((o * layer.in_channels + i) * 3 + u) * 3 + v] = s;
          }
      }
    }
    if (l > 1) {
      std::vector<Grid2D> g_prev;
      g_prev.reserve(layer.in_channels);
      const std::size_t pr = h_prev.front().rows();
      const std::size_t pc = h_prev.front().cols();
      for (std::size_t i = 0; i < layer.in_channels; ++i) {
        Grid2D gp(pr, pc);
        for (std::size_t m = 0; m < pr; ++m)
          for (std::size_t n = 0; n < pc; ++n) {
            double s = 0.0;
            for (std::size_t o = 0; o < layer.out_channels; ++o)
              for (std::size_t u = 0; u < 3; ++u)
                for (std::size_t v = 0; v < 3; ++v)
                  s += g_cur[o](m + u, n + v) * layer.tap(o, i, u, v);
            gp(m, n) = s;
          }
        g_prev.push_back(std::move(gp));
      }
      g_cur = std::move(g_prev);
    }
  }
  for (std::size_t l = 0; l < grads.size(); ++l)
    for (std::size_t t = 0; t < grads[l].size(); ++t)
      if (!std::isfinite(grads[l][t]))
        throw NumericError("non-finite gradient at layer " +
                           std::to_string(l + 1) + ", tap " +
                           std::to_string(t));
  if (mean_loss) *mean_loss = acc;
  return grads;
}

void adam_step(Lcnn& model, const TapGradients& grads, AdamState& state,
               const TrainConfig& cfg) {
  if (grads.size() != model.depth() ||
      state.first_moment.size() != model.depth() ||
      state.second_moment.size() != model.depth())
    throw ContractError("optimizer shapes do not match the model");
  for (std::size_t l = 0; l < model.depth(); ++l) {
    const std::size_t n = model.layers()[l].taps.size();
    if (grads[l].size() != n || state.first_moment[l].size() != n ||
        state.second_moment[l].size() != n)
      throw ContractError("optimizer shapes do not match the model");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t l = 0; l < model.depth(); ++l) {
    std::vector<double>& taps = model.layers()[l].taps;
    std::vector<double>& m1 = state.first_moment[l];
    std::vector<double>& m2 = state.second_moment[l];
    const std::vector<double>& g = grads[l];
    for (std::size_t j = 0; j < taps.size(); ++j) {
      m1[j] = cfg.beta1 * m1[j] + (1.0 - cfg.beta1) * g[j];
      m2[j] = cfg.beta2 * m2[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m1[j] / bc1;
      const double vhat = m2[j] / bc2;
      taps[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
    }
  }
}

TrainResult train(Lcnn model, const RkgDataset& rkg, const TrainConfig& cfg) {
  if (rkg.kernels.empty()) throw ContractError("gallery is empty");
  cfg.validate(model.drk_size(), rkg.kernel_size());
  TrainResult res{model, {}, false};
  AdamState state = AdamState::for_model(model);
  std::vector<std::size_t> order(rkg.kernels.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(cfg.seed);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    LossBreakdown esum;
    std::size_t seen = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      std::vector<Kernel> batch;
      batch.reserve(b1 - b0);
      for (std::size_t i = b0; i < b1; ++i)
        batch.push_back(rkg.kernels[order[i]]);
      LossBreakdown bl;
      TapGradients g;
      try {
        g = gradients(model, batch, cfg, &bl);
      } catch (const NumericError& e) {
        log_info(std::string("training aborted: ") + e.what());
        res.aborted = true;
        return res;
      }
      if (!std::isfinite(bl.total)) {
        log_info("training aborted: non-finite batch loss");
        res.aborted = true;
        return res;
      }
      const double w = static_cast<double>(b1 - b0);
      esum.identity += bl.identity * w;
      esum.r1 += bl.r1 * w;
      esum.r2 += bl.r2 * w;
      esum.r3 += bl.r3 * w;
      seen += b1 - b0;
      adam_step(model, g, state, cfg);
    }
    LossBreakdown em;
    em.identity = esum.identity / static_cast<double>(seen);
    em.r1 = esum.r1 / static_cast<double>(seen);
    em.r2 = esum.r2 / static_cast<double>(seen);
    em.r3 = esum.r3 / static_cast<double>(seen);
    em.total = em.identity + cfg.lambda1 * em.r1 + cfg.lambda2 * em.r2 +
               cfg.lambda3 * em.r3;
    res.history.push_back(em);
    res.model = model;
    log_debug("epoch " + std::to_string(epoch + 1) + " mean total loss " +
              std::to_string(em.total));
  }
  return res;
}

void write_loss_history_csv(const std::vector<LossBreakdown>& history,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,identity,r1,r2,r3,total\n";
  char line[512];
  for (std::size_t i = 0; i < history.size(); ++i) {
    const LossBreakdown& lb = history[i];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  i + 1, lb.identity, lb.r1, lb.r2, lb.r3, lb.total);
    out << line;
  }
  if (!out) throw IoError("short write: " + path);
}

}  // namespace nsd
