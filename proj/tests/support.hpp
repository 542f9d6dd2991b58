#ifndef NSD_TESTS_SUPPORT_HPP
#define NSD_TESTS_SUPPORT_HPP

// Shared oracles and fixtures. The oracles are deliberately naive
// re-implementations (gather loops, literal DFT sums) so they share no
// code path with the library under test.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsd/dil.hpp"
#include "nsd/grid.hpp"
#include "nsd/image.hpp"
#include "nsd/lcnn.hpp"
#include "nsd/rng.hpp"

namespace testutil {

constexpr double kPi = 3.14159265358979323846;

// Gather-form full convolution: out[i,j] = sum a[m,n] b[i-m, j-n].
inline nsd::Grid2D oracle_conv_full(const nsd::Grid2D& a,
                                    const nsd::Grid2D& b) {
  const std::size_t R = a.rows() + b.rows() - 1;
  const std::size_t C = a.cols() + b.cols() - 1;
  nsd::Grid2D out(R, C);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < a.rows(); ++m)
        for (std::size_t n = 0; n < a.cols(); ++n) {
          if (i < m || j < n) continue;
          const std::size_t u = i - m, v = j - n;
          if (u >= b.rows() || v >= b.cols()) continue;
          s += a(m, n) * b(u, v);
        }
      out(i, j) = s;
    }
  return out;
}

// Literal DFT sum, negative exponent, zero-padding implied by index range.
inline nsd::ComplexGrid2D oracle_dft(const nsd::Grid2D& g, std::size_t R,
                                     std::size_t C) {
  nsd::ComplexGrid2D out(R, C);
  for (std::size_t p = 0; p < R; ++p)
    for (std::size_t q = 0; q < C; ++q) {
      std::complex<double> s = 0.0;
      for (std::size_t m = 0; m < g.rows(); ++m)
        for (std::size_t n = 0; n < g.cols(); ++n) {
          const double ang =
              -2.0 * kPi *
              (static_cast<double>(p) * static_cast<double>(m) /
                   static_cast<double>(R) +
               static_cast<double>(q) * static_cast<double>(n) /
                   static_cast<double>(C));
          s += g(m, n) * std::polar(1.0, ang);
        }
      out(p, q) = s;
    }
  return out;
}

// Spectrum of a centered kernel on a (P,Q) circular grid with its center
// moved to the origin, straight from the definition.
inline nsd::ComplexGrid2D oracle_centered_spectrum(const nsd::Grid2D& g,
                                                   std::size_t P,
                                                   std::size_t Q) {
  const double cr = (static_cast<double>(g.rows()) - 1.0) / 2.0;
  const double cc = (static_cast<double>(g.cols()) - 1.0) / 2.0;
  nsd::ComplexGrid2D out(P, Q);
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = 0; q < Q; ++q) {
      std::complex<double> s = 0.0;
      for (std::size_t m = 0; m < g.rows(); ++m)
        for (std::size_t n = 0; n < g.cols(); ++n) {
          const double ang =
              -2.0 * kPi *
              (static_cast<double>(p) * (static_cast<double>(m) - cr) /
                   static_cast<double>(P) +
               static_cast<double>(q) * (static_cast<double>(n) - cc) /
                   static_cast<double>(Q));
          s += g(m, n) * std::polar(1.0, ang);
        }
      out(p, q) = s;
    }
  return out;
}

inline double max_abs_diff(const nsd::Grid2D& a, const nsd::Grid2D& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::runtime_error("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

inline nsd::Grid2D random_grid(nsd::Rng& rng, std::size_t rows,
                               std::size_t cols, double lo = -1.0,
                               double hi = 1.0) {
  nsd::Grid2D g(rows, cols);
  for (double& v : g.data()) v = rng.uniform(lo, hi);
  return g;
}

// Central finite differences of the batch-mean total loss w.r.t. one tap.
inline double fd_tap_gradient(nsd::Lcnn model,
                              const std::vector<nsd::Kernel>& batch,
                              const nsd::TrainConfig& cfg, std::size_t layer,
                              std::size_t tap, double h) {
  auto mean_total = [&](const nsd::Lcnn& m) {
    double s = 0.0;
    for (const nsd::Kernel& k : batch) s += nsd::total_loss(m, k, cfg).total;
    return s / static_cast<double>(batch.size());
  };
  const double orig = model.layers()[layer].taps[tap];
  model.layers()[layer].taps[tap] = orig + h;
  const double up = mean_total(model);
  model.layers()[layer].taps[tap] = orig - h;
  const double dn = mean_total(model);
  model.layers()[layer].taps[tap] = orig;
  return (up - dn) / (2.0 * h);
}

// Worst-tap disagreement between analytic and finite-difference gradients.
// Relative where the finite difference is resolvable, absolute below that.
struct GradCheck {
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  std::size_t checked = 0;
};

inline GradCheck grad_check(const nsd::Lcnn& model,
                            const std::vector<nsd::Kernel>& batch,
                            const nsd::TrainConfig& cfg, double h = 1e-6) {
  const nsd::TapGradients g = nsd::gradients(model, batch, cfg);
  GradCheck res;
  for (std::size_t l = 0; l < model.depth(); ++l)
    for (std::size_t t = 0; t < g[l].size(); ++t) {
      const double fd = fd_tap_gradient(model, batch, cfg, l, t, h);
      const double diff = std::fabs(g[l][t] - fd);
      const double scale = std::max(std::fabs(fd), std::fabs(g[l][t]));
      res.worst_abs = std::max(res.worst_abs, diff);
      if (scale > 1e-6) res.worst_rel = std::max(res.worst_rel, diff / scale);
      ++res.checked;
    }
  return res;
}

// Textured synthetic photo stand-in: smooth gradient + two sinusoid fields
// + hard-edged rectangles and disks, geometry shared across channels.
inline nsd::Image make_test_image(std::uint64_t seed, std::size_t rows,
                                  std::size_t cols) {
  nsd::Rng rng(seed);
  const double fr1 = rng.uniform(0.03, 0.12), fc1 = rng.uniform(0.03, 0.12);
  const double fr2 = rng.uniform(0.15, 0.35), fc2 = rng.uniform(0.15, 0.35);
  const double ph1 = rng.uniform(0.0, 2.0 * kPi);
  const double ph2 = rng.uniform(0.0, 2.0 * kPi);
  const double gr = rng.uniform(-0.25, 0.25), gc = rng.uniform(-0.25, 0.25);

  struct Shape {
    bool disk;
    double r0, c0, r1, c1, amp;
  };
  std::vector<Shape> shapes;
  for (int s = 0; s < 14; ++s) {
    Shape sh;
    sh.disk = rng.uniform() < 0.5;
    sh.r0 = rng.uniform(0.0, static_cast<double>(rows));
    sh.c0 = rng.uniform(0.0, static_cast<double>(cols));
    if (sh.disk) {
      sh.r1 = rng.uniform(3.0, static_cast<double>(rows) / 5.0);  // radius
      sh.c1 = 0.0;
    } else {
      sh.r1 = sh.r0 + rng.uniform(4.0, static_cast<double>(rows) / 3.0);
      sh.c1 = sh.c0 + rng.uniform(4.0, static_cast<double>(cols) / 3.0);
    }
    sh.amp = rng.uniform(-0.35, 0.35);
    shapes.push_back(sh);
  }
  double gain[3][2];
  for (int ch = 0; ch < 3; ++ch) {
    gain[ch][0] = rng.uniform(0.6, 1.0);   // shape gain
    gain[ch][1] = rng.uniform(-0.06, 0.06);  // channel offset
  }

  std::vector<nsd::Grid2D> planes;
  for (int ch = 0; ch < 3; ++ch) {
    nsd::Grid2D p(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const double fi = static_cast<double>(i), fj = static_cast<double>(j);
        double v = 0.5 + gain[ch][1];
        v += gr * (fi / static_cast<double>(rows) - 0.5) +
             gc * (fj / static_cast<double>(cols) - 0.5);
        v += 0.12 * std::sin(2.0 * kPi * (fr1 * fi + fc1 * fj) + ph1);
        v += 0.07 * std::sin(2.0 * kPi * (fr2 * fi + fc2 * fj) + ph2);
        for (const Shape& sh : shapes) {
          bool inside;
          if (sh.disk) {
            const double dr = fi - sh.r0, dc = fj - sh.c0;
            inside = dr * dr + dc * dc <= sh.r1 * sh.r1;
          } else {
            inside = fi >= sh.r0 && fi <= sh.r1 && fj >= sh.c0 && fj <= sh.c1;
          }
          if (inside) v += sh.amp * gain[ch][0];
        }
        p(i, j) = std::clamp(v, 0.02, 0.98);
      }
    planes.push_back(std::move(p));
  }
  return nsd::Image(std::move(planes));
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("cannot write " + path);
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    for (int tries = 0; tries < 100; ++tries) {
      auto candidate =
          base / ("nsd_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create a scratch directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

#ifdef NSD_CLI_PATH
struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary through the shell, capturing both streams.
inline CliResult run_cli(const std::string& args, const TempDir& dir,
                         const std::string& log_level = "quiet") {
  static std::atomic<unsigned> counter{0};
  const unsigned id = counter.fetch_add(1);
  const std::string out_path = dir.file("stdout_" + std::to_string(id));
  const std::string err_path = dir.file("stderr_" + std::to_string(id));
  const std::string cmd = "NSD_LOG=" + log_level + " '" +
                          std::string(NSD_CLI_PATH) + "' " + args + " > '" +
                          out_path + "' 2> '" + err_path + "'";
  const int rc = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = read_file(out_path);
  res.err = read_file(err_path);
  return res;
}
#endif  // NSD_CLI_PATH

}  // namespace testutil

#endif  // NSD_TESTS_SUPPORT_HPP
