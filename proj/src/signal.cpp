#include "nsd/signal.hpp"

#include <algorithm>
#include <cmath>

namespace nsd {

namespace {

constexpr std::size_t kMaxDim = 65535;  // per-axis guard for size arithmetic
constexpr double kPi = 3.14159265358979323846;

// Reflected index with edge repetition: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

Grid2D conv2d_full(const Grid2D& a, const Grid2D& b) {
  if (a.empty() || b.empty()) throw ContractError("conv2d_full: empty input");
  const std::size_t out_r = a.rows() + b.rows() - 1;
  const std::size_t out_c = a.cols() + b.cols() - 1;
  if (out_r > kMaxDim || out_c > kMaxDim)
    throw ContractError("conv2d_full: output dimensions too large");

  Grid2D out(out_r, out_c);
  for (std::size_t m = 0; m < a.rows(); ++m) {
    for (std::size_t u = 0; u < b.rows(); ++u) {
      double* orow = out.data().data() + (m + u) * out.cols();
      const double* brow = b.data().data() + u * b.cols();
      for (std::size_t n = 0; n < a.cols(); ++n) {
        const double av = a(m, n);
        if (av == 0.0) continue;
        for (std::size_t v = 0; v < b.cols(); ++v) {
          orow[n + v] += av * brow[v];
        }
      }
    }
  }
  return out;
}

Grid2D conv2d_same(const Grid2D& input, const Grid2D& kernel, PadMode pad) {
  if (input.empty() || kernel.empty())
    throw ContractError("conv2d_same: empty input");
  if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0)
    throw ContractError("conv2d_same: kernel dimensions must be odd");

  const std::ptrdiff_t kr = static_cast<std::ptrdiff_t>(kernel.rows());
  const std::ptrdiff_t kc = static_cast<std::ptrdiff_t>(kernel.cols());
  const std::ptrdiff_t cr = (kr - 1) / 2;
  const std::ptrdiff_t cc = (kc - 1) / 2;
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(input.rows());
  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(input.cols());

  Grid2D out(input.rows(), input.cols());
  for (std::ptrdiff_t i = 0; i < nr; ++i) {
    for (std::ptrdiff_t j = 0; j < nc; ++j) {
      double acc = 0.0;
      // True convolution: out(i,j) = sum_k kernel(u,v) * in(i - (u-cr), j - (v-cc))
      for (std::ptrdiff_t u = 0; u < kr; ++u) {
        const std::ptrdiff_t si = i - (u - cr);
        std::ptrdiff_t ri = si;
        if (si < 0 || si >= nr) {
          if (pad == PadMode::zero) continue;
          ri = reflect_index(si, nr);
        }
        for (std::ptrdiff_t v = 0; v < kc; ++v) {
          const std::ptrdiff_t sj = j - (v - cc);
          std::ptrdiff_t rj = sj;
          if (sj < 0 || sj >= nc) {
            if (pad == PadMode::zero) continue;
            rj = reflect_index(sj, nc);
          }
          acc += kernel(u, v) * input(ri, rj);
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Grid2D make_impulse(std::size_t rows, std::size_t cols,
                    ImpulsePlacement placement) {
  if (rows == 0 || cols == 0) throw ContractError("make_impulse: zero dims");
  Grid2D g(rows, cols);
  if (placement == ImpulsePlacement::center) {
    if (rows % 2 == 0 || cols % 2 == 0)
      throw ContractError("make_impulse: center placement needs odd dims");
    g((rows - 1) / 2, (cols - 1) / 2) = 1.0;
  } else {
    g(0, 0) = 1.0;
  }
  return g;
}

ComplexGrid2D dft2d(const Grid2D& g, std::size_t out_rows,
                    std::size_t out_cols) {
  if (out_rows < g.rows() || out_cols < g.cols())
    throw ContractError("dft2d: output dims smaller than input");

  // Row-column decomposition of the direct transform.
  const std::size_t R = out_rows, C = out_cols;
  std::vector<std::complex<double>> wc(C * g.cols());
  for (std::size_t q = 0; q < C; ++q)
    for (std::size_t n = 0; n < g.cols(); ++n)
      wc[q * g.cols() + n] =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(q) *
                              static_cast<double>(n) / static_cast<double>(C));

  // partial(m, q) = sum_n g(m,n) wc(q,n)
  std::vector<std::complex<double>> partial(g.rows() * C);
  for (std::size_t m = 0; m < g.rows(); ++m) {
    for (std::size_t q = 0; q < C; ++q) {
      std::complex<double> acc(0.0, 0.0);
      const std::complex<double>* w = &wc[q * g.cols()];
      for (std::size_t n = 0; n < g.cols(); ++n) acc += g(m, n) * w[n];
      partial[m * C + q] = acc;
    }
  }

  ComplexGrid2D out(R, C);
  for (std::size_t p = 0; p < R; ++p) {
    for (std::size_t m = 0; m < g.rows(); ++m) {
      const std::complex<double> wr =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(p) *
                              static_cast<double>(m) / static_cast<double>(R));
      const std::complex<double>* prow = &partial[m * C];
      for (std::size_t q = 0; q < C; ++q) out(p, q) += wr * prow[q];
    }
  }
  return out;
}

ComplexGrid2D idft2d(const ComplexGrid2D& c) {
  // idft(X) = conj(dft(conj(X))) / (R*C), evaluated with the same
  // row-column scheme.
  const std::size_t R = c.rows(), C = c.cols();
  std::vector<std::complex<double>> partial(R * C);
  for (std::size_t m = 0; m < R; ++m) {
    for (std::size_t q = 0; q < C; ++q) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t n = 0; n < C; ++n) {
        const std::complex<double> w =
            std::polar(1.0, 2.0 * kPi * static_cast<double>(q) *
                                static_cast<double>(n) / static_cast<double>(C));
        acc += c(m, n) * w;
      }
      partial[m * C + q] = acc;
    }
  }
  ComplexGrid2D out(R, C);
  const double scale = 1.0 / (static_cast<double>(R) * static_cast<double>(C));
  for (std::size_t p = 0; p < R; ++p) {
    for (std::size_t q = 0; q < C; ++q) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t m = 0; m < R; ++m) {
        const std::complex<double> w =
            std::polar(1.0, 2.0 * kPi * static_cast<double>(p) *
                                static_cast<double>(m) / static_cast<double>(R));
        acc += partial[m * C + q] * w;
      }
      out(p, q) = acc * scale;
    }
  }
  return out;
}

Grid2D magnitude(const ComplexGrid2D& c) {
  Grid2D out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.size(); ++i) out.data()[i] = std::abs(c.data()[i]);
  return out;
}

Grid2D phase(const ComplexGrid2D& c) {
  Grid2D out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.size(); ++i) {
    double a = std::arg(c.data()[i]);
    if (a <= -kPi) a = kPi;  // principal value in (-pi, pi]
    out.data()[i] = a;
  }
  return out;
}

Grid2D circular_shift_to_origin(const Grid2D& g, std::size_t dr,
                                std::size_t dc) {
  Grid2D out(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const std::size_t si = (i + dr) % g.rows();
    for (std::size_t j = 0; j < g.cols(); ++j) {
      out(i, j) = g(si, (j + dc) % g.cols());
    }
  }
  return out;
}

Grid2D center_shift_to_origin(const Grid2D& g) {
  if (g.rows() % 2 == 0 || g.cols() % 2 == 0)
    throw ContractError("center_shift_to_origin: dims must be odd");
  return circular_shift_to_origin(g, (g.rows() - 1) / 2, (g.cols() - 1) / 2);
}

Grid2D center_shift_from_origin(const Grid2D& g) {
  if (g.rows() % 2 == 0 || g.cols() % 2 == 0)
    throw ContractError("center_shift_from_origin: dims must be odd");
  return circular_shift_to_origin(g, (g.rows() + 1) / 2, (g.cols() + 1) / 2);
}

Grid2D embed_centered(const Grid2D& g, std::size_t rows, std::size_t cols) {
  if (rows % 2 == 0 || cols % 2 == 0 || g.rows() % 2 == 0 || g.cols() % 2 == 0)
    throw ContractError("embed_centered: dims must be odd");
  if (rows < g.rows() || cols < g.cols())
    throw ContractError("embed_centered: target smaller than input");
  Grid2D out(rows, cols);
  const std::size_t r0 = (rows - g.rows()) / 2;
  const std::size_t c0 = (cols - g.cols()) / 2;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out(r0 + i, c0 + j) = g(i, j);
  return out;
}

Grid2D pad_extend(const Grid2D& g, std::size_t margin, PadMode pad) {
  const std::size_t rows = g.rows() + 2 * margin;
  const std::size_t cols = g.cols() + 2 * margin;
  if (rows > kMaxDim || cols > kMaxDim)
    throw ContractError("pad_extend: output dimensions too large");
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(g.rows());
  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(g.cols());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(margin);
  Grid2D out(rows, cols);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    const std::ptrdiff_t si = i - m;
    const bool row_in = si >= 0 && si < nr;
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(cols); ++j) {
      const std::ptrdiff_t sj = j - m;
      if (row_in && sj >= 0 && sj < nc) {
        out(i, j) = g(si, sj);
      } else if (pad == PadMode::reflect) {
        out(i, j) = g(reflect_index(si, nr), reflect_index(sj, nc));
      }
    }
  }
  return out;
}

namespace {

// Catmull-Rom weight, a = -0.5.
double cubic_weight(double x) {
  const double a = -0.5;
  x = std::fabs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

std::vector<double> resample_axis_positions(std::size_t out_n, double scale) {
  std::vector<double> pos(out_n);
  for (std::size_t j = 0; j < out_n; ++j)
    pos[j] = (static_cast<double>(j) + 0.5) / scale - 0.5;
  return pos;
}

}  // namespace

Grid2D bicubic_resize(const Grid2D& img, double scale) {
  if (!(scale > 0.0)) throw ContractError("bicubic_resize: scale must be > 0");
  const std::size_t out_r =
      static_cast<std::size_t>(std::llround(scale * static_cast<double>(img.rows())));
  const std::size_t out_c =
      static_cast<std::size_t>(std::llround(scale * static_cast<double>(img.cols())));
  if (out_r == 0 || out_c == 0)
    throw ContractError("bicubic_resize: output dimension is zero");
  if (out_r > kMaxDim || out_c > kMaxDim)
    throw ContractError("bicubic_resize: output dimensions too large");

  const auto rpos = resample_axis_positions(out_r, scale);
  const auto cpos = resample_axis_positions(out_c, scale);
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(img.rows());
  const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(img.cols());

  // Horizontal pass, then vertical.
  Grid2D tmp(img.rows(), out_c);
  for (std::size_t i = 0; i < img.rows(); ++i) {
    for (std::size_t j = 0; j < out_c; ++j) {
      const double s = cpos[j];
      const std::ptrdiff_t j0 = static_cast<std::ptrdiff_t>(std::floor(s));
      double acc = 0.0;
      for (std::ptrdiff_t t = -1; t <= 2; ++t) {
        const std::ptrdiff_t jc = std::clamp<std::ptrdiff_t>(j0 + t, 0, nc - 1);
        acc += cubic_weight(s - static_cast<double>(j0 + t)) * img(i, jc);
      }
      tmp(i, j) = acc;
    }
  }
  Grid2D out(out_r, out_c);
  for (std::size_t i = 0; i < out_r; ++i) {
    const double s = rpos[i];
    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(std::floor(s));
    for (std::size_t j = 0; j < out_c; ++j) {
      double acc = 0.0;
      for (std::ptrdiff_t t = -1; t <= 2; ++t) {
        const std::ptrdiff_t ic = std::clamp<std::ptrdiff_t>(i0 + t, 0, nr - 1);
        acc += cubic_weight(s - static_cast<double>(i0 + t)) * tmp(ic, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace nsd
