#ifndef NSD_SIGNAL_HPP
#define NSD_SIGNAL_HPP

#include "nsd/grid.hpp"

namespace nsd {

enum class PadMode { zero, reflect };

// Linear (full) 2-D convolution: output is (ar+br-1) x (ac+bc-1).
Grid2D conv2d_full(const Grid2D& a, const Grid2D& b);

// Same-size convolution with an odd-dimensioned kernel; the input is
// extended with zeros or by edge-including reflection.
Grid2D conv2d_same(const Grid2D& input, const Grid2D& kernel, PadMode pad);

enum class ImpulsePlacement { center, origin };

// Single unit entry at the geometric center (odd dims required) or at (0,0).
Grid2D make_impulse(std::size_t rows, std::size_t cols,
                    ImpulsePlacement placement);

// 2-D DFT of g zero-padded to (out_rows, out_cols), negative-exponent
// convention: X(p,q) = sum_{m,n} g(m,n) exp(-j 2 pi (p m / R + q n / C)).
ComplexGrid2D dft2d(const Grid2D& g, std::size_t out_rows,
                    std::size_t out_cols);

// Inverse of dft2d at the same dimensions.
ComplexGrid2D idft2d(const ComplexGrid2D& c);

Grid2D magnitude(const ComplexGrid2D& c);

// Principal-value angle in (-pi, pi].
Grid2D phase(const ComplexGrid2D& c);

// Circular shift of an odd-dimensioned grid so the geometric center lands
// at (0,0). A centered symmetric kernel becomes zero-phase.
Grid2D center_shift_to_origin(const Grid2D& g);

// Inverse of center_shift_to_origin.
Grid2D center_shift_from_origin(const Grid2D& g);

// Circular shift moving entry (dr, dc) to (0,0); any dims.
Grid2D circular_shift_to_origin(const Grid2D& g, std::size_t dr,
                                std::size_t dc);

// Copies g into a rows x cols zero grid so both centers coincide.
// Requires odd dims on both grids and g no larger than the target.
Grid2D embed_centered(const Grid2D& g, std::size_t rows, std::size_t cols);

// Extends g by `margin` pixels on every side, filling with zeros or by the
// same edge-including reflection rule conv2d_same uses.
Grid2D pad_extend(const Grid2D& g, std::size_t margin, PadMode pad);

// Catmull-Rom bicubic resampling (a = -0.5), pixel-center alignment,
// clamped edges. Output dims are round(scale * input dims).
Grid2D bicubic_resize(const Grid2D& img, double scale);

}  // namespace nsd

#endif  // NSD_SIGNAL_HPP
