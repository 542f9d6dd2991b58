#ifndef NSD_METRICS_HPP
#define NSD_METRICS_HPP

#include "nsd/image.hpp"

namespace nsd {

// 10*log10(peak^2 / MSE) with the MSE taken over all channels; identical
// images report the documented 100 dB cap.
double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean SSIM over all fully-valid 11x11 windows (Gaussian weights,
// sigma 1.5), C1=(0.01*peak)^2, C2=(0.03*peak)^2, computed on luminance.
double ssim(const Image& a, const Image& b);

}  // namespace nsd

#endif  // NSD_METRICS_HPP
