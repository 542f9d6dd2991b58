#ifndef NSD_RESTORE_HPP
#define NSD_RESTORE_HPP

#include "nsd/gallery.hpp"
#include "nsd/image.hpp"
#include "nsd/lcnn.hpp"
#include "nsd/signal.hpp"

namespace nsd {

// Per-channel same-size convolution with the restoration kernel; output
// clipped to [0,1]. Reflect padding avoids dark halos at the frame.
Image deblur_with_drk(const Image& img, const Drk& drk,
                      PadMode pad = PadMode::reflect);

// Runs the network itself. The image is pre-extended by the composite
// radius under the requested pad mode, so the result matches the DRK path
// everywhere, border included.
Image deblur_with_model(const Image& img, const Lcnn& model,
                        PadMode pad = PadMode::reflect);

// Bicubic upsample by `scale`, then the deblur path.
Image super_resolve(const Image& img, double scale, const Drk& drk,
                    PadMode pad = PadMode::reflect);
Image super_resolve(const Image& img, double scale, const Lcnn& model,
                    PadMode pad = PadMode::reflect);

// Classical frequency-domain baseline: multiply by conj(K)/(|K|^2 + nsr)
// on a zero-padded grid with the kernel center at the origin. nsr = 0 is
// the exact inverse and requires a spectrum bounded away from zero.
Image wiener_deconvolve(const Image& img, const Kernel& k, double nsr);

}  // namespace nsd

#endif  // NSD_RESTORE_HPP
