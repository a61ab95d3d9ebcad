#pragma once

#include "burstsched/image.hpp"

namespace burstsched {

struct MotionEstimate {
    double dx = 0.0;  // full-resolution pixels, current relative to previous
    double dy = 0.0;
    double magnitude = 0.0;
};

/// Single global translation between the two previews: demosaic, luminance,
/// box-downsample, exhaustive integer-shift search over [-max_shift, max_shift]^2
/// minimizing mean absolute difference, then parabolic sub-pixel refinement.
/// The shift is rescaled to full resolution.
MotionEstimate estimate_translation(const BayerFrame& current, const BayerFrame& previous,
                                    int downsample = 4, int max_shift = 20);

/// Euclidean magnitude of the estimated translation (the scalar m_p fed to the
/// schedule predictor inputs).
double motion_magnitude(const BayerFrame& current, const BayerFrame& previous,
                        int downsample = 4, int max_shift = 20);

}  // namespace burstsched
