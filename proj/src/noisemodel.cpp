#include "burstsched/noisemodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "burstsched/image.hpp"
#include "burstsched/rng.hpp"

namespace burstsched {

double shot_noise_param(double gain, const NoiseCalibration& calib) {
    require(gain > 0.0, "shot_noise_param: gain must be positive");
    return calib.shot_slope * gain + calib.shot_intercept;
}

double read_noise_param(double lambda_shot, const NoiseCalibration& calib) {
    require(lambda_shot > 0.0, "read_noise_param: lambda_shot must be positive");
    return std::exp(calib.read_slope * std::log(lambda_shot) + calib.read_intercept);
}

NoiseParams noise_params_for_gain(double gain, const NoiseCalibration& calib) {
    NoiseParams np;
    np.lambda_shot = shot_noise_param(gain, calib);
    np.lambda_read = read_noise_param(np.lambda_shot, calib);
    return np;
}

NoiseField sample_noise_field(int width, int height, std::uint64_t seed) {
    NoiseField field(width, height);
    NormalSampler sampler(seed);
    for (double& z : field.z) z = sampler();
    return field;
}

std::vector<double> apply_noise(std::span<const double> signal, double gain,
                                const NoiseParams& np, std::span<const double> z) {
    require(signal.size() == z.size(), "apply_noise: signal/Z size mismatch");
    std::vector<double> out(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        require(signal[i] >= 0.0, "apply_noise: signal must be non-negative");
        const double var = std::max(np.lambda_read + np.lambda_shot * signal[i], kVarianceFloor);
        out[i] = signal[i] + gain * std::sqrt(var) * z[i];
    }
    return out;
}

}  // namespace burstsched
