#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace burstsched {

/// Gain -> noise-parameter calibration; values overridable via configuration.
struct NoiseCalibration {
    double shot_slope = 9.2857e-07;
    double shot_intercept = 8.1006e-05;
    double read_slope = 2.2282;
    double read_intercept = 0.45982;
};

/// Heteroscedastic Gaussian variance coefficients in normalized-intensity^2
/// units: pixel variance is g^2 * (lambda_read + lambda_shot * S).
struct NoiseParams {
    double lambda_shot = 0.0;
    double lambda_read = 0.0;
};

/// Floor applied to lambda_read + lambda_shot*S before the square root so the
/// gradient stays finite.
inline constexpr double kVarianceFloor = 1e-12;

/// lambda_shot = shot_slope * g + shot_intercept.
double shot_noise_param(double gain, const NoiseCalibration& calib = {});

/// ln(lambda_read) = read_slope * ln(lambda_shot) + read_intercept.
double read_noise_param(double lambda_shot, const NoiseCalibration& calib = {});

NoiseParams noise_params_for_gain(double gain, const NoiseCalibration& calib = {});

/// Per-pixel standard normal draws, fixed once per seed so exposure gradients
/// flow through a deterministic function (reparameterization trick).
struct NoiseField {
    int width = 0;
    int height = 0;
    std::vector<double> z;

    NoiseField() = default;
    NoiseField(int w, int h) : width(w), height(h), z(static_cast<std::size_t>(w) * h, 0.0) {}
};

NoiseField sample_noise_field(int width, int height, std::uint64_t seed);

/// S + g * sqrt(lambda_read + lambda_shot * S) * Z. The gain amplifies only
/// the noise; the signal is left untouched.
std::vector<double> apply_noise(std::span<const double> signal, double gain,
                                const NoiseParams& np, std::span<const double> z);

}  // namespace burstsched
