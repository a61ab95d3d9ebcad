#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstsched/core.hpp"
#include "burstsched/image.hpp"
#include "burstsched/noisemodel.hpp"

namespace burstsched {

struct IoError : std::runtime_error {
    enum class Kind { bad_magic, truncated, non_finite, bad_value, io_failure };
    Kind kind;
    IoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

/// RADSEQ1 container: magic "RADSEQ1\n", little-endian u32 width, u32 height,
/// u32 frame_count, f64 e_s seconds, then frame_count x 3 planes (R, G, B) of
/// width*height f32 row-major. Headers are fixed-endian regardless of host.
void write_radseq(const std::filesystem::path& path, const RadianceSequence& seq);
RadianceSequence read_radseq(const std::filesystem::path& path);

/// BAYER1 container: magic "BAYER1\n\0", u32 width, u32 height, f64 exposure_s,
/// f64 gain, f64 t_start_s, f64 t_end_s, then width*height f32 row-major.
void write_bayer(const std::filesystem::path& path, const BayerFrame& frame);
BayerFrame read_bayer(const std::filesystem::path& path);

/// 8/16-bit PNGs mapped linearly onto [0,1]; files matching the shell-style
/// pattern are loaded in lexicographic filename order.
std::vector<RgbImage> import_png_sequence(const std::filesystem::path& dir,
                                          const std::string& pattern);
RgbImage import_png(const std::filesystem::path& path);
void export_png(const RgbImage& img, const std::filesystem::path& path, int bit_depth);

/// Schedule record: {"t_seconds": [...], "t_u": x, "logits": [...] (optional)}.
void write_schedule_json(const std::filesystem::path& path, const ExposureSchedule& sched,
                         double t_u, const std::vector<double>* logits = nullptr);
ExposureSchedule read_schedule_json(const std::filesystem::path& path, double* t_u = nullptr);

/// JSON array of schedule records (candidate set files).
std::vector<ExposureSchedule> read_candidate_schedules(const std::filesystem::path& path);

/// Partial override objects; absent keys keep the base values.
CameraConfig read_camera_config_json(const std::filesystem::path& path,
                                     const CameraConfig& base = {});
NoiseCalibration read_noise_calibration_json(const std::filesystem::path& path,
                                             const NoiseCalibration& base = {});

}  // namespace burstsched
