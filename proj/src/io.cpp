#include "burstsched/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <fnmatch.h>

#include <nlohmann/json.hpp>

namespace burstsched {

namespace {

using Kind = IoError::Kind;

constexpr char kRadseqMagic[8] = {'R', 'A', 'D', 'S', 'E', 'Q', '1', '\n'};
constexpr char kBayerMagic[8] = {'B', 'A', 'Y', 'E', 'R', '1', '\n', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f32(std::ostream& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    const unsigned char b[4] = {static_cast<unsigned char>(bits),
                                static_cast<unsigned char>(bits >> 8),
                                static_cast<unsigned char>(bits >> 16),
                                static_cast<unsigned char>(bits >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void read_exact(std::istream& in, unsigned char* dst, std::size_t count, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw IoError(Kind::truncated, std::string("truncated while reading ") + what);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_exact(in, b, 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in, const char* what) {
    unsigned char b[8];
    read_exact(in, b, 8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

float get_f32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_exact(in, b, 4, what);
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    return std::bit_cast<float>(bits);
}

void write_plane_f32(std::ostream& out, const std::vector<double>& plane) {
    for (double v : plane) {
        if (!std::isfinite(v)) throw IoError(Kind::non_finite, "refusing to write non-finite value");
        put_f32(out, static_cast<float>(v));
    }
}

void read_plane_f32(std::istream& in, std::vector<double>& plane, const char* what) {
    for (double& v : plane) {
        const float f = get_f32(in, what);
        if (!std::isfinite(f)) throw IoError(Kind::non_finite, "non-finite value in file");
        v = static_cast<double>(f);
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(Kind::io_failure, "cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(Kind::io_failure, "cannot open for reading: " + path.string());
    return in;
}

void check_magic(std::istream& in, const char (&magic)[8], const char* format) {
    unsigned char got[8];
    read_exact(in, got, 8, "magic");
    if (std::memcmp(got, magic, 8) != 0)
        throw IoError(Kind::bad_magic, std::string("not a ") + format + " file");
}

}  // namespace

void write_radseq(const std::filesystem::path& path, const RadianceSequence& seq) {
    if (seq.frames.empty()) throw IoError(Kind::bad_value, "write_radseq: empty sequence");
    if (!(seq.e_s > 0.0)) throw IoError(Kind::bad_value, "write_radseq: e_s must be positive");
    std::ofstream out = open_out(path);
    out.write(kRadseqMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(seq.width()));
    put_u32(out, static_cast<std::uint32_t>(seq.height()));
    put_u32(out, static_cast<std::uint32_t>(seq.frames.size()));
    put_f64(out, seq.e_s);
    for (const RgbImage& f : seq.frames) {
        if (f.width != seq.width() || f.height != seq.height())
            throw IoError(Kind::bad_value, "write_radseq: frame dimensions differ");
        for (int c = 0; c < 3; ++c) write_plane_f32(out, f.plane(c));
    }
    if (!out) throw IoError(Kind::io_failure, "write failed: " + path.string());
}

RadianceSequence read_radseq(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    check_magic(in, kRadseqMagic, "RADSEQ1");
    const std::uint32_t w = get_u32(in, "width");
    const std::uint32_t h = get_u32(in, "height");
    const std::uint32_t count = get_u32(in, "frame count");
    RadianceSequence seq;
    seq.e_s = get_f64(in, "e_s");
    if (!std::isfinite(seq.e_s) || seq.e_s <= 0.0)
        throw IoError(Kind::bad_value, "read_radseq: invalid e_s");
    if (w == 0 || h == 0 || count == 0)
        throw IoError(Kind::bad_value, "read_radseq: invalid dimensions");
    seq.frames.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        RgbImage img(static_cast<int>(w), static_cast<int>(h));
        for (int c = 0; c < 3; ++c) read_plane_f32(in, img.plane(c), "radiance plane");
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

void write_bayer(const std::filesystem::path& path, const BayerFrame& frame) {
    if (frame.width <= 0 || frame.height <= 0)
        throw IoError(Kind::bad_value, "write_bayer: empty frame");
    std::ofstream out = open_out(path);
    out.write(kBayerMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(frame.width));
    put_u32(out, static_cast<std::uint32_t>(frame.height));
    put_f64(out, frame.meta.exposure_s);
    put_f64(out, frame.meta.gain);
    put_f64(out, frame.meta.t_start_s);
    put_f64(out, frame.meta.t_end_s);
    write_plane_f32(out, frame.plane);
    if (!out) throw IoError(Kind::io_failure, "write failed: " + path.string());
}

BayerFrame read_bayer(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    check_magic(in, kBayerMagic, "BAYER1");
    const std::uint32_t w = get_u32(in, "width");
    const std::uint32_t h = get_u32(in, "height");
    if (w == 0 || h == 0) throw IoError(Kind::bad_value, "read_bayer: invalid dimensions");
    BayerFrame frame(static_cast<int>(w), static_cast<int>(h));
    frame.meta.exposure_s = get_f64(in, "exposure");
    frame.meta.gain = get_f64(in, "gain");
    frame.meta.t_start_s = get_f64(in, "t_start");
    frame.meta.t_end_s = get_f64(in, "t_end");
    read_plane_f32(in, frame.plane, "bayer plane");
    return frame;
}

namespace {

RgbImage decode_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError(Kind::io_failure, "cannot read PNG: " + path.string());

    const bool sixteen = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    image.format = sixteen ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_RGB;

    const std::size_t pixels = static_cast<std::size_t>(image.width) * image.height;
    RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    if (sixteen) {
        std::vector<std::uint16_t> buf(pixels * 3);
        if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
            png_image_free(&image);
            throw IoError(Kind::io_failure, "PNG decode failed: " + path.string());
        }
        for (std::size_t i = 0; i < pixels; ++i) {
            out.r[i] = buf[3 * i + 0] / 65535.0;
            out.g[i] = buf[3 * i + 1] / 65535.0;
            out.b[i] = buf[3 * i + 2] / 65535.0;
        }
    } else {
        std::vector<std::uint8_t> buf(pixels * 3);
        if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
            png_image_free(&image);
            throw IoError(Kind::io_failure, "PNG decode failed: " + path.string());
        }
        for (std::size_t i = 0; i < pixels; ++i) {
            out.r[i] = buf[3 * i + 0] / 255.0;
            out.g[i] = buf[3 * i + 1] / 255.0;
            out.b[i] = buf[3 * i + 2] / 255.0;
        }
    }
    return out;
}

}  // namespace

RgbImage import_png(const std::filesystem::path& path) { return decode_png(path); }

std::vector<RgbImage> import_png_sequence(const std::filesystem::path& dir,
                                          const std::string& pattern) {
    if (!std::filesystem::is_directory(dir))
        throw IoError(Kind::io_failure, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
    }
    if (files.empty())
        throw IoError(Kind::io_failure, "no files match '" + pattern + "' in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

    std::vector<RgbImage> frames;
    frames.reserve(files.size());
    for (const auto& f : files) {
        RgbImage img = decode_png(f);
        if (!frames.empty() &&
            (img.width != frames.front().width || img.height != frames.front().height))
            throw IoError(Kind::bad_value, "mixed PNG dimensions at " + f.string());
        frames.push_back(std::move(img));
    }
    return frames;
}

void export_png(const RgbImage& img, const std::filesystem::path& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw IoError(Kind::bad_value, "export_png: bit depth must be 8 or 16");
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);

    const std::size_t pixels = img.pixel_count();
    bool ok = false;
    if (bit_depth == 16) {
        image.format = PNG_FORMAT_LINEAR_RGB;
        std::vector<std::uint16_t> buf(pixels * 3);
        for (std::size_t i = 0; i < pixels; ++i) {
            buf[3 * i + 0] = static_cast<std::uint16_t>(
                std::lround(std::clamp(img.r[i], 0.0, 1.0) * 65535.0));
            buf[3 * i + 1] = static_cast<std::uint16_t>(
                std::lround(std::clamp(img.g[i], 0.0, 1.0) * 65535.0));
            buf[3 * i + 2] = static_cast<std::uint16_t>(
                std::lround(std::clamp(img.b[i], 0.0, 1.0) * 65535.0));
        }
        ok = png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr) != 0;
    } else {
        image.format = PNG_FORMAT_RGB;
        std::vector<std::uint8_t> buf(pixels * 3);
        for (std::size_t i = 0; i < pixels; ++i) {
            buf[3 * i + 0] =
                static_cast<std::uint8_t>(std::lround(std::clamp(img.r[i], 0.0, 1.0) * 255.0));
            buf[3 * i + 1] =
                static_cast<std::uint8_t>(std::lround(std::clamp(img.g[i], 0.0, 1.0) * 255.0));
            buf[3 * i + 2] =
                static_cast<std::uint8_t>(std::lround(std::clamp(img.b[i], 0.0, 1.0) * 255.0));
        }
        ok = png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr) != 0;
    }
    if (!ok) throw IoError(Kind::io_failure, "PNG encode failed: " + path.string());
}

void write_schedule_json(const std::filesystem::path& path, const ExposureSchedule& sched,
                         double t_u, const std::vector<double>* logits) {
    nlohmann::json record;
    record["t_seconds"] = sched.t;
    record["t_u"] = t_u;
    if (logits != nullptr) record["logits"] = *logits;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(Kind::io_failure, "cannot open for writing: " + path.string());
    out << record.dump(2) << "\n";
}

namespace {

ExposureSchedule schedule_from_json(const nlohmann::json& record) {
    if (!record.contains("t_seconds") || !record["t_seconds"].is_array())
        throw IoError(Kind::bad_value, "schedule record lacks t_seconds array");
    ExposureSchedule sched;
    for (const auto& v : record["t_seconds"]) sched.t.push_back(v.get<double>());
    if (sched.t.empty()) throw IoError(Kind::bad_value, "schedule record is empty");
    return sched;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(Kind::io_failure, "cannot open for reading: " + path.string());
    nlohmann::json parsed;
    try {
        in >> parsed;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(Kind::bad_value, "invalid JSON in " + path.string() + ": " + e.what());
    }
    return parsed;
}

}  // namespace

ExposureSchedule read_schedule_json(const std::filesystem::path& path, double* t_u) {
    const nlohmann::json record = parse_json_file(path);
    if (t_u != nullptr && record.contains("t_u")) *t_u = record["t_u"].get<double>();
    return schedule_from_json(record);
}

std::vector<ExposureSchedule> read_candidate_schedules(const std::filesystem::path& path) {
    const nlohmann::json parsed = parse_json_file(path);
    if (!parsed.is_array()) throw IoError(Kind::bad_value, "candidate file must be a JSON array");
    std::vector<ExposureSchedule> out;
    for (const auto& record : parsed) out.push_back(schedule_from_json(record));
    if (out.empty()) throw IoError(Kind::bad_value, "candidate file is empty");
    return out;
}

CameraConfig read_camera_config_json(const std::filesystem::path& path, const CameraConfig& base) {
    const nlohmann::json j = parse_json_file(path);
    CameraConfig cfg = base;
    auto load = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    load("e_S", cfg.e_s);
    load("delta", cfg.delta);
    load("delta_p", cfg.delta_p);
    load("t_p", cfg.t_p);
    load("t_min", cfg.t_min);
    load("t0", cfg.t0);
    load("k", cfg.k);
    load("g_min", cfg.g_min);
    load("g_max", cfg.g_max);
    load("m_thr", cfg.m_thr);
    if (j.contains("bit_depth")) cfg.bit_depth = j["bit_depth"].get<int>();
    cfg.validate();
    return cfg;
}

NoiseCalibration read_noise_calibration_json(const std::filesystem::path& path,
                                             const NoiseCalibration& base) {
    const nlohmann::json j = parse_json_file(path);
    NoiseCalibration calib = base;
    auto load = [&](const char* key, double& field) {
        if (j.contains(key)) field = j[key].get<double>();
    };
    load("shot_slope", calib.shot_slope);
    load("shot_intercept", calib.shot_intercept);
    load("read_slope", calib.read_slope);
    load("read_intercept", calib.read_intercept);
    return calib;
}

}  // namespace burstsched
