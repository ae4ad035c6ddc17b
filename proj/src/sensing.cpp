#include "dgf/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dgf/rng.hpp"

namespace dgf::sensing {

namespace {

void validate_spec(const FrameSpec& s) {
    if (s.width < 1 || s.height < 1) throw DomainError("frame dimensions must be positive");
    if (!(s.pixel_pitch_mm > 0.0)) throw DomainError("pixel pitch must be positive");
}

}  // namespace

ThermalFrame render_frame(const FrameSpec& spec, const BlobSpec& blob,
                          double background_C, double timestamp_s,
                          double noise_sigma_C, std::uint64_t seed) {
    validate_spec(spec);
    if (!(blob.blob_radius_mm > 0.0)) throw DomainError("blob radius must be positive");
    if (blob.x_mm < 0.0 || blob.x_mm > spec.width * spec.pixel_pitch_mm ||
        blob.y_mm < 0.0 || blob.y_mm > spec.height * spec.pixel_pitch_mm)
        throw DomainError("work zone outside the camera field of view");
    if (!std::isfinite(blob.peak_C) || !std::isfinite(background_C))
        throw DomainError("temperatures must be finite");

    ThermalFrame f;
    f.width = spec.width;
    f.height = spec.height;
    f.pixel_pitch_mm = spec.pixel_pitch_mm;
    f.timestamp_s = timestamp_s;
    f.temps_C.assign(std::size_t(spec.width) * spec.height, float(background_C));

    // The blob is negligible beyond a few 1/e radii; render only that patch.
    const double pitch = spec.pixel_pitch_mm;
    const double excess = blob.peak_C - background_C;
    const double reach = 5.0 * blob.blob_radius_mm;
    const int c0 = std::max(0, int((blob.x_mm - reach) / pitch));
    const int c1 = std::min(spec.width - 1, int((blob.x_mm + reach) / pitch) + 1);
    const int r0 = std::max(0, int((blob.y_mm - reach) / pitch));
    const int r1 = std::min(spec.height - 1, int((blob.y_mm + reach) / pitch) + 1);
    const double inv_r2 = 1.0 / (blob.blob_radius_mm * blob.blob_radius_mm);
    for (int r = r0; r <= r1; ++r) {
        const double py = (r + 0.5) * pitch;
        for (int c = c0; c <= c1; ++c) {
            const double px = (c + 0.5) * pitch;
            const double d2 = (px - blob.x_mm) * (px - blob.x_mm) +
                              (py - blob.y_mm) * (py - blob.y_mm);
            f.temps_C[std::size_t(r) * spec.width + c] =
                float(background_C + excess * std::exp(-d2 * inv_r2));
        }
    }

    if (noise_sigma_C > 0.0) {
        const std::uint64_t tick = std::uint64_t(std::llround(timestamp_s * 1e4));
        rng::SplitMix64 g(rng::derive_seed(seed, tick));
        for (auto& v : f.temps_C) v += float(noise_sigma_C * g.normal());
    }
    return f;
}

double hottest_n_mean(const ThermalFrame& frame, int n) {
    const std::size_t count = frame.temps_C.size();
    if (n < 1 || std::size_t(n) > count)
        throw DomainError("hottest-n count must be within the pixel count");
    std::vector<float> copy = frame.temps_C;
    std::nth_element(copy.begin(), copy.begin() + (n - 1), copy.end(),
                     std::greater<float>());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += copy[std::size_t(i)];
    return acc / n;
}

double hottest_n_area_mm2(int n, double pixel_pitch_mm) {
    if (n < 1 || !(pixel_pitch_mm > 0.0)) throw DomainError("invalid area query");
    return n * pixel_pitch_mm * pixel_pitch_mm;
}

std::vector<std::size_t> roi_pixels(const FrameSpec& spec, const RoiSpec& roi) {
    validate_spec(spec);
    if (!(roi.diameter_mm > 0.0)) throw DomainError("roi diameter must be positive");
    const double r = roi.diameter_mm / 2.0;
    if (roi.center_x_mm - r < 0.0 || roi.center_x_mm + r > spec.width * spec.pixel_pitch_mm ||
        roi.center_y_mm - r < 0.0 || roi.center_y_mm + r > spec.height * spec.pixel_pitch_mm)
        throw DomainError("roi circle extends outside the frame");

    std::vector<std::size_t> px;
    const double pitch = spec.pixel_pitch_mm;
    const int c0 = std::max(0, int((roi.center_x_mm - r) / pitch) - 1);
    const int c1 = std::min(spec.width - 1, int((roi.center_x_mm + r) / pitch) + 1);
    const int r0 = std::max(0, int((roi.center_y_mm - r) / pitch) - 1);
    const int r1 = std::min(spec.height - 1, int((roi.center_y_mm + r) / pitch) + 1);
    const double rr = r * r;
    for (int row = r0; row <= r1; ++row) {
        const double py = (row + 0.5) * pitch;
        for (int col = c0; col <= c1; ++col) {
            const double px_mm = (col + 0.5) * pitch;
            const double d2 = (px_mm - roi.center_x_mm) * (px_mm - roi.center_x_mm) +
                              (py - roi.center_y_mm) * (py - roi.center_y_mm);
            if (d2 <= rr) px.push_back(std::size_t(row) * spec.width + col);
        }
    }
    if (px.empty()) throw DomainError("roi selects no pixel");
    return px;
}

double roi_mean(const ThermalFrame& frame, const RoiSpec& roi) {
    FrameSpec spec{frame.width, frame.height, frame.pixel_pitch_mm};
    const auto px = roi_pixels(spec, roi);
    double acc = 0.0;
    for (auto i : px) acc += frame.temps_C[i];
    return acc / double(px.size());
}

bool nuc_gate(double t_s, double period_s, double dwell_s) {
    if (!(period_s > 0.0) || dwell_s < 0.0 || dwell_s >= period_s)
        throw DomainError("nuc gate needs 0 <= dwell < period");
    if (t_s < 0.0) throw DomainError("time must be >= 0");
    const double phase = std::fmod(t_s, period_s);
    return phase >= dwell_s;
}

std::string frame_csv(const ThermalFrame& frame) {
    char head[128];
    std::snprintf(head, sizeof head, "# width=%d height=%d pitch_mm=%.6g t_s=%.6g\n",
                  frame.width, frame.height, frame.pixel_pitch_mm, frame.timestamp_s);
    std::string out = head;
    out.reserve(out.size() + frame.temps_C.size() * 8);
    char cell[32];
    for (int r = 0; r < frame.height; ++r) {
        for (int c = 0; c < frame.width; ++c) {
            std::snprintf(cell, sizeof cell, c + 1 == frame.width ? "%.2f\n" : "%.2f,",
                          double(frame.at(c, r)));
            out += cell;
        }
    }
    return out;
}

}  // namespace dgf::sensing
