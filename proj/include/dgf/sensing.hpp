#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgf/errors.hpp"

namespace dgf::sensing {

/// Apparent-temperature image, row-major, pixel centers at (i+0.5)*pitch.
struct ThermalFrame {
    int width = 640;
    int height = 480;
    double pixel_pitch_mm = 0.148;
    double timestamp_s = 0.0;
    std::vector<float> temps_C;  // width*height values

    float at(int col, int row) const { return temps_C[std::size_t(row) * width + col]; }
    double fov_width_mm() const { return width * pixel_pitch_mm; }
    double fov_height_mm() const { return height * pixel_pitch_mm; }
};

struct FrameSpec {
    int width = 640;
    int height = 480;
    double pixel_pitch_mm = 0.148;
};

/// Gaussian work-zone blob over a uniform background.
/// blob_radius_mm is the 1/e radius of the temperature excess.
struct BlobSpec {
    double x_mm = 0.0;  // blob center in frame coordinates
    double y_mm = 0.0;
    double peak_C = 900.0;
    double blob_radius_mm = 1.0;
};

/// Render one frame. noise_sigma_C > 0 adds per-pixel Gaussian noise,
/// deterministic in (seed, timestamp). The blob center must lie inside the
/// frame.
ThermalFrame render_frame(const FrameSpec& spec, const BlobSpec& blob,
                          double background_C, double timestamp_s,
                          double noise_sigma_C = 0.0, std::uint64_t seed = 0);

/// Mean of the n hottest pixels. Ties beyond the cut share a value, so the
/// mean does not depend on tie ordering.
double hottest_n_mean(const ThermalFrame& frame, int n);

/// Footprint of an n-pixel average in mm^2.
double hottest_n_area_mm2(int n, double pixel_pitch_mm);

/// Circular region fixed in the frame; selection is by pixel center.
struct RoiSpec {
    double center_x_mm = 0.0;
    double center_y_mm = 0.0;
    double diameter_mm = 0.9;
};

/// Pixel indices (row-major) whose centers fall inside the circle.
std::vector<std::size_t> roi_pixels(const FrameSpec& spec, const RoiSpec& roi);

/// Mean over the ROI pixels. Throws if the circle selects no pixel or
/// extends outside the frame.
double roi_mean(const ThermalFrame& frame, const RoiSpec& roi);

/// False during [k*period, k*period + dwell) for integer k >= 0: the camera
/// is internally recalibrating and no fresh frame is available.
bool nuc_gate(double t_s, double period_s, double dwell_s);

/// Single-slot latest-value channel: writers overwrite, readers see the most
/// recent value or none. Mirrors how a frame grabber hands frames to a
/// consumer that may run slower.
template <class T>
class LatestValue {
  public:
    void publish(T v) {
        value_ = std::move(v);
        ++version_;
    }
    const std::optional<T>& peek() const { return value_; }
    std::uint64_t version() const { return version_; }

  private:
    std::optional<T> value_;
    std::uint64_t version_ = 0;
};

/// CSV grid dump: header line with geometry, then height rows of width
/// comma-separated values.
std::string frame_csv(const ThermalFrame& frame);

}  // namespace dgf::sensing
