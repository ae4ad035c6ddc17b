#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dgf/errors.hpp"
#include "dgf/optics.hpp"

namespace dgf::plant {

/// Everything a deposition run needs, flat and file-loadable. Temperatures
/// are apparent work-zone readings in C, powers in W, lengths in mm unless
/// the name says otherwise.
struct ScenarioConfig {
    // motion / geometry
    double scan_speed_mm_s = 0.5;
    double feed_rate_mm_s = 0.5;
    double filament_diameter_mm = 1.0;
    double distance_from_focus_mm = 7.0;
    double interlayer_distance_mm = 0.6;
    double heatbed_temp_C = 550.0;
    double dt_s = 0.1;
    std::uint64_t seed = 1;

    // small-signal plant anchors at the nominal operating point
    double nominal_gain_C_per_W = 3.69;
    double nominal_tau_s = 0.53;
    double nominal_df_mm = 7.0;
    double nominal_power_W = 42.6;
    double nominal_temp_C = 888.0;
    /// Commanded power that never reaches the melt (fixed coupling loss).
    double power_loss_W = 14.0;
    /// Direct zero-power baseline override; NaN derives it from the anchors.
    double baseline_override_C = std::numeric_limits<double>::quiet_NaN();
    double initial_temp_C = std::numeric_limits<double>::quiet_NaN();

    // delivery beam at the work plane
    double wavelength_nm = 1070.0;
    double beam_waist_um = 1.603;
    double beam_rayleigh_um = 7.544;

    // build-height and direction-change heat accumulation
    double layer_temp_rise_C = 122.95;
    int layer_ramp_layers = 3;
    double tau_layer_factor = 1.0;
    double corner_amp_C = 0.0;
    double corner_growth_exp = 4.0;
    int corner_ref_index = 9;
    double corner_radius_mm = 2.0;

    // outcome thresholds
    double wet_min_C = 900.0;
    double detach_max_C = 1100.0;
    double vaporize_max_C = 1300.0;
    double detach_dwell_s = 0.5;
    double cold_curl_band_C = 50.0;

    // actuator
    double laser_min_W = 0.0;
    double laser_max_W = 500.0;

    // stochastic terms
    double diameter_sigma_mm = 0.0;
    double deflection_sigma_mm = 0.0;   // random walk, mm per sqrt(s)
    double deflection_tau_s = 2.0;
    double deflection_corner_peak_mm = 0.0;
    double deflection_gain_coupling = 0.0;
    double measurement_noise_C = 0.0;

    // sensing
    double frame_noise_C = 0.0;
    int hot_pixels_n = 200;
    double roi_diameter_mm = 0.9;
    double nuc_period_s = 30.0;
    double nuc_dwell_s = 0.128;

    // control
    double desired_tau_fast_s = 0.1;
    double desired_tau_slow_s = 0.5356;

    void validate() const;
};

enum class OutcomeClass { Stable, TooColdNoWet, TooColdCurl, Detached, Vaporized };

std::string to_string(OutcomeClass c);

struct DepositionOutcome {
    OutcomeClass classification = OutcomeClass::Stable;
    double max_temp_C = 0.0;
    std::optional<double> failure_time_s;
    std::optional<double> failure_x_mm;
    std::optional<double> failure_y_mm;
    std::optional<double> failure_z_mm;
    std::optional<int> failure_layer;
    std::optional<int> failure_corner_index;
};

struct ProcessState {
    double time_s = 0.0;
    double temp_C = 0.0;
    double x_mm = 0.0;
    double y_mm = 0.0;
    double z_mm = 0.0;
    int layer = 1;
    double diameter_mm = 1.0;
    double deflection_x_mm = 0.0;
    double deflection_y_mm = 0.0;
    /// Arc distance to the nearest direction-change vertex, +inf when none.
    double corner_distance_mm = std::numeric_limits<double>::infinity();
    int corner_index = 0;

    double deflection_mm() const {
        return std::hypot(deflection_x_mm, deflection_y_mm);
    }
};

struct EffectiveParams {
    double gain_C_per_W = 0.0;
    double time_constant_s = 0.0;
    double baseline_C = 0.0;
};

/// Piecewise path: straight segments walked at the scan speed. A segment can
/// flag its end vertex as a direction-change corner; corners are numbered
/// globally from 1 in path order.
struct PathSegment {
    double x0, y0, z0;
    double x1, y1, z1;
    int layer;
    bool corner_at_end = false;

    double length() const {
        return std::hypot(x1 - x0, std::hypot(y1 - y0, z1 - z0));
    }
};

struct Path {
    std::vector<PathSegment> segments;

    double total_length() const;
    int max_layer() const;
};

Path build_track_path(double length_mm, double lead_in_mm = 0.0);
Path build_wall_path(double length_mm, int layers, double layer_drop_mm,
                     double lead_in_mm = 5.0);
Path build_rectangle_path(double width_mm, double height_mm, int layers,
                          double layer_drop_mm);

struct TrajectoryRow {
    double t_s;
    double x_mm, y_mm, z_mm;
    int layer;
    double temp_C;
    double power_W;
    double gain_C_per_W;
    bool corner_flag;
    int corner_index;  ///< nearest corner (1-based); 0 when the path has none
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
};

/// Deterministic scenario plant. Precomputes the focus-dependent gain and
/// baseline from the configured beam, and owns the noise streams.
class PlantModel {
  public:
    explicit PlantModel(const ScenarioConfig& cfg);

    const ScenarioConfig& config() const { return cfg_; }

    /// 1/e^2 beam radius at the configured working plane, mm.
    double spot_radius_mm() const { return w_df_mm_; }
    /// Power-to-temperature slope before filament multipliers.
    double focus_gain_C_per_W() const { return gain_df_; }
    /// Zero-power steady temperature at layer 1, away from corners.
    double baseline_C() const { return base_df_; }

    EffectiveParams effective_params(const ProcessState& s) const;

    /// Exact first-order update over one sample: T' = T_ss + (T - T_ss)
    /// exp(-dt/a). Power is clamped to the actuator limits first; nonfinite
    /// power throws.
    ProcessState step(const ProcessState& s, double power_W) const;

    /// Steady-state temperature for constant clamped power at a state.
    double steady_temp(const ProcessState& s, double power_W) const;

    double clamp_power(double power_W) const;

  private:
    friend Trajectory run_path(const PlantModel&,
                               const Path&,
                               const std::function<double(double, const ProcessState&, double)>&,
                               const std::function<double(double, const ProcessState&)>&,
                               std::optional<double>);

    double layer_ramp(int layer) const;
    double corner_rise(double corner_distance_mm, int corner_index) const;
    double offset_multiplier(double deflection_mm) const;

    ScenarioConfig cfg_;
    optics::GaussianBeam beam_;
    double w_nominal_mm_ = 0.0;
    double w_df_mm_ = 0.0;
    double gain_df_ = 0.0;
    double base_df_ = 0.0;
    std::vector<double> offset_table_;  // absorbed fraction ratio vs mm
    double offset_table_step_mm_ = 0.1;
};

/// Power callback: receives time, state and the sensed temperature, returns
/// commanded laser power. Sensor callback defaults to the true work-zone
/// temperature.
using PowerFn = std::function<double(double t, const ProcessState&, double T_meas)>;
using SensorFn = std::function<double(double t, const ProcessState&)>;

Trajectory run_path(const PlantModel& model, const Path& path, const PowerFn& power,
                    const SensorFn& sensor = {},
                    std::optional<double> initial_temp_C = {});

DepositionOutcome classify(const Trajectory& traj, const ScenarioConfig& cfg);

std::string trajectory_csv(const Trajectory& traj);

}  // namespace dgf::plant
