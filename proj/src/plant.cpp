#include "dgf/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "dgf/rng.hpp"

namespace dgf::plant {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

double beam_radius_mm(double waist_um, double rayleigh_um, double z_mm) {
    const double t = z_mm * 1000.0 / rayleigh_um;
    return waist_um * 1e-3 * std::sqrt(1.0 + t * t);
}

}  // namespace

void ScenarioConfig::validate() const {
    require(scan_speed_mm_s > 0.0, "scan speed must be positive");
    require(feed_rate_mm_s > 0.0, "feed rate must be positive");
    require(filament_diameter_mm > 0.0, "filament diameter must be positive");
    require(distance_from_focus_mm > 0.0, "distance from focus must be positive");
    require(dt_s > 0.0, "sample time must be positive");
    require(nominal_gain_C_per_W > 0.0, "nominal gain must be positive");
    require(nominal_tau_s > 0.0, "nominal time constant must be positive");
    require(beam_waist_um > 0.0 && beam_rayleigh_um > 0.0, "beam parameters must be positive");
    require(wet_min_C < detach_max_C, "wet threshold must sit below detach threshold");
    require(detach_max_C <= vaporize_max_C, "detach threshold must not exceed vaporize");
    require(detach_dwell_s >= 0.0, "detach dwell must be >= 0");
    require(laser_max_W > laser_min_W, "actuator range must be nonempty");
    require(layer_ramp_layers >= 1, "layer ramp needs at least one layer");
    require(corner_radius_mm > 0.0, "corner radius must be positive");
    require(nuc_period_s > nuc_dwell_s && nuc_dwell_s >= 0.0, "invalid nuc timing");
}

std::string to_string(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::Stable: return "Stable";
        case OutcomeClass::TooColdNoWet: return "TooColdNoWet";
        case OutcomeClass::TooColdCurl: return "TooColdCurl";
        case OutcomeClass::Detached: return "Detached";
        case OutcomeClass::Vaporized: return "Vaporized";
    }
    return "Stable";
}

double Path::total_length() const {
    double acc = 0.0;
    for (const auto& s : segments) acc += s.length();
    return acc;
}

int Path::max_layer() const {
    int m = 0;
    for (const auto& s : segments) m = std::max(m, s.layer);
    return m;
}

Path build_track_path(double length_mm, double lead_in_mm) {
    require(length_mm > 0.0 && lead_in_mm >= 0.0, "track needs a positive length");
    Path p;
    p.segments.push_back({-lead_in_mm, 0.0, 0.0, length_mm, 0.0, 0.0, 1, false});
    return p;
}

Path build_wall_path(double length_mm, int layers, double layer_drop_mm,
                     double lead_in_mm) {
    require(length_mm > 0.0 && layers >= 1 && layer_drop_mm >= 0.0,
            "wall needs positive length and at least one layer");
    Path p;
    for (int k = 1; k <= layers; ++k) {
        const double z = -(k - 1) * layer_drop_mm;
        const bool corner = k < layers;
        if (k == 1)
            p.segments.push_back({-lead_in_mm, 0.0, z, length_mm, 0.0, z, k, corner});
        else if (k % 2 == 0)
            p.segments.push_back({length_mm, 0.0, z, 0.0, 0.0, z, k, corner});
        else
            p.segments.push_back({0.0, 0.0, z, length_mm, 0.0, z, k, corner});
    }
    return p;
}

Path build_rectangle_path(double width_mm, double height_mm, int layers,
                          double layer_drop_mm) {
    require(width_mm > 0.0 && height_mm > 0.0 && layers >= 1,
            "rectangle needs positive sides and at least one layer");
    Path p;
    for (int k = 1; k <= layers; ++k) {
        const double z = -(k - 1) * layer_drop_mm;
        const double w = width_mm, h = height_mm;
        p.segments.push_back({0, 0, z, w, 0, z, k, true});
        p.segments.push_back({w, 0, z, w, h, z, k, true});
        p.segments.push_back({w, h, z, 0, h, z, k, true});
        p.segments.push_back({0, h, z, 0, 0, z, k, true});
    }
    return p;
}

PlantModel::PlantModel(const ScenarioConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    beam_.wavelength = cfg_.wavelength_nm * 1e-9;
    beam_.waist_radius = cfg_.beam_waist_um * 1e-6;

    w_nominal_mm_ = beam_radius_mm(cfg_.beam_waist_um, cfg_.beam_rayleigh_um,
                                   cfg_.nominal_df_mm);
    w_df_mm_ = beam_radius_mm(cfg_.beam_waist_um, cfg_.beam_rayleigh_um,
                              cfg_.distance_from_focus_mm);
    const double ratio = w_nominal_mm_ / w_df_mm_;
    gain_df_ = cfg_.nominal_gain_C_per_W * ratio * ratio;

    if (std::isnan(cfg_.baseline_override_C)) {
        const double anchor = cfg_.nominal_temp_C -
                              cfg_.nominal_gain_C_per_W *
                                  (cfg_.nominal_power_W - cfg_.power_loss_W);
        base_df_ = anchor - gain_df_ * cfg_.power_loss_W;
    } else {
        base_df_ = cfg_.baseline_override_C;
    }

    if (cfg_.deflection_gain_coupling > 0.0) {
        // Absorbed-fraction ratio versus lateral offset, tabulated once: the
        // filament cross-section acts as a disk aperture in the beam.
        optics::GaussianBeam plane{beam_.wavelength, w_df_mm_ * 1e-3, 0.0};
        const double disk_r = cfg_.filament_diameter_mm / 2.0 * 1e-3;
        const double f0 = optics::power_in_disk(plane, 1.0, 0.0, disk_r, 0.0);
        offset_table_.clear();
        for (int i = 0; i <= 40; ++i) {
            const double off = i * offset_table_step_mm_ * 1e-3;
            offset_table_.push_back(
                optics::power_in_disk(plane, 1.0, 0.0, disk_r, off) / f0);
        }
    }
}

double PlantModel::layer_ramp(int layer) const {
    if (cfg_.layer_ramp_layers <= 1) return layer >= 1 ? 1.0 : 0.0;
    const double r = double(layer - 1) / double(cfg_.layer_ramp_layers - 1);
    return std::clamp(r, 0.0, 1.0);
}

double PlantModel::corner_rise(double corner_distance_mm, int corner_index) const {
    if (cfg_.corner_amp_C == 0.0 || corner_index < 1) return 0.0;
    if (!(corner_distance_mm < cfg_.corner_radius_mm)) return 0.0;
    // Accumulated end-of-track heat grows with each direction change and
    // saturates at the reference corner.
    const int k = std::min(corner_index, cfg_.corner_ref_index);
    const double scale =
        std::pow(double(k) / double(cfg_.corner_ref_index), cfg_.corner_growth_exp);
    const double shape =
        0.5 * (1.0 + std::cos(std::numbers::pi * corner_distance_mm / cfg_.corner_radius_mm));
    return cfg_.corner_amp_C * scale * shape;
}

double PlantModel::offset_multiplier(double deflection_mm) const {
    if (cfg_.deflection_gain_coupling <= 0.0 || offset_table_.empty()) return 1.0;
    const double off = cfg_.deflection_gain_coupling * std::abs(deflection_mm);
    const double idx = off / offset_table_step_mm_;
    if (idx >= double(offset_table_.size() - 1)) return offset_table_.back();
    const std::size_t i = std::size_t(idx);
    const double frac = idx - double(i);
    return offset_table_[i] * (1.0 - frac) + offset_table_[i + 1] * frac;
}

EffectiveParams PlantModel::effective_params(const ProcessState& s) const {
    require(s.diameter_mm > 0.0, "filament diameter must be positive");
    EffectiveParams p;
    const double m_diam = cfg_.filament_diameter_mm / s.diameter_mm;
    const double m_offset = offset_multiplier(s.deflection_mm());
    p.gain_C_per_W = gain_df_ * m_diam * m_offset;
    const double ramp = layer_ramp(s.layer);
    p.baseline_C = base_df_ + cfg_.layer_temp_rise_C * ramp +
                   corner_rise(s.corner_distance_mm, s.corner_index);
    p.time_constant_s = cfg_.nominal_tau_s * (1.0 + (cfg_.tau_layer_factor - 1.0) * ramp);
    return p;
}

double PlantModel::clamp_power(double power_W) const {
    if (!std::isfinite(power_W)) throw DomainError("commanded power must be finite");
    return std::clamp(power_W, cfg_.laser_min_W, cfg_.laser_max_W);
}

double PlantModel::steady_temp(const ProcessState& s, double power_W) const {
    const auto p = effective_params(s);
    return p.baseline_C + p.gain_C_per_W * clamp_power(power_W);
}

ProcessState PlantModel::step(const ProcessState& s, double power_W) const {
    const auto p = effective_params(s);
    const double L = clamp_power(power_W);
    const double t_ss = p.baseline_C + p.gain_C_per_W * L;
    ProcessState out = s;
    out.temp_C = t_ss + (s.temp_C - t_ss) * std::exp(-cfg_.dt_s / p.time_constant_s);
    out.time_s = s.time_s + cfg_.dt_s;
    return out;
}

namespace {

struct CornerMark {
    double arc_mm;
    int index;
};

}  // namespace

Trajectory run_path(const PlantModel& model, const Path& path, const PowerFn& power,
                    const SensorFn& sensor, std::optional<double> initial_temp_C) {
    if (path.segments.empty()) throw DomainError("path has no segments");
    if (!power) throw DomainError("run_path needs a power source");
    const auto& cfg = model.config();

    std::vector<double> seg_start_arc(path.segments.size());
    std::vector<CornerMark> corners;
    double acc = 0.0;
    for (std::size_t i = 0; i < path.segments.size(); ++i) {
        seg_start_arc[i] = acc;
        acc += path.segments[i].length();
        if (path.segments[i].corner_at_end)
            corners.push_back({acc, int(corners.size()) + 1});
    }
    const double total = acc;
    const double step_mm = cfg.scan_speed_mm_s * cfg.dt_s;
    const std::size_t n_steps = std::size_t(std::ceil(total / step_mm - 1e-9));

    rng::SplitMix64 rng_diam(rng::derive_seed(cfg.seed, 1));
    rng::SplitMix64 rng_defl(rng::derive_seed(cfg.seed, 2));

    auto draw_diameter = [&]() {
        return rng_diam.truncated_normal(cfg.filament_diameter_mm, cfg.diameter_sigma_mm,
                                         0.85, 1.5);
    };

    ProcessState state;
    state.layer = path.segments.front().layer;
    state.diameter_mm = draw_diameter();

    {
        ProcessState probe = state;
        probe.corner_distance_mm = std::numeric_limits<double>::infinity();
        const double t0 = initial_temp_C ? *initial_temp_C
                          : std::isnan(cfg.initial_temp_C)
                              ? model.effective_params(probe).baseline_C
                              : cfg.initial_temp_C;
        state.temp_C = t0;
    }

    Trajectory traj;
    traj.rows.reserve(n_steps);
    std::size_t seg_idx = 0;

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double arc = k * step_mm;
        while (seg_idx + 1 < path.segments.size() &&
               arc >= seg_start_arc[seg_idx + 1] - 1e-12) {
            const auto& closed = path.segments[seg_idx];
            ++seg_idx;
            state.diameter_mm = draw_diameter();
            if (closed.corner_at_end && cfg.deflection_corner_peak_mm > 0.0) {
                // The tip lags a direction change: kick the apparent work
                // zone along the old travel direction.
                const double len = closed.length();
                if (len > 0.0) {
                    state.deflection_x_mm += (closed.x1 - closed.x0) / len *
                                             cfg.deflection_corner_peak_mm;
                    state.deflection_y_mm += (closed.y1 - closed.y0) / len *
                                             cfg.deflection_corner_peak_mm;
                }
            }
        }
        const auto& seg = path.segments[seg_idx];
        const double local = arc - seg_start_arc[seg_idx];
        const double len = seg.length();
        const double frac = len > 0.0 ? std::min(local / len, 1.0) : 0.0;
        state.x_mm = seg.x0 + (seg.x1 - seg.x0) * frac;
        state.y_mm = seg.y0 + (seg.y1 - seg.y0) * frac;
        state.z_mm = seg.z0 + (seg.z1 - seg.z0) * frac;
        state.layer = seg.layer;

        state.corner_distance_mm = std::numeric_limits<double>::infinity();
        state.corner_index = 0;
        for (const auto& c : corners) {
            const double d = std::abs(arc - c.arc_mm);
            if (d < state.corner_distance_mm) {
                state.corner_distance_mm = d;
                state.corner_index = c.index;
            }
        }

        const double t = state.time_s;
        const double t_meas = sensor ? sensor(t, state) : state.temp_C;
        double cmd = power(t, state, t_meas);
        if (!std::isfinite(cmd)) {
            char msg[96];
            std::snprintf(msg, sizeof msg,
                          "power source returned a nonfinite command at t=%.3f s", t);
            throw Error(msg);
        }
        cmd = model.clamp_power(cmd);

        const auto eff = model.effective_params(state);
        traj.rows.push_back({t, state.x_mm, state.y_mm, state.z_mm, state.layer,
                             state.temp_C, cmd, eff.gain_C_per_W,
                             state.corner_distance_mm <= cfg.corner_radius_mm,
                             state.corner_index});

        state = model.step(state, cmd);

        const double decay = std::exp(-cfg.dt_s / cfg.deflection_tau_s);
        state.deflection_x_mm *= decay;
        state.deflection_y_mm *= decay;
        if (cfg.deflection_sigma_mm > 0.0) {
            const double s = cfg.deflection_sigma_mm * std::sqrt(cfg.dt_s);
            state.deflection_x_mm += s * rng_defl.normal();
            state.deflection_y_mm += s * rng_defl.normal();
        }
    }
    return traj;
}

DepositionOutcome classify(const Trajectory& traj, const ScenarioConfig& cfg) {
    DepositionOutcome out;
    if (traj.rows.empty()) throw DomainError("cannot classify an empty trajectory");

    double max_t = -1e300;
    double vap_time = -1.0;
    double detach_time = -1.0;
    double run_start = -1.0;
    for (const auto& r : traj.rows) {
        max_t = std::max(max_t, r.temp_C);
        if (vap_time < 0.0 && r.temp_C > cfg.vaporize_max_C) vap_time = r.t_s;
        if (detach_time < 0.0) {
            if (r.temp_C > cfg.detach_max_C) {
                if (run_start < 0.0) run_start = r.t_s;
                if (r.t_s - run_start >= cfg.detach_dwell_s - 1e-9)
                    detach_time = run_start + cfg.detach_dwell_s;
            } else {
                run_start = -1.0;
            }
        }
    }
    out.max_temp_C = max_t;

    const bool vap = vap_time >= 0.0;
    const bool det = detach_time >= 0.0;
    if (vap || det) {
        double when;
        if (vap && det) {
            // Earliest trigger wins; a dead heat counts as the harsher one.
            out.classification = vap_time <= detach_time ? OutcomeClass::Vaporized
                                                         : OutcomeClass::Detached;
            when = std::min(vap_time, detach_time);
        } else if (vap) {
            out.classification = OutcomeClass::Vaporized;
            when = vap_time;
        } else {
            out.classification = OutcomeClass::Detached;
            when = detach_time;
        }
        const TrajectoryRow* at = &traj.rows.back();
        for (const auto& r : traj.rows) {
            if (r.t_s >= when - 1e-9) {
                at = &r;
                break;
            }
        }
        out.failure_time_s = when;
        out.failure_x_mm = at->x_mm;
        out.failure_y_mm = at->y_mm;
        out.failure_z_mm = at->z_mm;
        out.failure_layer = at->layer;
        if (at->corner_flag) out.failure_corner_index = at->corner_index;
        return out;
    }

    if (max_t < cfg.wet_min_C) {
        out.classification = max_t >= cfg.wet_min_C - cfg.cold_curl_band_C
                                 ? OutcomeClass::TooColdCurl
                                 : OutcomeClass::TooColdNoWet;
        const auto& last = traj.rows.back();
        out.failure_time_s = last.t_s;
        out.failure_x_mm = last.x_mm;
        out.failure_y_mm = last.y_mm;
        out.failure_z_mm = last.z_mm;
        out.failure_layer = last.layer;
        return out;
    }

    out.classification = OutcomeClass::Stable;
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t_s,x_mm,y_mm,z_mm,layer,T_C,L_W,b_eff,corner_flag\n";
    out.reserve(out.size() + traj.rows.size() * 64);
    char line[192];
    for (const auto& r : traj.rows) {
        std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%d,%.10g,%.10g,%.10g,%d\n",
                      r.t_s, r.x_mm, r.y_mm, r.z_mm, r.layer, r.temp_C, r.power_W,
                      r.gain_C_per_W, r.corner_flag ? 1 : 0);
        out += line;
    }
    return out;
}

}  // namespace dgf::plant
