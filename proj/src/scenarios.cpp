#include "dgf/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

#include "dgf/errors.hpp"
#include "dgf/rng.hpp"
#include "dgf/sensing.hpp"

namespace dgf::scenarios {

namespace {

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Measurement channel: true work-zone temperature plus optional Gaussian
/// noise on its own stream, so reruns with a different noise level keep the
/// same diameter and deflection draws.
plant::SensorFn make_noise_sensor(const plant::ScenarioConfig& pc, std::uint64_t stream) {
    if (pc.measurement_noise_C <= 0.0) return {};
    auto gen = std::make_shared<rng::SplitMix64>(rng::derive_seed(pc.seed, stream));
    const double sigma = pc.measurement_noise_C;
    return [gen, sigma](double, const plant::ProcessState& s) {
        return s.temp_C + sigma * gen->normal();
    };
}

struct PowerSource {
    plant::PowerFn fn;
    std::shared_ptr<control::Controller> ctl;  // null when open loop
};

PowerSource make_power(const config::RunConfig& cfg, const plant::PlantModel& model) {
    if (!cfg.closed_loop) {
        const double p = cfg.power_W;
        return {[p](double, const plant::ProcessState&, double) { return p; }, nullptr};
    }
    auto ctl = std::make_shared<control::Controller>(design_for(cfg, model, cfg.ref_C));
    const double ref = cfg.ref_C;
    return {[ctl, ref](double, const plant::ProcessState&, double meas) {
                return ctl->step(ref, ref, meas);
            },
            ctl};
}

double mean_command(const plant::Trajectory& traj) {
    if (traj.rows.empty()) return kNaN;
    double s = 0.0;
    for (const auto& r : traj.rows) s += r.power_W;
    return s / double(traj.rows.size());
}

std::string outcome_text(const plant::DepositionOutcome& o) {
    std::string s = plant::to_string(o.classification);
    s += strf(", max_T = %.1f C", o.max_temp_C);
    if (o.failure_time_s) {
        s += strf(", failed at t = %.1f s", *o.failure_time_s);
        if (o.failure_layer) s += strf(" on layer %d", *o.failure_layer);
        if (o.failure_corner_index) s += strf(" near corner %d", *o.failure_corner_index);
    }
    return s;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = [] {
        std::vector<Preset> p;
        auto add = [&p](const char* name, const char* mode, const char* desc,
                        std::function<void(config::RunConfig&)> fn) {
            p.push_back({name, mode, desc, std::move(fn)});
        };

        // Wetting thresholds are calibrated per spot size: a tighter spot
        // wets at a lower apparent work-zone temperature because the reading
        // averages over a fixed footprint much larger than the spot.
        auto df10_plant = [](config::RunConfig& c) {
            c.plant.distance_from_focus_mm = 10.0;
            c.plant.wet_min_C = 750.0;
        };
        add("track-df10-ol", "track", "defocused track, constant 70 W",
            [df10_plant](config::RunConfig& c) {
                df10_plant(c);
                c.closed_loop = false;
                c.power_W = 70.0;
            });
        add("track-df10-cl", "track", "defocused track, regulated to 800 C",
            [df10_plant](config::RunConfig& c) {
                df10_plant(c);
                c.closed_loop = true;
                c.ref_C = 800.0;
            });
        auto df3_plant = [](config::RunConfig& c) {
            c.plant.distance_from_focus_mm = 3.0;
            c.plant.wet_min_C = 800.0;
        };
        add("track-df3-ol-10", "track", "tight spot, constant 10 W",
            [df3_plant](config::RunConfig& c) {
                df3_plant(c);
                c.closed_loop = false;
                c.power_W = 10.0;
            });
        add("track-df3-ol-20", "track", "tight spot, constant 20 W",
            [df3_plant](config::RunConfig& c) {
                df3_plant(c);
                c.closed_loop = false;
                c.power_W = 20.0;
            });
        add("track-df3-ol-30", "track", "tight spot, constant 30 W",
            [df3_plant](config::RunConfig& c) {
                df3_plant(c);
                c.closed_loop = false;
                c.power_W = 30.0;
            });
        add("track-df3-cl", "track", "tight spot, regulated to 850 C",
            [df3_plant](config::RunConfig& c) {
                df3_plant(c);
                c.closed_loop = true;
                c.ref_C = 850.0;
            });

        auto wall_plant = [](config::RunConfig& c) {
            c.plant.distance_from_focus_mm = 5.0;
            c.plant.baseline_override_C = 650.70;
            c.plant.corner_amp_C = 48.0;
        };
        add("wall-ol", "wall", "16-layer wall, constant 40 W",
            [wall_plant](config::RunConfig& c) {
                wall_plant(c);
                c.closed_loop = false;
                c.power_W = 40.0;
            });
        add("wall-cl", "wall", "16-layer wall, regulated to 940 C",
            [wall_plant](config::RunConfig& c) {
                wall_plant(c);
                c.closed_loop = true;
                c.ref_C = 940.0;
            });
        add("wall-ol-df3", "wall", "16-layer wall at 3 mm defocus, constant 40 W",
            [](config::RunConfig& c) {
                c.plant.distance_from_focus_mm = 3.0;
                c.plant.corner_amp_C = 48.0;
                c.closed_loop = false;
                c.power_W = 40.0;
            });
        add("wall-cl-df3", "wall", "16-layer wall at 3 mm defocus, regulated to 940 C",
            [](config::RunConfig& c) {
                c.plant.distance_from_focus_mm = 3.0;
                c.plant.corner_amp_C = 48.0;
                c.closed_loop = true;
                c.ref_C = 940.0;
            });

        add("chimney", "chimney", "square chimney, camera-in-loop at 900 C",
            [](config::RunConfig& c) {
                c.plant.distance_from_focus_mm = 4.0;
                c.plant.interlayer_distance_mm = 1.5;
                c.plant.deflection_corner_peak_mm = 1.5;
                c.closed_loop = true;
                c.ref_C = 900.0;
                c.rect_side_mm = 20.0;
                c.rect_layers = 4;
                c.rect_layer_drop_mm = 0.8;
            });

        auto sysid_plant = [](config::RunConfig& c) {
            c.plant.distance_from_focus_mm = 7.0;
            c.plant.measurement_noise_C = 5.0;
        };
        add("sysid-prbs", "sysid", "binary excitation fit with swept and periodic checks",
            [sysid_plant](config::RunConfig& c) {
                sysid_plant(c);
                c.sysid_excitation = "prbs";
            });
        add("sysid-chirp", "sysid", "swept-sine excitation, exploratory fit",
            [sysid_plant](config::RunConfig& c) {
                sysid_plant(c);
                c.sysid_excitation = "chirp";
            });
        add("sysid-sine", "sysid", "single-tone excitation, exploratory fit",
            [sysid_plant](config::RunConfig& c) {
                sysid_plant(c);
                c.sysid_excitation = "sine";
            });

        add("map-full", "map", "power/defocus sweep extended to 10..70 W",
            [](config::RunConfig& c) {
                c.map_power_min_W = 10.0;
                c.map_power_max_W = 70.0;
            });
        return p;
    }();
    return table;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

plant::EffectiveParams operating_point(const plant::PlantModel& model, int layer) {
    plant::ProcessState s;
    s.layer = layer;
    s.diameter_mm = model.config().filament_diameter_mm;
    s.corner_distance_mm = std::numeric_limits<double>::infinity();
    return model.effective_params(s);
}

control::ControllerDesign design_for(const config::RunConfig& cfg,
                                     const plant::PlantModel& model, double ref_C) {
    const auto op = operating_point(model, 1);
    const double nominal_power = (ref_C - op.baseline_C) / op.gain_C_per_W;
    const std::array<double, 2> taus{cfg.plant.desired_tau_fast_s,
                                     cfg.plant.desired_tau_slow_s};
    return control::design_first_order(op.gain_C_per_W, op.time_constant_s,
                                       cfg.plant.dt_s, taus, cfg.plant.laser_min_W,
                                       cfg.plant.laser_max_W, nominal_power, ref_C);
}

std::string manifest(const config::RunConfig& cfg, const std::string& mode) {
    std::string s;
    s += "artifact = ";
    s += kArtifactVersion;
    s += "\nmode = " + mode;
    s += "\npreset = " + cfg.preset_name + "\n";
    s += config::serialize(cfg);
    return s;
}

int outcome_code(plant::OutcomeClass c) { return static_cast<int>(c); }

RunArtifacts run_track(const config::RunConfig& cfg) {
    cfg.plant.validate();
    plant::PlantModel model(cfg.plant);
    const auto path = plant::build_track_path(cfg.track_length_mm, cfg.track_lead_in_mm);
    auto sensor = make_noise_sensor(cfg.plant, 3);
    auto src = make_power(cfg, model);

    RunArtifacts art;
    art.trajectory = plant::run_path(model, path, src.fn, sensor);
    art.outcome = plant::classify(art.trajectory, cfg.plant);
    art.files.emplace_back("track.csv", plant::trajectory_csv(art.trajectory));
    if (src.ctl) art.files.emplace_back("design.txt", control::design_report(src.ctl->design()));
    art.files.emplace_back("manifest.txt", manifest(cfg, "track"));
    art.summary = strf("track: %s, mean_L = %.2f W", outcome_text(*art.outcome).c_str(),
                       mean_command(art.trajectory));
    art.exit_code = art.outcome->classification == plant::OutcomeClass::Stable ? 0 : 2;
    return art;
}

RunArtifacts run_wall(const config::RunConfig& cfg) {
    cfg.plant.validate();
    if (cfg.wall_layers < 1) throw ConfigError("wall needs at least one layer");
    plant::PlantModel model(cfg.plant);
    const auto path = plant::build_wall_path(cfg.wall_length_mm, cfg.wall_layers,
                                             cfg.plant.interlayer_distance_mm,
                                             cfg.wall_lead_in_mm);
    auto sensor = make_noise_sensor(cfg.plant, 3);
    auto src = make_power(cfg, model);

    RunArtifacts art;
    art.trajectory = plant::run_path(model, path, src.fn, sensor);
    art.outcome = plant::classify(art.trajectory, cfg.plant);

    // per-layer command and temperature averages
    std::vector<double> suml(std::size_t(cfg.wall_layers) + 1, 0.0);
    std::vector<double> sumt(std::size_t(cfg.wall_layers) + 1, 0.0);
    std::vector<long> cnt(std::size_t(cfg.wall_layers) + 1, 0);
    for (const auto& r : art.trajectory.rows) {
        if (r.layer < 1 || r.layer > cfg.wall_layers) continue;
        suml[std::size_t(r.layer)] += r.power_W;
        sumt[std::size_t(r.layer)] += r.temp_C;
        ++cnt[std::size_t(r.layer)];
    }
    std::string layers = "layer,mean_L_W,mean_T_C,samples\n";
    for (int k = 1; k <= cfg.wall_layers; ++k) {
        if (!cnt[std::size_t(k)]) continue;
        layers += strf("%d,%.10g,%.10g,%ld\n", k,
                       suml[std::size_t(k)] / double(cnt[std::size_t(k)]),
                       sumt[std::size_t(k)] / double(cnt[std::size_t(k)]),
                       cnt[std::size_t(k)]);
    }

    art.files.emplace_back("wall.csv", plant::trajectory_csv(art.trajectory));
    art.files.emplace_back("wall_layers.csv", layers);
    if (src.ctl) art.files.emplace_back("design.txt", control::design_report(src.ctl->design()));
    art.files.emplace_back("manifest.txt", manifest(cfg, "wall"));
    art.summary = strf("wall: %s, mean_L = %.2f W", outcome_text(*art.outcome).c_str(),
                       mean_command(art.trajectory));
    art.exit_code = art.outcome->classification == plant::OutcomeClass::Stable ? 0 : 2;
    return art;
}

RunArtifacts run_map(const config::RunConfig& cfg) {
    cfg.plant.validate();
    if (cfg.map_power_step_W <= 0.0 || cfg.map_df_step_mm <= 0.0)
        throw ConfigError("map steps must be positive");
    if (cfg.map_power_max_W < cfg.map_power_min_W ||
        cfg.map_df_max_mm < cfg.map_df_min_mm)
        throw ConfigError("map ranges must be nondecreasing");
    const int npow =
        int(std::floor((cfg.map_power_max_W - cfg.map_power_min_W) / cfg.map_power_step_W +
                       1e-9)) +
        1;
    const int ndf =
        int(std::floor((cfg.map_df_max_mm - cfg.map_df_min_mm) / cfg.map_df_step_mm + 1e-9)) +
        1;
    if (npow * ndf > 100000) throw ConfigError("map grid is unreasonably large");

    const double cell_len = cfg.plant.scan_speed_mm_s * cfg.map_cell_duration_s;
    std::string csv =
        "# outcome_code: 0=Stable 1=TooColdNoWet 2=TooColdCurl 3=Detached 4=Vaporized\n"
        "L_W,df_mm,T_max_C,outcome_code\n";
    std::array<int, 5> tally{};
    std::size_t cell = 0;
    for (int i = 0; i < npow; ++i) {
        const double P = cfg.map_power_min_W + double(i) * cfg.map_power_step_W;
        for (int j = 0; j < ndf; ++j, ++cell) {
            const double df = cfg.map_df_min_mm + double(j) * cfg.map_df_step_mm;
            plant::ScenarioConfig pc = cfg.plant;
            pc.distance_from_focus_mm = df;
            pc.seed = rng::derive_seed(cfg.plant.seed, 16 + cell);
            plant::PlantModel model(pc);
            const auto traj = plant::run_path(
                model, plant::build_track_path(cell_len, 0.0),
                [P](double, const plant::ProcessState&, double) { return P; });
            const auto out = plant::classify(traj, pc);
            const int code = outcome_code(out.classification);
            ++tally[std::size_t(code)];
            csv += strf("%.10g,%.10g,%.10g,%d\n", P, df, out.max_temp_C, code);
        }
    }

    RunArtifacts art;
    art.files.emplace_back("map.csv", csv);
    art.files.emplace_back("manifest.txt", manifest(cfg, "map"));
    art.summary = strf("map: %dx%d cells", npow, ndf);
    static const char* kNames[5] = {"Stable", "TooColdNoWet", "TooColdCurl", "Detached",
                                    "Vaporized"};
    for (int c = 0; c < 5; ++c)
        if (tally[std::size_t(c)])
            art.summary += strf(", %d %s", tally[std::size_t(c)], kNames[c]);
    art.exit_code = 0;
    return art;
}

namespace {

struct Experiment {
    std::string kind;
    plant::Trajectory traj;
    std::vector<double> t, u, y;
};

Experiment run_experiment(const config::RunConfig& cfg, const std::string& kind,
                          const std::vector<double>& u_seq, std::uint64_t noise_stream) {
    plant::PlantModel model(cfg.plant);
    const auto path = plant::build_track_path(cfg.track_length_mm, 0.0);
    auto sensor = make_noise_sensor(cfg.plant, noise_stream);

    Experiment e;
    e.kind = kind;
    const double dt = cfg.plant.dt_s;
    plant::PowerFn power = [&u_seq, &e, dt](double t, const plant::ProcessState&,
                                            double meas) {
        e.y.push_back(meas);
        std::size_t k = std::size_t(std::llround(t / dt));
        if (k >= u_seq.size()) k = u_seq.size() - 1;
        return u_seq[k];
    };
    e.traj = plant::run_path(model, path, power, sensor);
    e.t.reserve(e.traj.rows.size());
    e.u.reserve(e.traj.rows.size());
    for (const auto& r : e.traj.rows) {
        e.t.push_back(r.t_s);
        e.u.push_back(r.power_W);
    }
    return e;
}

std::string experiment_csv(const Experiment& e, const sysid::IdentifiedModel& m) {
    const auto yhat = sysid::simulate_model(m, e.u, e.y.empty() ? 0.0 : e.y.front());
    std::string csv = "t_s,L_W,T_meas_C,T_model_C\n";
    for (std::size_t k = 0; k < e.t.size(); ++k)
        csv += strf("%.10g,%.10g,%.10g,%.10g\n", e.t[k], e.u[k], e.y[k], yhat[k]);
    return csv;
}

}  // namespace

RunArtifacts run_sysid(const config::RunConfig& cfg) {
    cfg.plant.validate();
    const std::string& kind = cfg.sysid_excitation;
    if (kind != "prbs" && kind != "chirp" && kind != "sine")
        throw ConfigError("sysid_excitation must be prbs, chirp or sine");

    const double dt = cfg.plant.dt_s;
    const double duration = cfg.track_length_mm / cfg.plant.scan_speed_mm_s;
    const double mean_W = 0.5 * (cfg.sysid_low_W + cfg.sysid_high_W);
    const double amp_W = 0.5 * (cfg.sysid_high_W - cfg.sysid_low_W);

    auto make_u = [&](const std::string& k) {
        if (k == "prbs")
            return sysid::gen_prbs(cfg.sysid_low_W, cfg.sysid_high_W, cfg.sysid_min_dwell_s,
                                   duration, dt, cfg.plant.seed);
        if (k == "chirp")
            return sysid::gen_chirp(cfg.sysid_chirp_f0_Hz, cfg.sysid_chirp_f1_Hz, duration,
                                    mean_W, amp_W, dt);
        return sysid::gen_sine(cfg.sysid_sine_period_s, mean_W, amp_W, duration, dt);
    };
    auto trimmed = [&](const Experiment& e) {
        return sysid::trim_track(e.u, e.y, cfg.plant.scan_speed_mm_s, cfg.track_length_mm,
                                 dt, cfg.sysid_trim_mm);
    };

    RunArtifacts art;
    Experiment train = run_experiment(cfg, kind, make_u(kind), 3);
    auto [ut, yt] = trimmed(train);
    const auto model = sysid::fit_first_order(ut, yt, dt);

    std::string fit = sysid::fit_csv(model);
    art.files.emplace_back("sysid_" + kind + ".csv", experiment_csv(train, model));
    art.summary = strf("sysid %s: K = %.4g C/W, tau = %.4g s, train fit %.1f%%",
                       kind.c_str(), model.gain_C_per_W, model.time_constant_s,
                       model.fit_percent_train);

    if (kind == "prbs") {
        const char* checks[2] = {"chirp", "sine"};
        std::string extra_hdr, extra_row;
        for (int i = 0; i < 2; ++i) {
            Experiment e = run_experiment(cfg, checks[i], make_u(checks[i]), 4 + i);
            auto [uv, yv] = trimmed(e);
            const auto yhat = sysid::simulate_model(model, uv, yv.front());
            const double pct = sysid::fit_percent(yv, yhat);
            extra_hdr += strf(",fit_percent_%s", checks[i]);
            extra_row += strf(",%.10g", pct);
            art.files.emplace_back(std::string("sysid_") + checks[i] + ".csv",
                                   experiment_csv(e, model));
            art.summary += strf(", %s fit %.1f%%", checks[i], pct);
        }
        // widen the one-row fit table with the validation columns
        fit.insert(fit.find('\n'), extra_hdr);
        fit.insert(fit.rfind('\n'), extra_row);
    }
    art.files.emplace_back("sysid_fit.csv", fit);
    art.files.emplace_back("manifest.txt", manifest(cfg, "sysid"));
    art.trajectory = std::move(train.traj);
    art.exit_code = 0;
    return art;
}

RunArtifacts run_chimney(const config::RunConfig& cfg) {
    cfg.plant.validate();
    if (cfg.rect_layers < 1) throw ConfigError("chimney needs at least one layer");
    plant::PlantModel model(cfg.plant);
    const auto& pc = cfg.plant;

    const sensing::FrameSpec fspec;
    const double cx = fspec.width * fspec.pixel_pitch_mm / 2.0;
    const double cy = fspec.height * fspec.pixel_pitch_mm / 2.0;
    const double bg = pc.heatbed_temp_C;

    // Camera responsivity from a synthetic probe frame with a known excess:
    // the hottest-pixels statistic is affine in the work-zone temperature,
    // so one probe pins the slope.
    const sensing::BlobSpec probe{cx, cy, bg + 400.0, model.spot_radius_mm()};
    const auto probe_frame = sensing::render_frame(fspec, probe, bg, 0.0);
    const double kappa =
        (sensing::hottest_n_mean(probe_frame, pc.hot_pixels_n) - bg) / 400.0;

    // Sensor-referred regulator: design against what the camera reports.
    const auto op = operating_point(model, 1);
    const double sens_gain = kappa * op.gain_C_per_W;
    const double sens_base = bg + kappa * (op.baseline_C - bg);
    const double nominal_power = (cfg.ref_C - sens_base) / sens_gain;
    const std::array<double, 2> taus{pc.desired_tau_fast_s, pc.desired_tau_slow_s};
    const auto design = control::design_first_order(
        sens_gain, op.time_constant_s, pc.dt_s, taus, pc.laser_min_W, pc.laser_max_W,
        nominal_power, cfg.ref_C);
    control::Controller ctl(design);

    struct CamReading {
        double hot = kNaN;
        double roi = kNaN;
        bool fresh = false;
    };
    const std::uint64_t frame_seed = rng::derive_seed(pc.seed, 4);
    const sensing::RoiSpec roi{cx, cy, pc.roi_diameter_mm};
    CamReading held;
    auto read_camera = [&](double t_cam, const plant::ProcessState& s) {
        if (!sensing::nuc_gate(t_cam, pc.nuc_period_s, pc.nuc_dwell_s)) {
            CamReading r = held;
            r.fresh = false;
            return r;
        }
        const sensing::BlobSpec blob{cx + s.deflection_x_mm, cy + s.deflection_y_mm,
                                     s.temp_C, model.spot_radius_mm()};
        const auto fr =
            sensing::render_frame(fspec, blob, bg, t_cam, pc.frame_noise_C, frame_seed);
        held.hot = sensing::hottest_n_mean(fr, pc.hot_pixels_n);
        held.roi = sensing::roi_mean(fr, roi);
        held.fresh = true;
        return held;
    };

    // Stationary preheat at the path start: regulate on the camera until the
    // reading reaches the reference, then release the motion. Logged against
    // negative time so the path clock starts at zero.
    plant::ProcessState st;
    st.diameter_mm = pc.filament_diameter_mm;
    st.temp_C = std::isfinite(pc.initial_temp_C) ? pc.initial_temp_C
                                                 : model.effective_params(st).baseline_C;
    std::vector<std::array<double, 4>> pre_rows;
    const long pre_max = std::llround(cfg.preheat_timeout_s / pc.dt_s);
    bool preheated = false;
    long pre_steps = 0;
    for (; pre_steps < pre_max; ++pre_steps) {
        const double t = double(pre_steps) * pc.dt_s;
        const auto cam = read_camera(t, st);
        const double cmd = ctl.step(cfg.ref_C, cfg.ref_C, cam.hot);
        pre_rows.push_back({t, cam.hot, cam.roi, cmd});
        st = model.step(st, cmd);
        if (cam.fresh && cam.hot >= cfg.ref_C) {
            ++pre_steps;
            preheated = true;
            break;
        }
    }
    const double preheat_s = double(pre_steps) * pc.dt_s;

    const auto path = plant::build_rectangle_path(cfg.rect_side_mm, cfg.rect_side_mm,
                                                  cfg.rect_layers, cfg.rect_layer_drop_mm);
    std::vector<std::array<double, 4>> main_rows;
    plant::PowerFn power = [&](double t, const plant::ProcessState& s, double) {
        const auto cam = read_camera(preheat_s + t, s);
        const double cmd = ctl.step(cfg.ref_C, cfg.ref_C, cam.hot);
        main_rows.push_back({t, cam.hot, cam.roi, cmd});
        return cmd;
    };

    RunArtifacts art;
    art.trajectory = plant::run_path(model, path, power, {}, st.temp_C);

    std::string log = "t_s,T_hot200_C,T_roi_C,L_W\n";
    for (const auto& r : pre_rows)
        log += strf("%.10g,%.10g,%.10g,%.10g\n", r[0] - preheat_s, r[1], r[2], r[3]);
    for (const auto& r : main_rows)
        log += strf("%.10g,%.10g,%.10g,%.10g\n", r[0], r[1], r[2], r[3]);

    art.files.emplace_back("chimney.csv", log);
    art.files.emplace_back("chimney_path.csv", plant::trajectory_csv(art.trajectory));
    art.files.emplace_back("design.txt", control::design_report(design));
    std::string mf = manifest(cfg, "chimney");
    mf += strf("preheat_duration_s = %.10g\n", preheat_s);
    mf += strf("preheat_reached_ref = %d\n", preheated ? 1 : 0);
    mf += strf("camera_slope = %.10g\n", kappa);
    mf += strf("retraction_events = %d\n", cfg.rect_layers);
    art.files.emplace_back("manifest.txt", mf);

    double roi_min = kNaN, hot_min = kNaN, hot_max = kNaN;
    for (const auto& r : main_rows) {
        if (!std::isfinite(r[1])) continue;
        roi_min = std::isfinite(roi_min) ? std::min(roi_min, r[2]) : r[2];
        hot_min = std::isfinite(hot_min) ? std::min(hot_min, r[1]) : r[1];
        hot_max = std::isfinite(hot_max) ? std::max(hot_max, r[1]) : r[1];
    }
    art.summary = strf(
        "chimney: preheat %.1f s, %d layers, hot-200 span [%.1f, %.1f] C, ROI min %.1f C",
        preheat_s, cfg.rect_layers, hot_min, hot_max, roi_min);
    art.exit_code = 0;
    return art;
}

RunArtifacts run_design(const config::RunConfig& cfg) {
    cfg.plant.validate();
    plant::PlantModel model(cfg.plant);
    const auto d = design_for(cfg, model, cfg.ref_C);
    control::closed_loop_poly(d);  // throws if the placement drifted

    RunArtifacts art;
    art.files.emplace_back("design.txt", control::design_report(d));
    art.files.emplace_back("manifest.txt", manifest(cfg, "design"));
    art.summary = strf(
        "design: a = %.6g, b = %.6g C/W, g = [%.6g, %.6g], L_n = %.4g W, T_n = %.4g C",
        d.plant_pole, d.plant_gain, d.g1, d.g0, d.nominal_power_W, d.nominal_temp_C);
    art.exit_code = 0;
    return art;
}

RunArtifacts run_beam(const config::RunConfig& cfg) {
    const double lambda_m = cfg.plant.wavelength_nm * 1e-9;
    const optics::GaussianBeam input{lambda_m, 4.32e-3, 0.0};
    const std::vector<optics::OpticalElement> expander{optics::ThinLens{-0.050},
                                                       optics::FreeSpace{0.200},
                                                       optics::ThinLens{0.250}};
    const auto expanded = optics::propagate(input, expander);
    const double expanded_radius_m = optics::beam_radius_at_position(expanded, 0.0);
    const std::vector<optics::OpticalElement> focuser{optics::ParabolicMirror{0.1016}};
    const auto focused = optics::propagate(expanded, focuser);

    const double w0_um = focused.waist_radius * 1e6;
    const double zr_um = focused.rayleigh_range() * 1e6;
    const double w4_mm = optics::beam_radius(focused, 4e-3) * 1e3;
    const double w9_mm = optics::beam_radius(focused, 9e-3) * 1e3;
    const double wdf_mm =
        optics::beam_radius(focused, cfg.plant.distance_from_focus_mm * 1e-3) * 1e3;
    const double peak_W_mm2 =
        2.0 * cfg.power_W / (std::numbers::pi * focused.waist_radius * focused.waist_radius) /
        1e6;

    std::string txt;
    txt += strf("expanded_diameter_mm = %.10g\n", 2e3 * expanded_radius_m);
    txt += strf("waist_radius_um = %.10g\n", w0_um);
    txt += strf("waist_diameter_um = %.10g\n", 2.0 * w0_um);
    txt += strf("rayleigh_range_um = %.10g\n", zr_um);
    txt += strf("w_at_4mm_mm = %.10g\n", w4_mm);
    txt += strf("w_at_9mm_mm = %.10g\n", w9_mm);
    txt += strf("w_at_df_mm = %.10g\n", wdf_mm);
    txt += strf("power_W = %.10g\n", cfg.power_W);
    txt += strf("peak_intensity_W_mm2 = %.10g\n", peak_W_mm2);

    std::string profile = "z_mm,w_mm\n";
    for (int k = 0; k <= 120; ++k) {
        const double z_mm = 0.1 * double(k);
        profile += strf("%.10g,%.10g\n", z_mm, optics::beam_radius(focused, z_mm * 1e-3) * 1e3);
    }

    const auto grid = optics::field_grid(focused, cfg.power_W, -10e-6, 10e-6, -5e-6,
                                         30e-6, 81, 71);

    RunArtifacts art;
    art.files.emplace_back("beam.txt", txt);
    art.files.emplace_back("beam_profile.csv", profile);
    art.files.emplace_back("intensity_grid.csv", optics::field_grid_csv(grid));
    art.files.emplace_back("manifest.txt", manifest(cfg, "beam"));
    art.summary = strf(
        "beam: expanded D = %.3f mm, waist w0 = %.4g um, zR = %.4g um, w(4 mm) = %.3f mm, "
        "w(9 mm) = %.3f mm",
        2e3 * expanded_radius_m, w0_um, zr_um, w4_mm, w9_mm);
    art.exit_code = 0;
    return art;
}

RunArtifacts run_mode(const std::string& mode, const config::RunConfig& cfg) {
    if (mode == "track") return run_track(cfg);
    if (mode == "wall") return run_wall(cfg);
    if (mode == "chimney") return run_chimney(cfg);
    if (mode == "map") return run_map(cfg);
    if (mode == "sysid") return run_sysid(cfg);
    if (mode == "design") return run_design(cfg);
    if (mode == "beam") return run_beam(cfg);
    throw ConfigError("unknown mode: " + mode);
}

}  // namespace dgf::scenarios
