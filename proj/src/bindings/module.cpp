#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dgf/config.hpp"
#include "dgf/control.hpp"
#include "dgf/errors.hpp"
#include "dgf/lti.hpp"
#include "dgf/optics.hpp"
#include "dgf/plant.hpp"
#include "dgf/scenarios.hpp"
#include "dgf/sysid.hpp"

namespace py = pybind11;

namespace {

dgf::config::RunConfig resolve_config(const std::string& mode, const std::string& preset,
                                      const std::string& config_text) {
    dgf::config::RunConfig cfg;
    if (!preset.empty()) {
        const auto* p = dgf::scenarios::find_preset(preset);
        if (!p) throw dgf::ConfigError("unknown preset '" + preset + "'");
        if (!mode.empty() && p->mode != mode)
            throw dgf::ConfigError("preset '" + preset + "' belongs to mode '" + p->mode +
                                   "', not '" + mode + "'");
        p->apply(cfg);
        cfg.preset_name = preset;
    }
    return dgf::config::apply_text(config_text, cfg);
}

py::dict artifacts_dict(const dgf::scenarios::RunArtifacts& art) {
    py::dict files;
    for (const auto& [name, content] : art.files) files[py::str(name)] = content;

    py::dict traj;
    const auto& rows = art.trajectory.rows;
    auto col = [&](auto proj) {
        py::list v;
        for (const auto& r : rows) v.append(proj(r));
        return v;
    };
    traj["t_s"] = col([](const auto& r) { return r.t_s; });
    traj["x_mm"] = col([](const auto& r) { return r.x_mm; });
    traj["y_mm"] = col([](const auto& r) { return r.y_mm; });
    traj["z_mm"] = col([](const auto& r) { return r.z_mm; });
    traj["layer"] = col([](const auto& r) { return r.layer; });
    traj["T_C"] = col([](const auto& r) { return r.temp_C; });
    traj["L_W"] = col([](const auto& r) { return r.power_W; });

    py::dict d;
    d["summary"] = art.summary;
    d["exit_code"] = art.exit_code;
    d["files"] = files;
    d["trajectory"] = traj;
    if (art.outcome) {
        d["classification"] = dgf::plant::to_string(art.outcome->classification);
        d["max_temp_C"] = art.outcome->max_temp_C;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "simulation and control toolkit for laser-heated glass deposition";

    py::register_exception<dgf::Error>(m, "ToolkitError");

    // --- linear plant models -------------------------------------------------
    m.def(
        "zoh_pulse_model",
        [](double gain, double tau_s, double dt_s) {
            const auto tf = dgf::lti::zoh_discretize({gain, tau_s}, dt_s);
            return py::make_tuple(-tf.den()[1], tf.num()[0]);
        },
        py::arg("gain"), py::arg("tau_s"), py::arg("dt_s"),
        "Exact sampled model of gain/(tau*s+1): returns (pole, input_coeff).");

    m.def(
        "simulate_first_order",
        [](double pole, double input_coeff, const std::vector<double>& u) {
            dgf::lti::DiscreteTransferFunction tf(
                dgf::lti::Polynomial({input_coeff}),
                dgf::lti::Polynomial({1.0, -pole}), 1.0);
            return dgf::lti::simulate(tf, u);
        },
        py::arg("pole"), py::arg("input_coeff"), py::arg("u"),
        "Response of input_coeff/(z-pole) to an input sequence from rest.");

    // --- delivery optics -----------------------------------------------------
    py::class_<dgf::optics::GaussianBeam>(m, "GaussianBeam")
        .def(py::init<double, double, double>(), py::arg("wavelength_m"),
             py::arg("waist_radius_m"), py::arg("waist_location_m") = 0.0)
        .def_readonly("wavelength_m", &dgf::optics::GaussianBeam::wavelength)
        .def_readonly("waist_radius_m", &dgf::optics::GaussianBeam::waist_radius)
        .def_readonly("waist_location_m", &dgf::optics::GaussianBeam::waist_location)
        .def("rayleigh_range_m", &dgf::optics::GaussianBeam::rayleigh_range)
        .def(
            "radius_at", [](const dgf::optics::GaussianBeam& b,
                            double z) { return dgf::optics::beam_radius(b, z); },
            py::arg("z_from_waist_m"));

    m.def("power_in_disk", &dgf::optics::power_in_disk, py::arg("beam"),
          py::arg("power_W"), py::arg("z_from_waist_m"), py::arg("disk_radius_m"),
          py::arg("offset_m") = 0.0);

    // --- identification ------------------------------------------------------
    py::class_<dgf::sysid::IdentifiedModel>(m, "IdentifiedModel")
        .def_readonly("gain_C_per_W", &dgf::sysid::IdentifiedModel::gain_C_per_W)
        .def_readonly("time_constant_s", &dgf::sysid::IdentifiedModel::time_constant_s)
        .def_readonly("pole", &dgf::sysid::IdentifiedModel::pole)
        .def_readonly("input_coeff", &dgf::sysid::IdentifiedModel::input_coeff)
        .def_readonly("intercept_C", &dgf::sysid::IdentifiedModel::intercept_C)
        .def_readonly("nominal_power_W", &dgf::sysid::IdentifiedModel::nominal_power_W)
        .def_readonly("nominal_temp_C", &dgf::sysid::IdentifiedModel::nominal_temp_C)
        .def_readonly("fit_percent_train", &dgf::sysid::IdentifiedModel::fit_percent_train)
        .def_readonly("n_samples", &dgf::sysid::IdentifiedModel::n_samples);

    m.def(
        "gen_prbs",
        [](double low, double high, double min_dwell, double duration, double dt,
           std::uint64_t seed) {
            return dgf::sysid::gen_prbs(low, high, min_dwell, duration, dt, seed);
        },
        py::arg("low_W"), py::arg("high_W"), py::arg("min_dwell_s"), py::arg("duration_s"),
        py::arg("dt_s"), py::arg("seed") = 1);
    m.def("gen_chirp", &dgf::sysid::gen_chirp, py::arg("f0_Hz"), py::arg("f1_Hz"),
          py::arg("duration_s"), py::arg("mean_W"), py::arg("amplitude_W"),
          py::arg("dt_s"));
    m.def("gen_sine", &dgf::sysid::gen_sine, py::arg("period_s"), py::arg("mean_W"),
          py::arg("amplitude_W"), py::arg("duration_s"), py::arg("dt_s"));
    m.def(
        "fit_first_order",
        [](const std::vector<double>& u, const std::vector<double>& y, double dt) {
            return dgf::sysid::fit_first_order(u, y, dt);
        },
        py::arg("u"), py::arg("y"), py::arg("dt_s"));
    m.def(
        "simulate_model",
        [](const dgf::sysid::IdentifiedModel& mod, const std::vector<double>& u,
           double y0) { return dgf::sysid::simulate_model(mod, u, y0); },
        py::arg("model"), py::arg("u"), py::arg("y0"));
    m.def(
        "fit_percent",
        [](const std::vector<double>& y, const std::vector<double>& yhat) {
            return dgf::sysid::fit_percent(y, yhat);
        },
        py::arg("y"), py::arg("y_model"));

    // --- regulator -----------------------------------------------------------
    py::class_<dgf::control::ControllerDesign>(m, "ControllerDesign")
        .def_readonly("dt_s", &dgf::control::ControllerDesign::dt_s)
        .def_readonly("plant_pole", &dgf::control::ControllerDesign::plant_pole)
        .def_readonly("plant_gain", &dgf::control::ControllerDesign::plant_gain)
        .def_readonly("g1", &dgf::control::ControllerDesign::g1)
        .def_readonly("g0", &dgf::control::ControllerDesign::g0)
        .def_readonly("nominal_power_W", &dgf::control::ControllerDesign::nominal_power_W)
        .def_readonly("nominal_temp_C", &dgf::control::ControllerDesign::nominal_temp_C)
        .def_property_readonly("alpha",
                               [](const dgf::control::ControllerDesign& d) {
                                   return d.alpha.coeffs();
                               })
        .def("report", &dgf::control::design_report);

    m.def(
        "design_first_order",
        [](double gain, double tau, double dt, const std::vector<double>& taus,
           double u_min, double u_max, double nominal_power, double nominal_temp) {
            return dgf::control::design_first_order(gain, tau, dt, taus, u_min, u_max,
                                                    nominal_power, nominal_temp);
        },
        py::arg("gain_C_per_W"), py::arg("tau_s"), py::arg("dt_s"),
        py::arg("desired_taus_s"), py::arg("u_min_W"), py::arg("u_max_W"),
        py::arg("nominal_power_W"), py::arg("nominal_temp_C"));

    py::class_<dgf::control::Controller>(m, "Controller")
        .def(py::init<const dgf::control::ControllerDesign&>(), py::arg("design"))
        .def("step", &dgf::control::Controller::step, py::arg("ref_now_C"),
             py::arg("ref_next_C"), py::arg("meas_C"))
        .def("reset", &dgf::control::Controller::reset)
        .def_property_readonly("fault", &dgf::control::Controller::fault)
        .def_property_readonly("correction", &dgf::control::Controller::correction)
        .def_property_readonly("last_command", &dgf::control::Controller::last_command);

    // --- scenario harness ----------------------------------------------------
    m.def("default_config", [] { return dgf::config::serialize({}); });
    m.def("presets", [] {
        py::list out;
        for (const auto& p : dgf::scenarios::presets())
            out.append(py::make_tuple(p.name, p.mode, p.description));
        return out;
    });
    m.def(
        "run",
        [](const std::string& mode, const std::string& config_text,
           const std::string& preset) {
            const auto cfg = resolve_config(mode, preset, config_text);
            return artifacts_dict(dgf::scenarios::run_mode(mode, cfg));
        },
        py::arg("mode"), py::arg("config_text") = "", py::arg("preset") = "",
        "Run one scenario; returns summary, exit_code, files and trajectory columns.");

    m.attr("__version__") = dgf::scenarios::kArtifactVersion;
}
