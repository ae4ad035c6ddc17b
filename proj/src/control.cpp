#include "dgf/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dgf/errors.hpp"

namespace dgf::control {

ControllerDesign design_discrete(double plant_pole, double plant_gain, double dt_s,
                                 std::span<const double> desired_taus_s,
                                 double u_min_W, double u_max_W,
                                 double nominal_power_W, double nominal_temp_C) {
    if (!(plant_pole > 0.0 && plant_pole < 1.0))
        throw DesignError("pulse-model pole must lie in (0,1)");
    if (!(plant_gain > 0.0)) throw DesignError("pulse-model gain must be positive");
    if (dt_s <= 0.0) throw DesignError("sample time must be positive");
    if (desired_taus_s.size() != 2)
        throw DesignError(
            "first-order plant plus integrator needs exactly two target time constants");
    if (!(u_max_W > u_min_W)) throw DesignError("actuator range must be nonempty");
    if (!std::isfinite(nominal_power_W) || !std::isfinite(nominal_temp_C))
        throw DesignError("nominal operating point must be finite");
    for (double tau : desired_taus_s)
        if (!(tau > 0.0)) throw DesignError("target time constants must be positive");

    ControllerDesign d;
    d.dt_s = dt_s;
    d.plant_pole = plant_pole;
    d.plant_gain = plant_gain;
    d.u_min = u_min_W;
    d.u_max = u_max_W;
    d.nominal_power_W = nominal_power_W;
    d.nominal_temp_C = nominal_temp_C;
    d.alpha = lti::poly_from_time_constants(desired_taus_s, dt_s);

    // Loop characteristic: (z-1)(z-a) - g(z) = alpha(z), so g = (z-1)(z-a) - alpha.
    const lti::Polynomial va =
        lti::poly_mul(lti::Polynomial({1.0, -1.0}), lti::Polynomial({1.0, -plant_pole}));
    const lti::Polynomial g = lti::poly_sub(va, d.alpha);
    if (g.degree() + 1 > d.alpha.degree())
        throw DesignError("correction polynomial came out improper");
    d.g1 = g.degree() >= 1 ? g.coeffs()[g.coeffs().size() - 2] : 0.0;
    d.g0 = g.coeffs().back();

    const double slow = *std::max_element(desired_taus_s.begin(), desired_taus_s.end());
    if (slow < 5.0 * dt_s) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "slowest target time constant %.4g s is under five sample "
                      "periods (dt=%.4g s); expect poor intersample behavior",
                      slow, dt_s);
        d.warnings.push_back(msg);
    }
    return d;
}

ControllerDesign design(const lti::DiscreteTransferFunction& plant,
                        std::span<const double> desired_taus_s, double u_min_W,
                        double u_max_W, double nominal_power_W,
                        double nominal_temp_C) {
    if (plant.den().degree() != 1 || plant.num().degree() != 0)
        throw DesignError("design needs a strictly proper first-order plant");
    const double lead = plant.den().coeffs().front();
    const double a = -plant.den().coeffs().back() / lead;
    const double b = plant.num().coeffs().back() / lead;
    return design_discrete(a, b, plant.dt(), desired_taus_s, u_min_W, u_max_W,
                           nominal_power_W, nominal_temp_C);
}

ControllerDesign design_first_order(double gain_C_per_W, double tau_s, double dt_s,
                                    std::span<const double> desired_taus_s,
                                    double u_min_W, double u_max_W,
                                    double nominal_power_W, double nominal_temp_C) {
    if (!(tau_s > 0.0)) throw DesignError("plant time constant must be positive");
    return design(lti::zoh_discretize({gain_C_per_W, tau_s}, dt_s), desired_taus_s,
                  u_min_W, u_max_W, nominal_power_W, nominal_temp_C);
}

lti::Polynomial closed_loop_poly(const ControllerDesign& d) {
    const lti::Polynomial va =
        lti::poly_mul(lti::Polynomial({1.0, -1.0}), lti::Polynomial({1.0, -d.plant_pole}));
    const lti::Polynomial cl = lti::poly_sub(va, lti::Polynomial({d.g1, d.g0}));
    if (cl.coeffs().size() != d.alpha.coeffs().size())
        throw DesignError("closed-loop polynomial degree mismatch");
    for (std::size_t i = 0; i < cl.coeffs().size(); ++i)
        if (std::abs(cl.coeffs()[i] - d.alpha.coeffs()[i]) > 1e-12)
            throw DesignError("closed-loop polynomial drifted from the design target");
    return cl;
}

std::string design_report(const ControllerDesign& d) {
    std::string out;
    char buf[128];
    auto kv = [&](const char* key, double value) {
        std::snprintf(buf, sizeof buf, "%s=%.10g\n", key, value);
        out += buf;
    };
    kv("plant_pole", d.plant_pole);
    kv("plant_gain", d.plant_gain);
    kv("dt_s", d.dt_s);
    for (std::size_t i = 0; i < d.alpha.coeffs().size(); ++i) {
        std::snprintf(buf, sizeof buf, "alpha_%zu=%.10g\n",
                      d.alpha.coeffs().size() - 1 - i, d.alpha.coeffs()[i]);
        out += buf;
    }
    kv("g1", d.g1);
    kv("g0", d.g0);
    const auto roots = lti::poly_roots(d.alpha);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        std::snprintf(buf, sizeof buf, "closed_loop_root_%zu=%.10g%+.10gi\n", i,
                      roots[i].real(), roots[i].imag());
        out += buf;
    }
    kv("nominal_power_W", d.nominal_power_W);
    kv("nominal_temp_C", d.nominal_temp_C);
    kv("L_min_W", d.u_min);
    kv("L_max_W", d.u_max);
    for (const auto& w : d.warnings) {
        out += "warning=";
        out += w;
        out += '\n';
    }
    return out;
}

Controller::Controller(const ControllerDesign& d) : d_(d) {
    last_cmd_ = std::clamp(d_.nominal_power_W, d_.u_min, d_.u_max);
}

void Controller::reset() {
    fb_ = 0.0;
    e_prev_ = 0.0;
    last_cmd_ = std::clamp(d_.nominal_power_W, d_.u_min, d_.u_max);
    first_ = true;
    fault_ = false;
}

double Controller::feedforward(double ref_now_C, double ref_next_C) const {
    const double r0 = ref_now_C - d_.nominal_temp_C;
    const double r1 = ref_next_C - d_.nominal_temp_C;
    return (r1 - d_.plant_pole * r0) / d_.plant_gain;
}

double Controller::step(double ref_now_C, double ref_next_C, double meas_C) {
    if (!std::isfinite(ref_now_C) || !std::isfinite(ref_next_C))
        throw DomainError("reference must be finite");
    if (!std::isfinite(meas_C)) {
        fault_ = true;
        if (first_) {
            // No measurement seen yet: command the pure feedforward value.
            const double raw =
                d_.nominal_power_W + feedforward(ref_now_C, ref_next_C);
            last_cmd_ = std::clamp(raw, d_.u_min, d_.u_max);
        }
        return last_cmd_;
    }
    fault_ = false;

    const double e = ref_now_C - meas_C;
    if (first_) {
        e_prev_ = e;
        first_ = false;
    }
    const double ff = feedforward(ref_now_C, ref_next_C);
    const double fb_new = fb_ - (d_.g1 * e + d_.g0 * e_prev_) / d_.plant_gain;
    const double raw = d_.nominal_power_W + ff + fb_new;
    const double cmd = std::clamp(raw, d_.u_min, d_.u_max);
    fb_ = fb_new + (cmd - raw);
    e_prev_ = e;
    last_cmd_ = cmd;
    return cmd;
}

}  // namespace dgf::control
