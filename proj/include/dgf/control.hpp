#pragma once

#include <span>
#include <string>
#include <vector>

#include "dgf/lti.hpp"

namespace dgf::control {

/// Pole placement against a first-order pulse model b/(z-a) with an
/// integrator forced into the loop, so constant references and constant
/// load shifts are rejected exactly. Commands are issued about a nominal
/// operating point (L_n, T_n).
struct ControllerDesign {
    double dt_s = 0.0;
    double plant_pole = 0.0;   ///< a
    double plant_gain = 0.0;   ///< b, deg C per W per step
    lti::Polynomial alpha;     ///< target characteristic polynomial (monic, deg 2)
    double g1 = 0.0, g0 = 0.0; ///< correction numerator g(z) = g1*z + g0
    double u_min = 0.0, u_max = 0.0;
    double nominal_power_W = 0.0;
    double nominal_temp_C = 0.0;
    std::vector<std::string> warnings;
};

/// Design from pulse-model coefficients.
ControllerDesign design_discrete(double plant_pole, double plant_gain, double dt_s,
                                 std::span<const double> desired_taus_s,
                                 double u_min_W, double u_max_W,
                                 double nominal_power_W, double nominal_temp_C);

/// Design from a first-order discrete plant (validates shape and stability).
ControllerDesign design(const lti::DiscreteTransferFunction& plant,
                        std::span<const double> desired_taus_s, double u_min_W,
                        double u_max_W, double nominal_power_W,
                        double nominal_temp_C);

/// Design from a continuous first-order model via its exact pulse model.
ControllerDesign design_first_order(double gain_C_per_W, double tau_s, double dt_s,
                                    std::span<const double> desired_taus_s,
                                    double u_min_W, double u_max_W,
                                    double nominal_power_W, double nominal_temp_C);

/// Reconstructs (z-1)(z-a) - g(z) and checks it reproduces alpha to 1e-12.
lti::Polynomial closed_loop_poly(const ControllerDesign& d);

/// key=value design summary (plant, target polynomial, correction, roots).
std::string design_report(const ControllerDesign& d);

/// Runtime regulator: one-step-preview feedforward about (L_n, T_n) plus an
/// integrated correction, clamped to the actuator range. The stored
/// correction is re-anchored to the clamped command each step so saturation
/// cannot wind it up; a nonfinite measurement holds the last command and
/// raises the fault flag until readings return.
class Controller {
  public:
    explicit Controller(const ControllerDesign& d);

    /// Advance one sample. References and measurement in deg C; returns the
    /// clamped power command in W. ref_next enables the one-step preview;
    /// pass ref_now again for constant references.
    double step(double ref_now_C, double ref_next_C, double meas_C);

    bool fault() const { return fault_; }
    double correction() const { return fb_; }
    double last_command() const { return last_cmd_; }
    const ControllerDesign& design() const { return d_; }
    void reset();

  private:
    double feedforward(double ref_now_C, double ref_next_C) const;

    ControllerDesign d_;
    double fb_ = 0.0;
    double e_prev_ = 0.0;
    double last_cmd_ = 0.0;
    bool first_ = true;
    bool fault_ = false;
};

}  // namespace dgf::control
