#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dgf::sysid {

/// Two-level pseudo-random excitation from a 10-bit maximal-length shift
/// register (taps 10 and 7). Each register bit is held for min_dwell_s,
/// so the spectral content tops out near 1/(2*min_dwell). The seed picks
/// the register phase; identical seeds give identical sequences.
std::vector<double> gen_prbs(double low_W, double high_W, double min_dwell_s,
                             double duration_s, double dt_s, std::uint64_t seed);

/// Linear frequency sweep: mean + amp * sin(2*pi*(f0*t + (f1-f0)*t^2/(2*D))).
/// f0 == f1 degenerates to a pure sine at f0.
std::vector<double> gen_chirp(double f0_Hz, double f1_Hz, double duration_s,
                              double mean_W, double amplitude_W, double dt_s);

/// mean + amplitude * sin(2*pi*t/period).
std::vector<double> gen_sine(double period_s, double mean_W, double amplitude_W,
                             double duration_s, double dt_s);

/// Drop the first and last trim_mm of a constant-speed track record
/// (sample count must agree with track_length/v within a small slack).
std::pair<std::vector<double>, std::vector<double>> trim_track(
    std::span<const double> u, std::span<const double> y, double scan_speed_mm_s,
    double track_length_mm, double dt_s, double trim_mm = 10.0);

struct IdentifiedModel {
    double gain_C_per_W = 0.0;     ///< K
    double time_constant_s = 0.0;  ///< tau
    double pole = 0.0;             ///< discrete pole p in (0,1)
    double input_coeff = 0.0;      ///< q = K*(1-p)
    double intercept_C = 0.0;      ///< residual constant about the data means
    double nominal_power_W = 0.0;  ///< mean of the input record
    double nominal_temp_C = 0.0;   ///< mean of the output record
    double fit_percent_train = 0.0;
    std::size_t n_samples = 0;
};

/// Equation-error least squares on mean-removed data:
/// dT[k+1] = p*dT[k] + q*dL[k] + c; then tau = -dt/ln(p), K = q/(1-p).
/// The constant c absorbs the offset a finite record's means leave behind,
/// so a noise-free record is recovered exactly. Throws FitError for
/// unidentifiable input (constant u), a singular normal system, or a pole
/// outside (0,1).
IdentifiedModel fit_first_order(std::span<const double> u,
                                std::span<const double> y, double dt_s);

/// 100*(1 - |y - y_model| / |y - mean(y)|); throws FitError when y is flat.
double fit_percent(std::span<const double> y, std::span<const double> y_model);

/// Model response to an input record, in absolute units, started at y0.
std::vector<double> simulate_model(const IdentifiedModel& m,
                                   std::span<const double> u, double y0);

/// key,value table of the fitted model.
std::string fit_csv(const IdentifiedModel& m);

}  // namespace dgf::sysid
