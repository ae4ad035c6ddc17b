#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dgf/errors.hpp"

namespace dgf::optics {

/// TEM00 beam. waist_location is the axial coordinate of the waist measured
/// from the beam's reference plane, along propagation. All lengths in meters.
struct GaussianBeam {
    double wavelength;
    double waist_radius;
    double waist_location = 0.0;

    double rayleigh_range() const;
};

struct FreeSpace {
    double length;
};
struct ThinLens {
    double focal_length;
};
/// Off-axis parabolic mirror, treated as an ideal thin lens of the
/// reflected focal length.
struct ParabolicMirror {
    double focal_length;
};

using OpticalElement = std::variant<FreeSpace, ThinLens, ParabolicMirror>;

struct Abcd {
    double a, b, c, d;
};

Abcd element_matrix(const OpticalElement& e);
Abcd compose(const Abcd& second, const Abcd& first);

/// Propagate through the chain in order. The returned beam is referenced to
/// the chain's output plane. Throws SingularityError on a degenerate C*q+D.
GaussianBeam propagate(const GaussianBeam& beam, std::span<const OpticalElement> chain);

/// 1/e^2 intensity radius at axial distance z from the waist.
double beam_radius(const GaussianBeam& beam, double z_from_waist);

/// Beam radius at an axial position measured in the beam's reference frame.
double beam_radius_at_position(const GaussianBeam& beam, double z_position);

struct IntensityQuery {
    double power;            // W
    double radial_offset;    // m from the beam axis
    double axial_distance;   // m from the waist
};

/// Irradiance in W/m^2: I(r,z) = 2P/(pi w^2) exp(-2 r^2 / w^2).
double intensity(const IntensityQuery& q, const GaussianBeam& beam);

/// Fraction of total power inside a centered disk of radius R at radius w:
/// 1 - exp(-2 R^2 / w^2).
double centered_power_fraction(double disk_radius, double beam_radius);

/// Power through a disk of radius R at axial distance z, the disk center
/// displaced laterally by `offset` from the beam axis. Centered queries use
/// the closed form; offset ones an adaptive midpoint quadrature refined to
/// 1e-5 relative change.
double power_in_disk(const GaussianBeam& beam, double power, double z_from_waist,
                     double disk_radius, double offset = 0.0);

/// Lateral displacement of a filament tip with free length L bent by theta.
double offset_from_bend_angle(double free_length, double bend_angle_rad);

struct FieldGrid {
    std::vector<double> x;       // m
    std::vector<double> z;       // m, from waist
    std::vector<double> values;  // W/mm^2, row-major [z][x]

    double at(std::size_t iz, std::size_t ix) const { return values[iz * x.size() + ix]; }
};

/// Sample I(|x|, z) over a rectangular grid; intensities in W/mm^2.
FieldGrid field_grid(const GaussianBeam& beam, double power,
                     double x_min, double x_max, double z_min, double z_max,
                     std::size_t nx, std::size_t nz);

/// CSV with header x_mm,z_mm,intensity_W_per_mm2.
std::string field_grid_csv(const FieldGrid& grid);

}  // namespace dgf::optics
