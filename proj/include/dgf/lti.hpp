#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dgf/errors.hpp"

namespace dgf::lti {

/// Dense real polynomial, coefficients stored highest power first.
/// The zero polynomial is represented as {0}.
class Polynomial {
  public:
    Polynomial() : c_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double leading() const { return c_.front(); }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

    double eval(double x) const;
    std::complex<double> eval(std::complex<double> x) const;

    double operator[](std::size_t i) const { return c_[i]; }

  private:
    std::vector<double> c_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_sub(const Polynomial& a, const Polynomial& b);
double poly_eval(const Polynomial& p, double x);

/// Closed-form roots, degree 2 at most. Higher degrees throw DesignError.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// Monic polynomial whose roots are exp(-dt/tau) for each given tau.
/// Empty input yields the constant polynomial 1.
Polynomial poly_from_time_constants(std::span<const double> taus, double dt);

/// K / (tau*s + 1)
struct ContinuousFirstOrder {
    double gain;
    double time_constant;
};

/// Rational discrete-time transfer function in z, fixed sample time.
/// Unless tagged preview, deg(num) <= deg(den). A preview block is
/// allowed one extra numerator degree and consumes the input one step
/// ahead when simulated.
class DiscreteTransferFunction {
  public:
    DiscreteTransferFunction(Polynomial num, Polynomial den, double dt,
                             bool preview = false);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    double dt() const { return dt_; }
    bool preview() const { return preview_; }

    /// num(1)/den(1); throws DomainError when den(1) == 0 (integrating block).
    double dc_gain() const;

  private:
    Polynomial num_;
    Polynomial den_;
    double dt_;
    bool preview_;
};

/// Zero-order-hold discretization of a first order plant:
/// b(1-p) / (z - p) with p = exp(-dt/tau), preserving the DC gain.
DiscreteTransferFunction zoh_discretize(const ContinuousFirstOrder& sys, double dt);

/// Simulate the response to an input sequence from a given initial state
/// (direct form II transposed; state length = deg(den), zeros by default).
/// Preview blocks read the input shifted one step ahead, holding the
/// final sample.
std::vector<double> simulate(const DiscreteTransferFunction& tf,
                             std::span<const double> input,
                             std::span<const double> initial_state = {});

}  // namespace dgf::lti
