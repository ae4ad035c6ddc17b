#include "dgf/lti.hpp"

#include <algorithm>
#include <cmath>

namespace dgf::lti {

namespace {

std::vector<double> strip_leading_zeros(std::vector<double> c) {
    std::size_t i = 0;
    while (i + 1 < c.size() && c[i] == 0.0) ++i;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
    return c;
}

void require_finite(const std::vector<double>& c) {
    for (double v : c) {
        if (!std::isfinite(v)) throw DomainError("polynomial coefficient not finite");
    }
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw DomainError("polynomial needs at least one coefficient");
    require_finite(coeffs);
    c_ = strip_leading_zeros(std::move(coeffs));
}

double Polynomial::eval(double x) const {
    double acc = 0.0;
    for (double c : c_) acc = acc * x + c;
    return acc;
}

std::complex<double> Polynomial::eval(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (double c : c_) acc = acc * x + c;
    return acc;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    std::vector<double> out(ca.size() + cb.size() - 1, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j) out[i + j] += ca[i] * cb[j];
    return Polynomial(std::move(out));
}

namespace {

Polynomial add_scaled(const Polynomial& a, const Polynomial& b, double sb) {
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    const std::size_t n = std::max(ca.size(), cb.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i) out[n - ca.size() + i] += ca[i];
    for (std::size_t i = 0; i < cb.size(); ++i) out[n - cb.size() + i] += sb * cb[i];
    return Polynomial(std::move(out));
}

}  // namespace

Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return add_scaled(a, b, 1.0); }
Polynomial poly_sub(const Polynomial& a, const Polynomial& b) { return add_scaled(a, b, -1.0); }

double poly_eval(const Polynomial& p, double x) { return p.eval(x); }

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
    const auto& c = p.coeffs();
    switch (p.degree()) {
        case 0:
            return {};
        case 1:
            return {std::complex<double>(-c[1] / c[0], 0.0)};
        case 2: {
            const double a = c[0], b = c[1], cc = c[2];
            const double disc = b * b - 4.0 * a * cc;
            if (disc >= 0.0) {
                // Citardauq-stable form: avoid cancellation when b dominates.
                const double s = std::sqrt(disc);
                const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
                double r1 = q / a;
                double r2 = (q != 0.0) ? cc / q : -b / a - r1;
                return {std::complex<double>(r1, 0.0), std::complex<double>(r2, 0.0)};
            }
            const double re = -b / (2.0 * a);
            const double im = std::sqrt(-disc) / (2.0 * a);
            return {std::complex<double>(re, im), std::complex<double>(re, -im)};
        }
        default:
            throw DesignError("closed-form roots support degree <= 2 only");
    }
}

Polynomial poly_from_time_constants(std::span<const double> taus, double dt) {
    if (dt <= 0.0) throw DomainError("sample time must be positive");
    Polynomial acc(std::vector<double>{1.0});
    for (double tau : taus) {
        if (!(tau > 0.0)) throw DomainError("time constant must be positive");
        const double pole = std::exp(-dt / tau);
        acc = poly_mul(acc, Polynomial(std::vector<double>{1.0, -pole}));
    }
    return acc;
}

DiscreteTransferFunction::DiscreteTransferFunction(Polynomial num, Polynomial den,
                                                   double dt, bool preview)
    : num_(std::move(num)), den_(std::move(den)), dt_(dt), preview_(preview) {
    if (dt_ <= 0.0) throw DomainError("sample time must be positive");
    if (den_.is_zero()) throw DomainError("denominator must be nonzero");
    const int excess = num_.degree() - den_.degree();
    if (!preview_ && excess > 0)
        throw DesignError("improper transfer function requires the preview tag");
    if (preview_ && excess > 1)
        throw DesignError("preview blocks allow one step of lookahead only");
}

double DiscreteTransferFunction::dc_gain() const {
    const double d = den_.eval(1.0);
    if (d == 0.0) throw DomainError("dc gain undefined: pole at z = 1");
    return num_.eval(1.0) / d;
}

DiscreteTransferFunction zoh_discretize(const ContinuousFirstOrder& sys, double dt) {
    if (!(sys.time_constant > 0.0)) throw DomainError("time constant must be positive");
    if (!(dt > 0.0)) throw DomainError("sample time must be positive");
    const double p = std::exp(-dt / sys.time_constant);
    return DiscreteTransferFunction(
        Polynomial(std::vector<double>{sys.gain * (1.0 - p)}),
        Polynomial(std::vector<double>{1.0, -p}), dt);
}

namespace {

std::vector<double> simulate_proper(const Polynomial& num, const Polynomial& den,
                                    std::span<const double> input,
                                    std::span<const double> initial_state) {
    const auto& a_raw = den.coeffs();
    const double a0 = a_raw.front();
    const std::size_t n = a_raw.size();

    std::vector<double> a(n), b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = a_raw[i] / a0;
    const auto& b_raw = num.coeffs();
    for (std::size_t i = 0; i < b_raw.size(); ++i)
        b[n - b_raw.size() + i] = b_raw[i] / a0;

    std::vector<double> s(n - 1, 0.0);
    if (!initial_state.empty()) {
        if (initial_state.size() != n - 1)
            throw DomainError("initial state length must equal deg(den)");
        std::copy(initial_state.begin(), initial_state.end(), s.begin());
    }

    std::vector<double> y(input.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double u = input[k];
        const double yk = (n > 1 ? s[0] : 0.0) + b[0] * u;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            s[i] = s[i + 1] + b[i + 1] * u - a[i + 1] * yk;
        if (!s.empty()) s.back() = b[n - 1] * u - a[n - 1] * yk;
        y[k] = yk;
    }
    return y;
}

}  // namespace

std::vector<double> simulate(const DiscreteTransferFunction& tf,
                             std::span<const double> input,
                             std::span<const double> initial_state) {
    if (input.empty()) return {};
    const int excess = tf.num().degree() - tf.den().degree();
    if (!tf.preview() || excess <= 0)
        return simulate_proper(tf.num(), tf.den(), input, initial_state);

    // One-step preview: H(z) = z*G(z) with G(z) = num/(z*den) proper. Feed G
    // the input advanced by one sample, holding the final value.
    std::vector<double> shifted(input.begin() + 1, input.end());
    shifted.push_back(input.back());
    const auto den_z = poly_mul(tf.den(), Polynomial(std::vector<double>{1.0, 0.0}));
    return simulate_proper(tf.num(), den_z, shifted, initial_state);
}

}  // namespace dgf::lti
