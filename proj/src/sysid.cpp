#include "dgf/sysid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dgf/errors.hpp"

namespace dgf::sysid {

std::vector<double> gen_prbs(double low_W, double high_W, double min_dwell_s,
                             double duration_s, double dt_s, std::uint64_t seed) {
    if (dt_s <= 0.0) throw DomainError("sample time must be positive");
    if (high_W < low_W) throw DomainError("high level must not sit below low level");
    if (min_dwell_s < dt_s) throw DomainError("dwell must be at least one sample");
    if (duration_s < min_dwell_s) throw DomainError("duration shorter than one dwell");

    const std::size_t chip = std::size_t(std::llround(min_dwell_s / dt_s));
    const std::size_t n = std::size_t(std::llround(duration_s / dt_s));
    std::uint32_t reg = std::uint32_t(seed % 1023u) + 1u;  // nonzero 10-bit phase

    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double level = (reg & 1u) ? high_W : low_W;
        for (std::size_t i = 0; i < chip && out.size() < n; ++i) out.push_back(level);
        const std::uint32_t bit = ((reg >> 9) ^ (reg >> 6)) & 1u;
        reg = ((reg << 1) | bit) & 0x3FF;
    }
    return out;
}

std::vector<double> gen_chirp(double f0_Hz, double f1_Hz, double duration_s,
                              double mean_W, double amplitude_W, double dt_s) {
    if (dt_s <= 0.0 || duration_s <= 0.0)
        throw DomainError("duration and sample time must be positive");
    if (f0_Hz < 0.0 || f1_Hz < f0_Hz)
        throw DomainError("sweep needs 0 <= f0 <= f1");
    if (amplitude_W < 0.0) throw DomainError("amplitude must be nonnegative");

    const std::size_t n = std::size_t(std::llround(duration_s / dt_s));
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = double(k) * dt_s;
        const double phase = 2.0 * std::numbers::pi *
                             (f0_Hz * t + (f1_Hz - f0_Hz) * t * t / (2.0 * duration_s));
        out[k] = mean_W + amplitude_W * std::sin(phase);
    }
    return out;
}

std::vector<double> gen_sine(double period_s, double mean_W, double amplitude_W,
                             double duration_s, double dt_s) {
    if (dt_s <= 0.0 || duration_s <= 0.0)
        throw DomainError("duration and sample time must be positive");
    if (!(period_s > 2.0 * dt_s))
        throw DomainError("period must exceed two samples");
    const std::size_t n = std::size_t(std::llround(duration_s / dt_s));
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = mean_W + amplitude_W *
                              std::sin(2.0 * std::numbers::pi * double(k) * dt_s / period_s);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> trim_track(
    std::span<const double> u, std::span<const double> y, double scan_speed_mm_s,
    double track_length_mm, double dt_s, double trim_mm) {
    if (u.size() != y.size()) throw DomainError("input and output records differ in length");
    if (scan_speed_mm_s <= 0.0 || dt_s <= 0.0 || track_length_mm <= 0.0)
        throw DomainError("speed, length and sample time must be positive");
    if (trim_mm < 0.0) throw DomainError("trim must be nonnegative");
    if (2.0 * trim_mm >= track_length_mm)
        throw DomainError("trim would consume the whole track");

    const double expected = track_length_mm / (scan_speed_mm_s * dt_s);
    if (std::abs(double(u.size()) - expected) > std::max(2.0, 0.02 * expected))
        throw DomainError("sample count inconsistent with track geometry");

    const std::size_t k = std::size_t(std::llround(trim_mm / (scan_speed_mm_s * dt_s)));
    if (u.size() < 2 * k + 10) throw DomainError("trim left too few samples");
    std::vector<double> ut(u.begin() + k, u.end() - k);
    std::vector<double> yt(y.begin() + k, y.end() - k);
    return {std::move(ut), std::move(yt)};
}

double fit_percent(std::span<const double> y, std::span<const double> y_model) {
    if (y.size() != y_model.size() || y.empty())
        throw DomainError("fit metric needs two equal-length records");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    double err = 0.0, spread = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        err += (y[k] - y_model[k]) * (y[k] - y_model[k]);
        spread += (y[k] - mean) * (y[k] - mean);
    }
    if (spread <= 0.0) throw FitError("output record does not move");
    return 100.0 * (1.0 - std::sqrt(err / spread));
}

IdentifiedModel fit_first_order(std::span<const double> u, std::span<const double> y,
                                double dt_s) {
    if (u.size() != y.size()) throw DomainError("input and output records differ in length");
    const std::size_t n = u.size();
    if (n < 10) throw FitError("too few samples to fit a first-order model");
    if (dt_s <= 0.0) throw DomainError("sample time must be positive");

    double um = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        um += u[k];
        ym += y[k];
    }
    um /= double(n);
    ym /= double(n);

    std::vector<double> yd(n), ud(n);
    for (std::size_t k = 0; k < n; ++k) {
        yd[k] = y[k] - ym;
        ud[k] = u[k] - um;
    }
    double suu = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) suu += ud[k] * ud[k];
    if (suu <= 0.0) throw FitError("constant input cannot identify a gain");

    // Solve sum_k z[k] * ([y[k] u[k] 1] . x - y[k+1]) = 0 for x = (p, q, c).
    // The constant c absorbs the offset the finite record's means leave
    // behind, so a noise-free record is recovered exactly.
    auto weighted_ls = [&](const std::vector<double>& z) {
        double A[3][4] = {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double row[3] = {z[k], ud[k], 1.0};
            for (int i = 0; i < 3; ++i) {
                A[i][0] += row[i] * yd[k];
                A[i][1] += row[i] * ud[k];
                A[i][2] += row[i];
                A[i][3] += row[i] * yd[k + 1];
            }
        }
        const double scale =
            std::max({std::abs(A[0][0]), std::abs(A[1][1]), std::abs(A[2][2]), 1.0});
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            if (!(std::abs(A[piv][col]) > 1e-12 * scale))
                throw FitError("excitation does not separate pole and gain");
            if (piv != col)
                for (int cidx = 0; cidx < 4; ++cidx) std::swap(A[piv][cidx], A[col][cidx]);
            for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                const double f = A[r][col] / A[col][col];
                for (int cidx = col; cidx < 4; ++cidx) A[r][cidx] -= f * A[col][cidx];
            }
        }
        return std::array<double, 3>{A[0][3] / A[0][0], A[1][3] / A[1][1],
                                     A[2][3] / A[2][2]};
    };
    auto check_pole = [](double pole) {
        if (!(pole > 0.0 && pole < 1.0)) {
            char msg[96];
            std::snprintf(msg, sizeof msg, "fitted pole %.6g falls outside (0,1)", pole);
            throw FitError(msg);
        }
    };

    // Equation-error start, then instrumental-variable passes with the
    // deterministic model response as the instrument. Measurement noise sits
    // on both sides of the one-step regression, which biases the plain
    // least-squares pole low; the simulated instrument is noise-free by
    // construction, restoring consistency. Clean data reproduces the plain
    // solution bit for bit.
    auto est = weighted_ls(yd);
    check_pole(est[0]);
    std::vector<double> inst(n);
    for (int pass = 0; pass < 2; ++pass) {
        inst[0] = yd[0];
        for (std::size_t k = 0; k + 1 < n; ++k)
            inst[k + 1] = est[0] * inst[k] + est[1] * ud[k] + est[2];
        est = weighted_ls(inst);
        check_pole(est[0]);
    }
    const double p = est[0];
    const double q = est[1];
    const double c = est[2];

    IdentifiedModel m;
    m.pole = p;
    m.input_coeff = q;
    m.intercept_C = c;
    m.time_constant_s = -dt_s / std::log(p);
    m.gain_C_per_W = q / (1.0 - p);
    m.nominal_power_W = um;
    m.nominal_temp_C = ym;
    m.n_samples = n;

    std::vector<double> yhat(n);
    yhat[0] = y[0] - ym;
    for (std::size_t k = 0; k + 1 < n; ++k)
        yhat[k + 1] = p * yhat[k] + q * (u[k] - um) + c;
    std::vector<double> ydev(n);
    for (std::size_t k = 0; k < n; ++k) ydev[k] = y[k] - ym;
    m.fit_percent_train = fit_percent(ydev, yhat);
    return m;
}

std::vector<double> simulate_model(const IdentifiedModel& m,
                                   std::span<const double> u, double y0) {
    std::vector<double> yhat(u.size());
    if (u.empty()) return yhat;
    double dev = y0 - m.nominal_temp_C;
    yhat[0] = y0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        dev = m.pole * dev + m.input_coeff * (u[k] - m.nominal_power_W) + m.intercept_C;
        yhat[k + 1] = m.nominal_temp_C + dev;
    }
    return yhat;
}

std::string fit_csv(const IdentifiedModel& m) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "gain_C_per_W,tau_s,pole,input_coeff,intercept_C,"
                  "nominal_power_W,nominal_temp_C,fit_percent_train,n_samples\n"
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%zu\n",
                  m.gain_C_per_W, m.time_constant_s, m.pole, m.input_coeff,
                  m.intercept_C, m.nominal_power_W, m.nominal_temp_C,
                  m.fit_percent_train, m.n_samples);
    return buf;
}

}  // namespace dgf::sysid
