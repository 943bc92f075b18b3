#include "sbridge/closed_forms.hpp"

#include <cmath>
#include <numbers>

namespace sbridge::gallery {

namespace {
constexpr double pi = std::numbers::pi;
}

double gaussian(double x, double mean, double variance) {
    const double d = x - mean;
    return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * pi * variance);
}

std::complex<double> psi(double x, double t) {
    using namespace std::complex_literals;
    const std::complex<double> one_it = 1.0 + 1i * t;
    return std::pow(2.0 / pi, 0.25) / std::sqrt(2.0 * one_it) * std::exp(-x * x / (4.0 * one_it));
}

double rho(double x, double t) { return gaussian(x, 0.0, 1.0 + t * t); }

double theta(double x, double t) {
    const double q = 1.0 + t * t;
    return std::pow(2.0 * pi * q, -0.25) * std::exp(-x * x / 4.0 * (1.0 - t) / q - 0.5 * std::atan(t));
}

double theta_star(double x, double t) {
    const double q = 1.0 + t * t;
    return std::pow(2.0 * pi * q, -0.25) * std::exp(-x * x / 4.0 * (1.0 + t) / q + 0.5 * std::atan(t));
}

double half_omega(double x, double t) {
    const double q = 1.0 + t * t;
    return x * x / (2.0 * q * q) - 1.0 / q;
}

double half_omega_gradient(double x, double t) {
    const double q = 1.0 + t * t;
    return x / (q * q);
}

double forward_drift(double x, double t) { return -(1.0 - t) / (1.0 + t * t) * x; }

double backward_drift(double x, double t) { return (1.0 + t) / (1.0 + t * t) * x; }

double current_velocity(double x, double t) { return x * t / (1.0 + t * t); }

double phase(double x, double t) { return -0.5 * std::atan(t) + x * x * t / (4.0 * (1.0 + t * t)); }

PacketValues eval_packet(double x, double t) {
    PacketValues v{};
    v.psi = psi(x, t);
    v.rho = rho(x, t);
    v.theta = theta(x, t);
    v.theta_star = theta_star(x, t);
    v.half_omega = half_omega(x, t);
    v.forward_drift = forward_drift(x, t);
    v.backward_drift = backward_drift(x, t);
    v.current_velocity = current_velocity(x, t);
    v.amplitude = 0.5 * std::log(v.rho);
    v.phase = phase(x, t);
    return v;
}

double example1_density(double y, double s, double x, double t) {
    return gaussian(x, y, t * t - s * s);
}

double quantum_k1(double y, double s, double x, double t) {
    // Combine the exponents so that far tails do not overflow the ratio.
    const double var = t * t - s * s;
    const double qs = 1.0 + s * s;
    const double qt = 1.0 + t * t;
    const double d = x - y;
    const double expo = -d * d / (2.0 * var) - y * y / 4.0 * (1.0 - s) / qs +
                        x * x / 4.0 * (1.0 - t) / qt + 0.5 * (std::atan(t) - std::atan(s));
    return std::pow(qt / qs, 0.25) * std::exp(expo) / std::sqrt(2.0 * pi * var);
}

double pinning_coefficient(double t, double s) {
    return std::sqrt(((1.0 - t) * (1.0 - t) + 2.0 * s) / (1.0 + s * s));
}

double pinning_coefficient_rate(double t, double s) {
    const double c = pinning_coefficient(t, s);
    return -(1.0 - t) / ((1.0 + s * s) * c);
}

double pinned_density(double y, double s, double x, double t) {
    return gaussian(x, pinning_coefficient(t, s) * y, 2.0 * (t - s));
}

double quantum_k2(double y, double s, double x, double t) {
    const double var = 2.0 * (t - s);
    const double qs = 1.0 + s * s;
    const double qt = 1.0 + t * t;
    const double d = x - pinning_coefficient(t, s) * y;
    const double expo = -d * d / (2.0 * var) - y * y / 4.0 * (1.0 - s) / qs +
                        x * x / 4.0 * (1.0 - t) / qt + 0.5 * (std::atan(t) - std::atan(s));
    return std::pow(qt / qs, 0.25) * std::exp(expo) / std::sqrt(2.0 * pi * var);
}

double pinned_drift(double y, double s, double t) { return y * pinning_coefficient_rate(t, s); }

double markov_family(double label_y, double label_s, double x1, double t1, double x2, double t2) {
    const double shift = (pinning_coefficient(t2, label_s) - pinning_coefficient(t1, label_s)) * label_y;
    return gaussian(x2, x1 + shift, 2.0 * (t2 - t1));
}

} // namespace sbridge::gallery
