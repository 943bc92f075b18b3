#pragma once

#include <complex>

/// Closed-form fields of the free Gaussian packet (rescaled units, nu = 1)
/// and of the two alternative kernel constructions built on top of it.
namespace sbridge::gallery {

/// All closed-form values of the free packet at one space-time point.
struct PacketValues {
    std::complex<double> psi;
    double rho;
    double theta;
    double theta_star;
    double half_omega;
    double forward_drift;
    double backward_drift;
    double current_velocity;
    double amplitude; ///< R = ln|psi|
    double phase;     ///< S = arg psi, continuous in x
};

std::complex<double> psi(double x, double t);
double rho(double x, double t);
double theta(double x, double t);
double theta_star(double x, double t);
/// Potential Omega/2 = x^2 / (2(1+t^2)^2) - 1/(1+t^2).
double half_omega(double x, double t);
/// Spatial derivative of Omega/2.
double half_omega_gradient(double x, double t);
double forward_drift(double x, double t);
double backward_drift(double x, double t);
double current_velocity(double x, double t);
double phase(double x, double t);
PacketValues eval_packet(double x, double t);

/// Transition density with vanishing drift and diffusion coefficient t:
/// Gaussian in x, mean y, variance t^2 - s^2.
double example1_density(double y, double s, double x, double t);

/// k1 = example1_density * theta(y, s) / theta(x, t).
double quantum_k1(double y, double s, double x, double t);

/// Pinning coefficient c_{t,s} = sqrt(((1-t)^2 + 2s) / (1+s^2)).
double pinning_coefficient(double t, double s);
/// Partial derivative of c_{t,s} in t.
double pinning_coefficient_rate(double t, double s);

/// Pinned density p_{y,s}(x,t): Gaussian in x, mean c_{t,s} y, variance 2(t-s).
double pinned_density(double y, double s, double x, double t);

/// k2 = pinned_density * theta(y, s) / theta(x, t).
double quantum_k2(double y, double s, double x, double t);

/// Drift b_{y,s}(t) = y * dc_{t,s}/dt of the forward equation solved by the pinned density.
double pinned_drift(double y, double s, double t);

/// Markov family p_{y,s}(x1,t1,x2,t2): Gaussian in x2, mean x1 + (c_{t2,s} - c_{t1,s}) y,
/// variance 2(t2-t1).
double markov_family(double label_y, double label_s, double x1, double t1, double x2, double t2);

/// Gaussian density with the given mean and variance.
double gaussian(double x, double mean, double variance);

} // namespace sbridge::gallery
