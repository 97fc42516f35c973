#pragma once

// Closed-form Brownian quantities. Every Monte Carlo estimator in the
// library has at least one of these as its oracle. "Brownian motion" means
// standard (unit variance rate) one-dimensional Brownian motion from 0
// unless a start point is given.

namespace trapsim::analytics {

/// E|R_t| = sqrt(8t/pi), expected range of Brownian motion on [0, t].
double expected_range(double t);

/// Leading-order large-t/a^2 asymptotic of P(|R_t| < a):
/// 8 pi^2 (t/a^2) exp(-pi^2 t / (2 a^2)). Not a probability for small t/a^2.
double range_tail_asymptotic(double t, double a_len);

/// Joint density of (running max, argmax) on [0, t]. Zero off
/// m >= 0, 0 < u < t.
double max_argmax_density(double m, double u, double t);

/// Arcsine density of the argmax time on (0, t); 0 outside.
double argmax_density(double u, double t);
double argmax_cdf(double u, double t);

/// Density of the first hitting time of 0 for Brownian motion from x > 0.
double first_passage_density(double x, double u);

/// P_x(tau_0 > t) = erf(x / sqrt(2t)).
double stay_positive_prob(double x, double t);

/// Transition density from x at time 0 to y at time s for Brownian motion
/// conditioned to stay positive up to time t.
double conditioned_positive_transition(double x, double y, double s, double t);

/// P(sup_{s<=t} |B_s| < r).
///
/// Uses the Dirichlet eigenfunction series
///   (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 t / (8 r^2))
/// whose leading rate pi^2/8 is the principal Dirichlet eigenvalue of the
/// unit interval (with generator half the Laplacian). For t/r^2 < 1/2 the
/// method-of-images series is summed instead; it converges in a few terms
/// there while the eigen series needs hundreds.
double confinement_prob(double r, double t);

/// P(M_t <= m_hi, argmax in [u_lo, u_hi]) by integrating the joint density.
/// The m-integral is done in closed form, leaving a 1-D quadrature in u.
double box_mass_max_argmax(double t, double m_hi, double u_lo, double u_hi);

} // namespace trapsim::analytics
