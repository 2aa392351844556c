#pragma once

#include <cstddef>
#include <vector>

namespace workfn {

// Scaling the processed bits per step by delta multiplies the FSM size by
// delta * Gamma_delta.
double gamma_delta(double delta, double m, double n);
double log2_gamma_delta(double delta, double m, double n);
// M^(delta1-1) * N^(delta2-1).
double gamma_delta_exact(double M, double N, double delta1, double delta2);

// Lower bound on C'/C: (1/delta) (delta Gamma S + I_eff) / (S + I_eff).
double cost_ratio(double delta, double S, double I_eff, double m, double n);

// omega = I_eff / S at which the ratio is stationary, in the published
// form delta^2 Gamma (m+n) / ln 2.
double stationarity_omega(double delta, double m, double n);
// The same condition obtained by differentiating cost_ratio with
// Gamma = 2^((m+n)(delta-1)): delta^2 Gamma (m+n) ln 2.
double stationarity_omega_derivative(double delta, double m, double n);

// Root of stationarity_omega(delta) = omega by bisection; Error if no root
// below delta_hi.
double optimal_delta(double omega, double m, double n, double delta_hi = 64.0);
// Minimizer of cost_ratio over delta for I_eff = omega * S (golden section).
double argmin_delta(double omega, double m, double n, double delta_hi = 64.0);

struct RatioPoint {
  double delta;
  double ratio;
};
std::vector<RatioPoint> ratio_curve(double omega, double m, double n, double lo, double hi, std::size_t points);

}  // namespace workfn
