#include "workfn/tradeoff.h"

#include <cmath>

#include "workfn/bits.h"

namespace workfn {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0)) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be positive");
}

}  // namespace

double log2_gamma_delta(double delta, double m, double n) {
  require_positive(delta, "delta");
  return (m + n) * (delta - 1.0);
}

double gamma_delta(double delta, double m, double n) { return std::exp2(log2_gamma_delta(delta, m, n)); }

double gamma_delta_exact(double M, double N, double delta1, double delta2) {
  require_positive(M, "M");
  require_positive(N, "N");
  return std::exp2((delta1 - 1.0) * std::log2(M) + (delta2 - 1.0) * std::log2(N));
}

double cost_ratio(double delta, double S, double I_eff, double m, double n) {
  require_positive(delta, "delta");
  require_positive(S, "S");
  if (I_eff < 0) throw Error(ErrorKind::invalid_argument, "I_eff must be non-negative");
  const double g = gamma_delta(delta, m, n);
  return (delta * g * S + I_eff) / (delta * (S + I_eff));
}

double stationarity_omega(double delta, double m, double n) {
  return delta * delta * gamma_delta(delta, m, n) * (m + n) / std::log(2.0);
}

double stationarity_omega_derivative(double delta, double m, double n) {
  return delta * delta * gamma_delta(delta, m, n) * (m + n) * std::log(2.0);
}

double optimal_delta(double omega, double m, double n, double delta_hi) {
  require_positive(omega, "omega");
  if (!(m + n > 0)) throw Error(ErrorKind::invalid_argument, "m + n must be positive");
  // log of the published form, increasing in delta
  auto f = [&](double d) {
    return 2.0 * std::log(d) + log2_gamma_delta(d, m, n) * std::log(2.0) + std::log((m + n) / std::log(2.0)) - std::log(omega);
  };
  double lo = 1e-12, hi = delta_hi;
  if (f(hi) < 0) throw Error(ErrorKind::not_found, "no stationary point below delta_hi");
  if (f(lo) > 0) throw Error(ErrorKind::not_found, "no stationary point above zero");
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double argmin_delta(double omega, double m, double n, double delta_hi) {
  require_positive(omega, "omega");
  auto f = [&](double d) { return cost_ratio(d, 1.0, omega, m, n); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-9, b = delta_hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 400 && b - a > 1e-12; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<RatioPoint> ratio_curve(double omega, double m, double n, double lo, double hi, std::size_t points) {
  std::vector<RatioPoint> out;
  if (points == 0) return out;
  for (std::size_t i = 0; i < points; ++i) {
    const double d = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back({d, cost_ratio(d, 1.0, omega, m, n)});
  }
  return out;
}

}  // namespace workfn
