#pragma once

#include <functional>

#include "wedgeframe/core_seq.hpp"

namespace wedgeframe {

/// Nonincreasing envelope w(x) = C (1+x)^(-alpha) exp(-beta x^2) on x >= 0,
/// identically zero beyond `cutoff`.
struct Envelope {
  double C = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double cutoff = kInf;

  static Envelope power_law(double C, double alpha) { return {C, alpha, 0.0, kInf}; }
  static Envelope gaussian(double C, double beta) { return {C, 0.0, beta, kInf}; }
  static Envelope zero_beyond(double x) { return {1.0, 0.0, 0.0, x}; }

  double operator()(double x) const;
  bool compact() const { return std::isfinite(cutoff); }
  void validate() const;
};

/// Smallest envelope of the given (alpha, beta) shape that dominates the
/// running sup of f on [0, x_max], sampled with `step` and inflated by
/// `inflation`. Throws ENVELOPE if the measured constant is not finite.
Envelope dominating_envelope(const std::function<double(double)>& f, double alpha, double beta,
                             double x_max, double step, double inflation);

/// F(x) = A (1+x)^c exp(-b x^2), the closed-form family used for remainders.
struct PowerGauss {
  double A = 0.0;
  double c = 0.0;
  double b = 0.0;

  double operator()(double x) const;
  bool nonincreasing_from(double x) const;
  /// Smallest x > 0 from which integral_from and sum_from are finite.
  double certified_from() const;
  /// Upper bound on the integral of F over [x, inf); +inf if not certifiable at x.
  double integral_from(double x) const;
  /// Upper bound on sum_{m>=0} F(x0 + m*step); +inf if not certifiable at x0.
  double sum_from(double x0, double step) const;
};

struct TailSum {
  double upper = 0.0;
  double lower = 0.0;
};

/// sum_{k >= K} k^(d-1) w(k)^q for integer K >= 1 and finite q.
TailSum inner_series(const Envelope& w, long K, double q, int d);

/// For p < inf: sum_{K >= Ks} K^(p r2 + d - 1) R(K)^p, and for p = inf:
/// sup_{K >= Ks} K^r2 R(K), where R(K) = (sum_{k >= K} k^(d-1) w(k)^q)^(1/q)
/// for finite q and R(K) = w(K) for q = inf.
TailSum outer_series(const Envelope& w, int d, double q, double p, double r2, long Ks);

}  // namespace wedgeframe
