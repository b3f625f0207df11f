#include "wedgeframe/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wedgeframe/error.hpp"

namespace wedgeframe {

namespace {

constexpr long kFirstCut = 1024;
constexpr long kMaxCut = long(1) << 22;
constexpr double kStopRatio = 1e-15;

double log_w(const Envelope& w, double x) {
  return std::log(w.C) - w.alpha * std::log1p(x) - w.beta * x * x;
}

// k^(d-1) w(k)^q for k >= 1.
double inner_term(const Envelope& w, double k, double q, int d) {
  if (w.C == 0.0 || k > w.cutoff) return 0.0;
  return std::exp((d - 1) * std::log(k) + q * log_w(w, k));
}

long ceil_long(double x) {
  if (!(x < 9e15)) throw Error(ErrorCode::DivergentTail, "tail cannot be certified at a finite index");
  return static_cast<long>(std::ceil(x));
}

PowerGauss inner_family(const Envelope& w, double q, int d) {
  PowerGauss F{std::pow(w.C, q), (d - 1) - w.alpha * q, w.beta * q};
  if (!w.compact() && F.A > 0.0 && F.b == 0.0 && F.c >= -1.0)
    throw Error(ErrorCode::DivergentTail, "inner series sum k^(d-1) w(k)^q diverges");
  return F;
}

}  // namespace

double Envelope::operator()(double x) const {
  if (x > cutoff) return 0.0;
  x = std::max(x, 0.0);
  if (C == 0.0) return 0.0;
  return C * std::exp(-alpha * std::log1p(x) - beta * x * x);
}

void Envelope::validate() const {
  if (!(C >= 0.0) || !std::isfinite(C)) throw Error(ErrorCode::Envelope, "envelope constant must be finite and >= 0");
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw Error(ErrorCode::Envelope, "envelope exponents must be >= 0 so that w is nonincreasing");
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::Envelope, "envelope cutoff must be >= 0");
}

Envelope dominating_envelope(const std::function<double(double)>& f, double alpha, double beta, double x_max,
                             double step, double inflation) {
  double running = 0.0;
  double constant = 0.0;
  const long n = static_cast<long>(std::floor(x_max / step));
  for (long i = 0; i <= n; ++i) {
    const double x = i * step;
    const double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::Envelope, "window magnitude is not finite");
    running = std::max(running, std::abs(v));
    constant = std::max(constant, running * std::exp(alpha * std::log1p(x) + beta * x * x));
  }
  constant *= inflation;
  if (!std::isfinite(constant)) throw Error(ErrorCode::Envelope, "envelope constant is not finite");
  return Envelope{constant, alpha, beta, kInf};
}

double PowerGauss::operator()(double x) const {
  if (A == 0.0) return 0.0;
  return A * std::exp(c * std::log1p(x) - b * x * x);
}

bool PowerGauss::nonincreasing_from(double x) const {
  if (A == 0.0) return true;
  if (b == 0.0) return c <= 0.0;
  return c <= 2.0 * b * x * (1.0 + x);
}

double PowerGauss::certified_from() const {
  if (A == 0.0) return 0.0;
  if (b == 0.0) return c < -1.0 ? 0.0 : kInf;
  if (c <= 0.0) return 0.0;
  return (-b + std::sqrt(b * b + 4.0 * b * c)) / (2.0 * b);
}

double PowerGauss::integral_from(double x) const {
  if (A == 0.0) return 0.0;
  x = std::max(x, 0.0);
  if (b == 0.0) {
    if (c >= -1.0) return kInf;
    return A * std::exp((c + 1.0) * std::log1p(x)) / (-c - 1.0);
  }
  if (c <= 0.0) {
    // (1+y)^c <= (1+x)^c, leaving a Gaussian tail.
    const double sb = std::sqrt(b);
    return A * std::exp(c * std::log1p(x)) * 0.5 * std::sqrt(M_PI) / sb * std::erfc(sb * x);
  }
  if (x <= 0.0 || b * x * (1.0 + x) < c) return kInf;
  return (*this)(x) / (b * x);
}

double PowerGauss::sum_from(double x0, double step) const {
  if (A == 0.0) return 0.0;
  if (!nonincreasing_from(x0)) return kInf;
  const double I = integral_from(x0);
  if (!std::isfinite(I)) return kInf;
  return (*this)(x0) + I / step;
}

TailSum inner_series(const Envelope& w, long K, double q, int d) {
  if (K < 1) throw Error(ErrorCode::Config, "inner series starts at K >= 1");
  if (std::isinf(q)) throw Error(ErrorCode::Config, "inner series needs a finite exponent");
  if (w.compact()) {
    CompensatedSum acc;
    for (long k = K; k <= static_cast<long>(std::floor(w.cutoff)); ++k) acc.add(inner_term(w, k, q, d));
    return {acc.value(), acc.value()};
  }
  const PowerGauss F = inner_family(w, q, d);
  const long kcert = std::max(K, ceil_long(F.certified_from()));
  CompensatedSum acc;
  long k = K;
  for (long n = kFirstCut;; n *= 2) {
    const long target = std::max(K + n, kcert);
    for (; k < target; ++k) acc.add(inner_term(w, static_cast<double>(k), q, d));
    const double rem = F.sum_from(static_cast<double>(k), 1.0);
    if (rem <= kStopRatio * acc.value() || n >= kMaxCut) return {acc.value() + rem, acc.value()};
  }
}

TailSum outer_series(const Envelope& w, int d, double q, double p, double r2, long Ks) {
  if (Ks < 1) throw Error(ErrorCode::Config, "outer series starts at K >= 1");
  const bool sup_outer = std::isinf(p);
  const bool sup_inner = std::isinf(q);
  const double e = sup_outer ? r2 : p * r2 + (d - 1);

  PowerGauss F;
  if (!sup_inner) F = inner_family(w, q, d);

  // Explicit part over [Ks, Kc), inner suffix sums closed by Rin at Kc.
  auto explicit_part = [&](long Kc, double Rin, TailSum& out) {
    const std::size_t n = static_cast<std::size_t>(Kc - Ks);
    std::vector<double> suffix;
    if (!sup_inner) {
      suffix.resize(n);
      CompensatedSum acc;
      for (long k = Kc - 1; k >= Ks; --k) {
        acc.add(inner_term(w, static_cast<double>(k), q, d));
        suffix[static_cast<std::size_t>(k - Ks)] = acc.value();
      }
    }
    CompensatedSum up, lo;
    double up_max = 0.0, lo_max = 0.0;
    for (long K = Ks; K < Kc; ++K) {
      double root_up, root_lo;
      if (sup_inner) {
        root_up = root_lo = w(static_cast<double>(K));
      } else {
        const double s = suffix[static_cast<std::size_t>(K - Ks)];
        root_up = std::pow(s + Rin, 1.0 / q);
        root_lo = std::pow(s, 1.0 / q);
      }
      const double kw = std::pow(static_cast<double>(K), e);
      if (sup_outer) {
        up_max = std::max(up_max, kw * root_up);
        lo_max = std::max(lo_max, kw * root_lo);
      } else {
        up.add(kw * std::pow(root_up, p));
        lo.add(kw * std::pow(root_lo, p));
      }
    }
    out = sup_outer ? TailSum{up_max, lo_max} : TailSum{up.value(), lo.value()};
  };

  if (w.compact()) {
    const long kend = std::max(Ks, static_cast<long>(std::floor(w.cutoff)) + 1);
    TailSum out;
    explicit_part(kend, 0.0, out);
    return out;
  }

  // Bound on R(K) for K >= Kc by G = {A, c, b}, then on the outer term by H.
  auto root_family = [&](long Kc) {
    if (sup_inner) return PowerGauss{w.C, -w.alpha, w.beta};
    PowerGauss T;
    if (F.b > 0.0) {
      T = PowerGauss{F.A * (1.0 + 1.0 / (F.b * Kc)), F.c, F.b};
    } else {
      T = PowerGauss{F.A * (1.0 / (1.0 + Kc) + 1.0 / (-F.c - 1.0)), F.c + 1.0, 0.0};
    }
    return PowerGauss{std::pow(T.A, 1.0 / q), T.c / q, T.b / q};
  };
  auto outer_family = [&](const PowerGauss& G) {
    const double kfac = std::max(1.0, std::pow(2.0, -e));
    if (sup_outer) return PowerGauss{kfac * G.A, e + G.c, G.b};
    return PowerGauss{kfac * std::pow(G.A, p), e + G.c * p, G.b * p};
  };
  {
    const PowerGauss H = outer_family(root_family(Ks + 1));
    if (H.A > 0.0 && H.b == 0.0 && (sup_outer ? H.c >= 0.0 : H.c >= -1.0))
      throw Error(ErrorCode::DivergentTail, "outer series diverges for this envelope");
  }
  long kcert = Ks + 1;
  if (!sup_inner) kcert = std::max(kcert, ceil_long(F.certified_from()));
  {
    const PowerGauss H = outer_family(root_family(kcert));
    double hc;
    if (sup_outer) {
      hc = H.b > 0.0 && H.c > 0.0 ? (-H.b + std::sqrt(H.b * H.b + 2.0 * H.b * H.c)) / (2.0 * H.b) : 0.0;
    } else {
      hc = H.certified_from();
    }
    kcert = std::max(kcert, ceil_long(hc));
  }

  for (long n = kFirstCut;; n *= 2) {
    const long Kc = std::max(Ks + n, kcert);
    const double Rin = sup_inner ? 0.0 : F.sum_from(static_cast<double>(Kc), 1.0);
    TailSum part;
    explicit_part(Kc, Rin, part);
    const PowerGauss H = outer_family(root_family(Kc));
    if (sup_outer) {
      const double tail = H.nonincreasing_from(static_cast<double>(Kc)) ? H(static_cast<double>(Kc)) : kInf;
      const double upper = std::max(part.upper, tail);
      if (upper - part.lower <= kStopRatio * upper || n >= kMaxCut) return {upper, part.lower};
    } else {
      const double upper = part.upper + H.sum_from(static_cast<double>(Kc), 1.0);
      if (upper - part.lower <= kStopRatio * upper || n >= kMaxCut) return {upper, part.lower};
    }
  }
}

}  // namespace wedgeframe
