#include "wedgeframe/ident.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wedgeframe/error.hpp"
#include "wedgeframe/linsolve.hpp"
#include "wedgeframe/parallel.hpp"

namespace wedgeframe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phi(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

cplx expi(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Trapezoid weights Delta * eta(nu_n) for eta-check, zeros dropped.
struct NuRule {
  std::vector<double> nu;
  std::vector<double> w;
};

NuRule nu_rule(const SpreadingSpec& spec) {
  NuRule r;
  const double step = spec.a / spec.nu_nodes;
  for (int n = 0; n <= spec.nu_nodes; ++n) {
    const double v = spec.eta(n * step);
    if (v == 0.0) continue;
    r.nu.push_back(n * step);
    r.w.push_back(step * v);
  }
  return r;
}

cplx eta_check_rule(const NuRule& r, double u) {
  cplx acc = 0.0;
  for (std::size_t n = 0; n < r.nu.size(); ++n) acc += r.w[n] * expi(kTwoPi * r.nu[n] * u);
  return acc;
}

// Taps eta(t_m) exp(2 pi i xi t_m), t_m = m * t_step on [0, a].
std::vector<cplx> t_taps(const SpreadingSpec& spec, double xi) {
  const double ht = spec.t_step();
  const int M = static_cast<int>(std::floor(spec.a / ht + 1e-9));
  std::vector<cplx> taps(M + 1);
  for (int m = 0; m <= M; ++m) taps[m] = spec.eta(m * ht) * expi(kTwoPi * xi * m * ht);
  return taps;
}

void check_member(const SpreadingSpec& spec, double y, double xi) {
  if (std::abs(y) + spec.a + 6.0 > spec.L)
    throw Error(ErrorCode::GridRange, "time shift " + std::to_string(y) + " leaves the signal grid");
  if (spec.h > 1.0 / (2.0 * (std::abs(xi) + spec.a + 4.0)))
    throw Error(ErrorCode::UnresolvedGrid, "signal step does not resolve frequency " + std::to_string(xi));
}

// int eta(t) exp(2 pi i xi t) f(x - t) eta-check(x - t - y) dt on the signal grid.
SampledFunction modulated_on_grid(const SpreadingSpec& spec, const Signal& f, double y, double xi) {
  SampledFunction out = spec.grid_template();
  const int r = spec.t_ratio();
  const double ht = spec.t_step();
  const auto taps = t_taps(spec, xi);
  const std::size_t M = taps.size() - 1;
  const NuRule rule = nu_rule(spec);
  const std::size_t nfine = (out.size() - 1) * r + M + 1;
  const double s0 = out.x0 - static_cast<double>(M) * ht;
  std::vector<cplx> b(nfine);
  for (std::size_t i = 0; i < nfine; ++i) {
    const double s = s0 + static_cast<double>(i) * ht;
    b[i] = f(s) * eta_check_rule(rule, s - y);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    cplx acc = 0.0;
    const std::size_t base = k * r + M;
    for (std::size_t m = 0; m <= M; ++m) acc += taps[m] * b[base - m];
    out.v[k] = ht * acc;
  }
  return out;
}

// Same quadrature at an arbitrary point x, no modulation.
cplx plain_at(const SpreadingSpec& spec, const NuRule& rule, const std::vector<cplx>& taps, const Signal& f,
              double x) {
  const double ht = spec.t_step();
  cplx acc = 0.0;
  for (std::size_t m = 0; m < taps.size(); ++m) {
    const double s = x - static_cast<double>(m) * ht;
    acc += taps[m] * f(s) * eta_check_rule(rule, s);
  }
  return ht * acc;
}

double rel_diff(const SampledFunction& a, const SampledFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a.v[k] - b.v[k]);
    den += std::norm(b.v[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double member_scale(const SpreadingSpec& spec) { return spec.lambda / spec.a; }

}  // namespace

double Bump::operator()(double t) const {
  const double u = std::abs(t - 0.5 * a);
  const double plateau = 0.5 * a / lambda;
  if (u <= plateau) return 1.0;
  if (u >= 0.5 * a) return 0.0;
  const double v = (0.5 * a - u) / (0.5 * a - plateau);
  const double p = phi(v), q = phi(1.0 - v);
  return p / (p + q);
}

Bump bump_eta(double a, double lambda) {
  if (!(a > 0.0) || !(lambda > 1.0)) throw Error(ErrorCode::Config, "bump needs a > 0 and lambda > 1");
  return Bump{a, lambda};
}

Signal gaussian_signal() {
  return [](double x) { return cplx(gaussian_1d(x), 0.0); };
}

Signal random_gaussian_mixture(std::uint64_t seed, int terms) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), freq(-1.0, 1.0);
  std::normal_distribution<double> coef(0.0, 1.0);
  struct Term {
    cplx c;
    double x, xi;
  };
  std::vector<Term> ts;
  for (int k = 0; k < terms; ++k) {
    const double re = coef(rng), im = coef(rng);
    ts.push_back({cplx(re, im), pos(rng), freq(rng)});
  }
  return [ts](double x) {
    cplx acc = 0.0;
    for (const auto& t : ts) acc += t.c * gaussian_1d(x - t.x) * expi(kTwoPi * t.xi * x);
    return acc;
  };
}

Signal interpolated_signal(SampledFunction f) {
  return [f = std::move(f)](double x) -> cplx {
    constexpr int A = 8;
    const double u = (x - f.x0) / f.h;
    const long k0 = static_cast<long>(std::floor(u));
    const long n = static_cast<long>(f.size());
    cplx acc = 0.0;
    for (long k = k0 - A + 1; k <= k0 + A; ++k) {
      if (k < 0 || k >= n) continue;
      const double s = u - static_cast<double>(k);
      double w = 1.0;
      if (std::abs(s) > 1e-15) {
        const double ps = std::numbers::pi * s;
        w = A * std::sin(ps) * std::sin(ps / A) / (ps * ps);
      }
      acc += w * f.v[k];
    }
    return acc;
  };
}

SpreadingSpec SpreadingSpec::make(double a, double lambda) {
  SpreadingSpec s;
  s.a = a;
  s.lambda = lambda;
  s.eta = bump_eta(a, lambda);
  s.validate();
  return s;
}

void SpreadingSpec::validate() const {
  const double l4 = std::pow(lambda, 4);
  if (!(a > 0.0) || !(l4 > 1.0) || !(l4 < a * a))
    throw Error(ErrorCode::Config, "spreading spec needs 1 < lambda^4 < a^2");
  if (nu_nodes < 2 || t_nodes < 2 || t_sub < 0 || !(h > 0.0) || !(L > a))
    throw Error(ErrorCode::Config, "bad spreading quadrature grid");
}

SampledFunction SpreadingSpec::grid_template() const {
  SampledFunction f;
  const auto n = static_cast<std::size_t>(std::llround(2.0 * L / h)) + 1;
  f.x0 = -L;
  f.h = h;
  f.v.assign(n, cplx(0.0));
  return f;
}

int SpreadingSpec::t_ratio() const {
  if (t_sub > 0) return t_sub;
  return std::max(1, static_cast<int>(std::ceil(h * t_nodes / a - 1e-12)));
}

SpreadingSpec SpreadingSpec::refined() const {
  SpreadingSpec s = *this;
  s.t_sub = 2 * t_ratio();
  s.t_nodes *= 2;
  s.nu_nodes *= 2;
  return s;
}

cplx eta_check(const SpreadingSpec& spec, double u) { return eta_check_rule(nu_rule(spec), u); }

OperatorResult apply_operator(const SpreadingSpec& spec, const Signal& f) {
  check_member(spec, 0.0, 0.0);
  OperatorResult res;
  res.Hf = modulated_on_grid(spec, f, 0.0, 0.0);
  res.halving_error = rel_diff(res.Hf, modulated_on_grid(spec.refined(), f, 0.0, 0.0));
  return res;
}

SampledFunction family_member(const SpreadingSpec& spec, std::span<const int> j, const Signal& g) {
  const double y = member_scale(spec) * j[0], xi = member_scale(spec) * j[1];
  check_member(spec, y, xi);
  return modulated_on_grid(spec, g, y, xi);
}

SampledFunction family_member_composed(const SpreadingSpec& spec, std::span<const int> j, const Signal& g) {
  const double y = member_scale(spec) * j[0], xi = member_scale(spec) * j[1];
  check_member(spec, y, xi);
  // pi(z)^* g = exp(2 pi i y xi) pi(-z) g
  const Signal h = [&g, y, xi](double x) { return expi(kTwoPi * y * xi) * expi(-kTwoPi * xi * (x + y)) * g(x + y); };
  const NuRule rule = nu_rule(spec);
  const auto taps = t_taps(spec, 0.0);
  SampledFunction out = spec.grid_template();
  parallel_for(0, out.size(), [&](std::size_t k) {
    const double x = out.x(k);
    out.v[k] = expi(kTwoPi * xi * (x - y)) * plain_at(spec, rule, taps, h, x - y);
  });
  return out;
}

DenseBlock identification_matrix(const SpreadingSpec& spec, const Signal& g, int Ntilde, int N) {
  spec.validate();
  DenseBlock block(2, Ntilde, N);
  const auto rows = box_indexing(2, Ntilde);
  const auto cols = box_indexing(2, N);
  const SampledFunction grid = spec.grid_template();
  const auto n = static_cast<Eigen::Index>(grid.size());
  using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

  Mat P(n, static_cast<Eigen::Index>(cols->size()));
  parallel_for(0, cols->size(), [&](std::size_t c) {
    const SampledFunction m = family_member(spec, cols->coords(c), g);
    for (Eigen::Index k = 0; k < n; ++k) P(k, static_cast<Eigen::Index>(c)) = m.v[k];
  });

  const double sc = spec.lambda * spec.lambda / spec.a;
  Mat G(static_cast<Eigen::Index>(rows->size()), n);
  parallel_for(0, rows->size(), [&](std::size_t r) {
    const auto jp = rows->coords(r);
    const double y = sc * jp[0], xi = sc * jp[1];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double x = grid.x(static_cast<std::size_t>(k));
      // conj(pi(y, xi) g0 (x)) * h
      G(static_cast<Eigen::Index>(r), k) = grid.h * gaussian_1d(x - y) * expi(-kTwoPi * xi * (x - y));
    }
  });

  const Mat E = G * P;
  for (std::size_t r = 0; r < block.rows(); ++r)
    for (std::size_t c = 0; c < block.cols(); ++c)
      block(r, c) = E(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return block;
}

int tall_rows(const SpreadingSpec& spec, int N) {
  const double reach = member_scale(spec) * N + spec.a + 6.0;
  return static_cast<int>(std::ceil(reach / (spec.lambda * spec.lambda / spec.a)));
}

int wide_rows(const SpreadingSpec& spec, int N) {
  return std::min(static_cast<int>(std::ceil(N / spec.lambda - 1e-12)), N - 1);
}

std::vector<IdentPoint> identifiability_diagnostic(const SpreadingSpec& spec, const Signal& g,
                                                   const std::vector<int>& sizes) {
  std::vector<IdentPoint> out;
  for (int N : sizes) {
    if (N < 1) throw Error(ErrorCode::Config, "identification sizes must be positive");
    IdentPoint pt;
    pt.N = N;
    pt.Ntilde = tall_rows(spec, N);
    pt.Ntilde_wide = wide_rows(spec, N);
    pt.wide_rows = static_cast<std::size_t>(box_size(2, pt.Ntilde_wide));
    pt.wide_cols = static_cast<std::size_t>(box_size(2, N));
    pt.sigma_min = sigma_min(identification_matrix(spec, g, pt.Ntilde, N));
    out.push_back(pt);
  }
  return out;
}

}  // namespace wedgeframe
