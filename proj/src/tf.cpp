#include "wedgeframe/tf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wedgeframe/block_io.hpp"
#include "wedgeframe/error.hpp"
#include "wedgeframe/linsolve.hpp"
#include "wedgeframe/parallel.hpp"

namespace wedgeframe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxPhaseDim = 16;

// <pi(a) g0, pi(b) g0> for flat phase-space coordinates (y then xi).
cplx gauss_inner_raw(const double* a, const double* b, int d) {
  double phase = 0.0, dist2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double y1 = a[i], x1 = a[d + i], y2 = b[i], x2 = b[d + i];
    phase += (x1 + x2) * (y2 - y1);
    dist2 += (y1 - y2) * (y1 - y2) + (x1 - x2) * (x1 - x2);
  }
  const double mag = std::exp(-kPi * dist2 / 2.0);
  if (mag == 0.0) return 0.0;
  return std::polar(mag, kPi * phase);
}

// int over R \ [a, b] of env(|x - shift|).
double outside_integral(const Envelope& env, double a, double b, double shift) {
  const PowerGauss F{env.C, -env.alpha, env.beta};
  const double I0 = F.integral_from(0.0);
  auto half = [&](double t) { return t >= 0.0 ? F.integral_from(t) : I0 + (-t) * env.C; };
  return half(shift - a) + half(b - shift);
}

cplx eval_gaussian(double x) { return gaussian_1d(x); }

// Value of a sampled window at an on-grid point, zero off the sampled range.
cplx sampled_at(const SampledFunction& f, double x) {
  const double t = (x - f.x0) / f.h;
  const double k = std::round(t);
  if (k < 0.0 || k >= static_cast<double>(f.size())) return 0.0;
  return f.v[static_cast<std::size_t>(k)];
}

bool on_grid(const SampledFunction& f, double x) {
  const double t = (x - f.x0) / f.h;
  return std::abs(t - std::round(t)) <= 1e-9 * std::max(1.0, std::abs(t));
}

QuadratureResult stft_1d(const Window& f, const Window& g, double y, double xi, const QuadratureOptions& opt) {
  const bool fs = f.kind == WindowKind::Sampled;
  const bool gs = g.kind == WindowKind::Sampled;
  const double h = fs ? f.samples.h : gs ? g.samples.h : opt.step;
  if (!(h > 0.0) || h > 1.0 / (4.0 * (std::abs(xi) + 4.0)) * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "step %g does not resolve frequency %g", h, xi);
    throw Error(ErrorCode::UnresolvedGrid, buf);
  }
  double a, b;
  std::size_t n;
  if (fs) {
    a = f.samples.x0;
    n = f.samples.size();
    if (gs) {
      if (std::abs(g.samples.h - h) > 1e-12 * h || !on_grid(g.samples, a - y))
        throw Error(ErrorCode::GridRange, "sampled windows do not share a grid at this shift");
    }
  } else if (gs) {
    a = y + g.samples.x0;
    n = g.samples.size();
  } else {
    const long half = static_cast<long>(std::ceil((opt.L + std::abs(y) / 2.0) / h));
    a = y / 2.0 - half * h;
    n = static_cast<std::size_t>(2 * half + 1);
  }
  b = a + static_cast<double>(n - 1) * h;
  cplx acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a + static_cast<double>(k) * h;
    const cplx fx = fs ? f.samples.v[k] : eval_gaussian(x);
    if (fx == 0.0) continue;
    const cplx gx = gs ? (fs ? sampled_at(g.samples, x - y) : g.samples.v[k]) : eval_gaussian(x - y);
    acc += fx * std::conj(gx) * std::polar(1.0, -2.0 * kPi * (x - y) * xi);
  }
  QuadratureResult r{acc * h, 0.0};
  const double tf = outside_integral(f.envelope, a, b, 0.0);
  const double tg = outside_integral(g.envelope, a, b, y);
  r.error_bound = std::min(g.sup_abs() * tf, f.sup_abs() * tg);
  return r;
}

}  // namespace

double SampledFunction::l2_norm() const {
  CompensatedSum acc;
  for (const cplx& z : v) acc.add(std::norm(z));
  return std::sqrt(acc.value() * h);
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

double gaussian_1d(double x) { return std::pow(2.0, 0.25) * std::exp(-kPi * x * x); }

Window Window::gaussian(int d) {
  if (d < 1) throw Error(ErrorCode::Config, "window dimension must be >= 1");
  Window w;
  w.d = d;
  w.envelope = Envelope{std::pow(2.0, d / 4.0), 0.0, kPi, kInf};
  return w;
}

Window Window::sampled(SampledFunction f, Envelope env) {
  env.validate();
  if (!(f.h > 0.0) || f.v.empty()) throw Error(ErrorCode::Config, "sampled window needs a grid and values");
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double bound = env(std::abs(f.x(k)));
    if (std::abs(f.v[k]) > bound * (1.0 + 1e-12) + 1e-300) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "sample at x=%g exceeds the declared envelope", f.x(k));
      throw Error(ErrorCode::Envelope, buf);
    }
  }
  Window w;
  w.kind = WindowKind::Sampled;
  w.d = 1;
  w.samples = std::move(f);
  w.envelope = env;
  return w;
}

double Window::sup_abs() const {
  if (kind == WindowKind::Gaussian) return std::pow(2.0, d / 4.0);
  return samples.max_abs();
}

SampledFunction sample_function(const std::function<cplx(double)>& f, double L, double h) {
  SampledFunction s;
  const long n = static_cast<long>(std::floor(L / h + 1e-9));
  s.h = h;
  s.x0 = -n * h;
  s.v.resize(static_cast<std::size_t>(2 * n + 1));
  for (std::size_t k = 0; k < s.v.size(); ++k) s.v[k] = f(s.x(k));
  return s;
}

SampledFunction sample(const Window& g, double L, double h) {
  if (g.kind == WindowKind::Sampled) return g.samples;
  if (g.d != 1) throw Error(ErrorCode::Config, "sampling is limited to d = 1");
  return sample_function([](double x) { return cplx(gaussian_1d(x)); }, L, h);
}

SampledFunction tf_shift(const SampledFunction& f, const TFPoint& z) {
  if (z.dim() != 1) throw Error(ErrorCode::Config, "tf_shift acts on d = 1 samples");
  const double y = z.y[0], xi = z.xi[0];
  SampledFunction out;
  out.h = f.h;
  const double t = y / f.h;
  const double m = std::round(t);
  if (std::abs(t - m) > 1e-9 * std::max(1.0, std::abs(t))) {
    out.x0 = f.x0 + y;
    out.v.resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) out.v[k] = std::polar(1.0, 2.0 * kPi * xi * (out.x(k) - y)) * f.v[k];
    return out;
  }
  const long shift = static_cast<long>(m);
  out.x0 = f.x0;
  out.v.assign(f.size(), 0.0);
  const double tol = 1e-12 * f.max_abs();
  const long n = static_cast<long>(f.size());
  for (long k = 0; k < n; ++k) {
    const long dst = k + shift;
    if (dst < 0 || dst >= n) {
      if (std::abs(f.v[k]) > tol) throw Error(ErrorCode::GridRange, "shift moves samples off the grid");
      continue;
    }
    out.v[dst] = std::polar(1.0, 2.0 * kPi * xi * (out.x(dst) - y)) * f.v[k];
  }
  return out;
}

cplx gauss_inner(const TFPoint& z1, const TFPoint& z2) {
  const auto a = z1.coords();
  const auto b = z2.coords();
  return gauss_inner_raw(a.data(), b.data(), z1.dim());
}

double stft_gauss_gauss(const TFPoint& z) { return std::exp(-kPi * z.norm2_squared() / 2.0); }

QuadratureResult stft_quadrature(const Window& f, const Window& g, const TFPoint& z, const QuadratureOptions& opt) {
  const bool both_gauss = f.kind == WindowKind::Gaussian && g.kind == WindowKind::Gaussian;
  if (both_gauss && f.d != g.d) throw Error(ErrorCode::Config, "window dimensions differ");
  if (!both_gauss && (f.d != 1 || g.d != 1 || z.dim() != 1))
    throw Error(ErrorCode::Config, "sampled quadrature is limited to d = 1");
  if (z.dim() != f.d) throw Error(ErrorCode::Config, "point dimension does not match the windows");
  if (z.dim() == 1) return stft_1d(f, g, z.y[0], z.xi[0], opt);
  // Gaussians factor over coordinates.
  QuadratureResult r{1.0, 0.0};
  const Window g1 = Window::gaussian(1);
  for (int i = 0; i < z.dim(); ++i) {
    const QuadratureResult q = stft_1d(g1, g1, z.y[i], z.xi[i], opt);
    r.value *= q.value;
    r.error_bound += q.error_bound;
  }
  return r;
}

std::shared_ptr<GaborSystem> make_gabor_system(const Window& g, const PointSequence& gamma, double mu,
                                               const TFPoint& z0, const GaborOptions& opt) {
  if (!(mu > 0.0)) throw Error(ErrorCode::Config, "synthesis lattice scale must be positive");
  if (gamma.d() != g.d || z0.dim() != g.d) throw Error(ErrorCode::Config, "window, sequence and offset dimensions differ");
  if (2 * g.d > kMaxPhaseDim) throw Error(ErrorCode::Config, "dimension too large");
  auto sys = std::make_shared<GaborSystem>();
  sys->g = g;
  sys->gamma = gamma;
  sys->mu = mu;
  sys->z0 = z0;
  sys->center = opt.enumeration_center.value_or(z0);
  const auto cc = sys->center.coords();
  sys->enumeration = enumerate_by_norm(gamma, cc);
  const Enumeration& e = sys->enumeration;
  double scale = opt.gamma_scale;
  if (!(scale > 0.0)) {
    if (gamma.kind() == SequenceKind::Lattice) {
      scale = gamma.lattice_scale();
    } else {
      scale = kInf;
      for (std::size_t k = 1; k < e.order.size(); ++k) scale = std::min(scale, e.dist[k] / e.box->shell(k));
      if (!std::isfinite(scale) || scale <= 0.0) scale = 2.0 * mu;
    }
  }
  sys->gamma_scale = scale;
  double c = 0.0;
  for (std::size_t k = 0; k < e.order.size(); ++k) c = std::max(c, scale * e.box->shell(k) - e.dist[k]);
  c += sup_distance(z0.coords(), cc);
  sys->offset = c > 1e-12 * (1.0 + scale * e.radius) ? c : 0.0;
  return sys;
}

EntryFn gabor_entry(std::shared_ptr<const GaborSystem> sys, const QuadratureOptions& quad) {
  const int d = sys->g.d;
  const double mu = sys->mu;
  if (sys->g.kind == WindowKind::Gaussian) {
    return [sys, d, mu](std::span<const int> row, std::span<const int> col) -> cplx {
      const auto pos = sys->enumeration.position_of(row);
      if (!pos) return 0.0;
      std::array<double, kMaxPhaseDim> w{};
      const auto& z0 = sys->z0;
      for (int i = 0; i < d; ++i) {
        w[i] = mu * col[i] + z0.y[i];
        w[d + i] = mu * col[d + i] + z0.xi[i];
      }
      return gauss_inner_raw(w.data(), sys->gamma.coords(*pos).data(), d);
    };
  }
  const Window g0 = Window::gaussian(1);
  return [sys, mu, quad, g0](std::span<const int> row, std::span<const int> col) -> cplx {
    const auto pos = sys->enumeration.position_of(row);
    if (!pos) return 0.0;
    const auto gam = sys->gamma.coords(*pos);
    const double yw = mu * col[0] + sys->z0.y[0], xw = mu * col[1] + sys->z0.xi[0];
    const TFPoint diff({yw - gam[0]}, {xw - gam[1]});
    // <pi(w) g0, pi(gamma) g> = exp(-2 pi i (y_w - y_gamma) xi_gamma) conj(V_g0 g(w - gamma)).
    const cplx v = stft_quadrature(sys->g, g0, diff, quad).value;
    return std::polar(1.0, -2.0 * kPi * (yw - gam[0]) * gam[1]) * std::conj(v);
  };
}

MatrixSpec gabor_analysis_synthesis_matrix(std::shared_ptr<const GaborSystem> sys, const GaborOptions& opt) {
  const int d = sys->g.d;
  const int D = 2 * d;
  MatrixSpec spec;
  spec.d = D;
  spec.domain = SpaceSpec(opt.p, opt.s, D);
  spec.codomain = SpaceSpec(opt.p, opt.s, D);
  const double mu = sys->mu;
  const double c = sys->offset;
  const double lambda = sys->gamma_scale / mu;

  spec.entry = gabor_entry(sys, opt.quad);
  if (sys->g.kind == WindowKind::Gaussian) {
    const double beta = kPi * mu * mu / 2.0;
    spec.profile.w = c > 0.0 ? Envelope::gaussian(1.0, beta / 4.0) : Envelope::gaussian(1.0, beta);
    spec.profile.K0 = c > 0.0 ? std::max(1.0, 2.0 * c / mu) : 1.0;
  } else {
    const QuadratureOptions quad = opt.quad;
    const Window g0 = Window::gaussian(1);
    const double v = D + opt.delta;
    double sup = 0.0, ring = 0.0;
    const double step = 0.25, R = 12.0;
    const long n = static_cast<long>(std::round(R / step));
    for (long a = -n; a <= n; ++a) {
      for (long b = -n; b <= n; ++b) {
        const TFPoint z({a * step}, {b * step});
        const double norm = z.sup_norm();
        const double val = std::pow(1.0 + norm, v) * std::abs(stft_quadrature(sys->g, g0, z.scaled(-1.0), quad).value);
        if (!std::isfinite(val)) throw Error(ErrorCode::Envelope, "envelope constant is not finite");
        sup = std::max(sup, val);
        if (norm >= R - 2.0) ring = std::max(ring, val);
      }
    }
    if (!(sup > 0.0) || ring >= 0.5 * sup)
      throw Error(ErrorCode::Envelope, "weighted STFT does not decay on the measurement grid");
    const double C = 1.1 * sup;
    const double shrink = c > 0.0 ? mu / 2.0 : mu;
    spec.profile.w = Envelope::power_law(C * std::pow(std::min(1.0, shrink), -v), v);
    spec.profile.K0 = c > 0.0 ? std::max(1.0, 2.0 * c / mu) : 1.0;
  }
  spec.profile.lambda = lambda;
  if (lambda > 1.0) {
    const int r = std::min(sys->enumeration.radius, D == 2 ? (sys->g.kind == WindowKind::Gaussian ? 8 : 4) : 2);
    spot_certify(spec, r, r);
  }
  return spec;
}

MatrixSpec gabor_analysis_synthesis_matrix(const Window& g, const PointSequence& gamma, double mu, const TFPoint& z0,
                                           const GaborOptions& opt) {
  return gabor_analysis_synthesis_matrix(make_gabor_system(g, gamma, mu, z0, opt), opt);
}

double coeff_mod_norm(const FiniteVector& c, double p, double s) {
  return weighted_norm(c, SpaceSpec(p, s, c.dim()));
}

MoleculeFamily gaussian_molecules(const PointSequence& gamma, Envelope w, double scale) {
  MoleculeFamily fam;
  fam.centers = gamma;
  fam.w = w;
  auto pts = std::make_shared<PointSequence>(gamma);
  const int d = gamma.d();
  fam.stft = [pts, scale, d](std::size_t k, std::span<const double> z) {
    return scale * gauss_inner_raw(pts->coords(k).data(), z.data(), d);
  };
  return fam;
}

MoleculeReport molecule_check(const MoleculeFamily& family, const std::vector<TFPoint>& probes) {
  const PointSequence& gam = family.centers;
  const std::vector<double> origin(gam.phase_dim(), 0.0);
  const Enumeration e = enumerate_by_norm(gam, origin);
  std::vector<int> index_norm(gam.size(), 0);
  for (std::size_t k = 0; k < e.order.size(); ++k) index_norm[e.order[k]] = e.box->shell(k);
  const std::size_t n = gam.size();
  std::vector<double> worst(n, 0.0);
  std::vector<std::size_t> worst_probe(n, 0);
  parallel_for(0, n, [&](std::size_t m) {
    const auto c = gam.coords(m);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const TFPoint& z = probes[i];
      const auto zc = z.coords();
      const double mag = std::abs(family.stft(m, zc));
      if (mag == 0.0) continue;
      const double bound = std::pow(1.0 + z.sup_norm(), family.r1) * std::pow(1.0 + index_norm[m], family.r2) *
                           family.w(sup_distance(zc, c));
      const double ratio = bound > 0.0 ? mag / bound : kInf;
      if (ratio > worst[m]) {
        worst[m] = ratio;
        worst_probe[m] = i;
      }
    }
  });
  MoleculeReport rep;
  for (std::size_t m = 0; m < n; ++m) {
    if (worst[m] > rep.worst_ratio) {
      rep.worst_ratio = worst[m];
      rep.worst_member = m;
      rep.worst_z = probes[worst_probe[m]];
    }
  }
  rep.pass = rep.worst_ratio <= 1.0;
  return rep;
}

std::vector<FramePoint> frame_lower_diagnostic(const Window& g, const PointSequence& gamma, double mu,
                                               const std::vector<int>& sizes, double margin, const GaborOptions& opt) {
  const TFPoint z0 = TFPoint::zero(g.d);
  auto sys = make_gabor_system(g, gamma, mu, z0, opt);
  const int D = 2 * g.d;
  std::vector<FramePoint> out;
  const EntryFn entry = gabor_entry(sys, opt.quad);
  const Enumeration& e = sys->enumeration;
  const double shift = sup_distance(z0.coords(), sys->center.coords());
  for (int N : sizes) {
    if (N < 0) throw Error(ErrorCode::Config, "sizes must be >= 0");
    const double reach = mu * N + margin + shift;
    const std::size_t P = static_cast<std::size_t>(std::upper_bound(e.dist.begin(), e.dist.end(), reach) - e.dist.begin());
    const auto cols = box_indexing(D, N);
    const std::size_t nc = cols->size();
    FramePoint fp{N, P, nc, 0.0};
    if (P >= nc) {
      std::vector<cplx> a(P * nc);
      parallel_for(0, P, [&](std::size_t r) {
        auto jr = e.box->coords(r);
        for (std::size_t c = 0; c < nc; ++c) a[r * nc + c] = entry(jr, cols->coords(c));
      });
      fp.sigma_min = sigma_min(a, P, nc);
    }
    out.push_back(fp);
  }
  return out;
}

Window read_window_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  std::optional<Envelope> env;
  std::vector<double> xs;
  SampledFunction f;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto at = line.find("envelope");
      if (at == std::string::npos) continue;
      Envelope e;
      std::istringstream ls(line.substr(at + 8));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const double val = std::stod(tok.substr(eq + 1));
        if (key == "C") e.C = val;
        else if (key == "alpha") e.alpha = val;
        else if (key == "beta") e.beta = val;
        else if (key == "cutoff") e.cutoff = val;
      }
      env = e;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, re, im = 0.0;
    if (!(ls >> x >> re)) {
      if (xs.empty()) continue;  // column header
      throw Error(ErrorCode::Io, path + ": malformed line '" + line + "'");
    }
    ls >> im;
    xs.push_back(x);
    f.v.emplace_back(re, im);
  }
  if (!env) throw Error(ErrorCode::Envelope, path + ": missing '# envelope' header");
  if (xs.size() < 2) throw Error(ErrorCode::Io, path + ": need at least two samples");
  f.x0 = xs.front();
  f.h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (std::abs(xs[k] - f.x(k)) > 1e-9 * std::max(1.0, std::abs(xs[k])))
      throw Error(ErrorCode::Io, path + ": grid is not uniform");
  return Window::sampled(std::move(f), *env);
}

void write_window_csv(const Window& g, const std::string& path) {
  const SampledFunction f = sample(g);
  char buf[160];
  std::snprintf(buf, sizeof buf, "# envelope C=%.17g alpha=%.17g beta=%.17g", g.envelope.C, g.envelope.alpha,
                g.envelope.beta);
  std::string out = buf;
  if (g.envelope.compact()) {
    std::snprintf(buf, sizeof buf, " cutoff=%.17g", g.envelope.cutoff);
    out += buf;
  }
  out += "\nx,re,im\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.x(k), f.v[k].real(), f.v[k].imag());
    out += buf;
  }
  write_file_atomic(path, out);
}

}  // namespace wedgeframe
