#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "wedgeframe/density.hpp"
#include "wedgeframe/error.hpp"
#include "wedgeframe/parallel.hpp"
#include "wedgeframe/witness.hpp"

namespace wedgeframe {

namespace {

constexpr long kExtraShells = 4096;
constexpr double kStop = 1e-15;
constexpr double kSparseDrop = 1e-18;

int ceil_guarded(double x) { return static_cast<int>(std::ceil(x - 1e-12 * std::max(1.0, std::abs(x)))); }

double envelope_at(const Envelope& w, double x) { return w(std::max(0.0, x)); }

// Largest count over box centers near the middle of the coverage window.
std::size_t local_sup_count(const BoxCounter& counter, const PointSequence& gamma, double R) {
  const int D = gamma.phase_dim();
  const auto& lo = gamma.cover_lo();
  const auto& hi = gamma.cover_hi();
  std::vector<double> a(D), b(D);
  for (int i = 0; i < D; ++i) {
    const double mid = 0.5 * (lo[i] + hi[i]);
    const double h = std::min(0.5 * (hi[i] - lo[i]) - R, 2.0 * R + 2.0);
    if (h < 0.0) return 0;
    a[i] = mid - h;
    b[i] = mid + h;
  }
  auto scan = [&](const std::vector<double>& lo_, const std::vector<double>& hi_, double step, std::vector<double>& best_z) {
    std::vector<long> n(D);
    std::size_t total = 1;
    for (int i = 0; i < D; ++i) {
      n[i] = static_cast<long>(std::floor((hi_[i] - lo_[i]) / step + 1e-9)) + 1;
      total *= static_cast<std::size_t>(n[i]);
    }
    std::size_t best = 0;
    std::vector<double> z(D);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t r = t;
      for (int i = D - 1; i >= 0; --i) {
        z[i] = lo_[i] + static_cast<double>(r % n[i]) * step;
        r /= n[i];
      }
      const std::size_t c = counter.count(R, z);
      if (c > best) {
        best = c;
        best_z = z;
      }
    }
    return best;
  };
  std::vector<double> zb(D, 0.0);
  const double step = R / 4.0;
  std::size_t best = scan(a, b, step, zb);
  std::vector<double> la(D), lb(D), dummy;
  for (int i = 0; i < D; ++i) {
    la[i] = std::max(a[i], zb[i] - step);
    lb[i] = std::min(b[i], zb[i] + step);
  }
  return std::max(best, scan(la, lb, step / 4.0, dummy));
}

}  // namespace

DminusWitness dminus_witness(const MoleculeFamily& family, double epsilon, const DminusOptions& opt) {
  const PointSequence& gamma = family.centers;
  if (gamma.empty()) throw Error(ErrorCode::Config, "molecule family has no centers");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Config, "epsilon must be positive");
  const double p = opt.p;
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorCode::Config, "the density witness supports 1 < p < inf");
  const double q = SpaceSpec::conjugate_exponent(p);
  const int d = gamma.d();
  const int D = 2 * d;
  const Envelope& w = family.w;
  w.validate();
  if (family.r1 != 0.0 || family.r2 != 0.0) throw Error(ErrorCode::Config, "the density witness needs r1 = r2 = 0");

  DminusParams P;
  P.epsilon = epsilon;

  // Density estimates on the coverage window.
  double width = kInf;
  for (int i = 0; i < D; ++i) width = std::min(width, gamma.cover_hi()[i] - gamma.cover_lo()[i]);
  const double Rd = opt.density_radius > 0.0 ? opt.density_radius : width / 4.0;
  const DensityProfile prof = density_profile(gamma, {Rd});
  P.lower_density = prof.lower_estimate();
  P.upper_density = prof.upper_estimate();

  const double a2pow = P.lower_density + opt.alpha2_margin;
  P.alpha2 = std::pow(a2pow, 1.0 / D);
  P.alpha3 = std::pow(opt.alpha3_pow, 1.0 / D);
  if (!(a2pow < opt.alpha3_pow && opt.alpha3_pow < 1.0 && P.alpha2 > 0.5 && P.alpha3 > 0.5)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no alpha2 < alpha3 < 1 above the lower density estimate %.6g", P.lower_density);
    throw Error(ErrorCode::ParamInfeasible, buf);
  }
  P.alpha1 = std::max(1.0, std::pow(1.1 * P.upper_density, 1.0 / D));
  const double a1pow = std::pow(P.alpha1, D);

  // Radius from which counts stay below alpha1^{2d} (2R)^{2d}.
  {
    const BoxCounter counter(gamma);
    const double Rmax = std::max(1.0, std::min(width / 8.0, 16.0));
    P.R0_tilde = 0.0;
    for (double R = Rmax; R >= 1.0 - 1e-12; R -= 1.0 / 16.0) {
      const double c = static_cast<double>(local_sup_count(counter, gamma, R));
      if (c > a1pow * std::pow(2.0 * R, D)) break;
      P.R0_tilde = R;
    }
    if (P.R0_tilde == 0.0) throw Error(ErrorCode::ParamInfeasible, "upper density bound fails on the scanned radii");
  }

  // Case-2 inequality in the form used by the estimate.
  const double a3pow = opt.alpha3_pow;
  for (int n = 1; n <= opt.max_n0; ++n) {
    const double lhs = a2pow + a1pow * (std::pow(1.0 + 1.0 / n, D) - 1.0);
    const double rhs = a3pow * std::pow(1.0 - 1.0 / (2.0 * n), D);
    if (lhs <= rhs) {
      P.n0 = n;
      break;
    }
  }
  if (P.n0 == 0) throw Error(ErrorCode::ParamInfeasible, "no n0 satisfies the Case-2 inequality");

  // K2 tilde from the Case-3 hypothesis sum.
  {
    const double s = P.alpha3 / (2.0 * P.alpha1);
    const double pre = std::pow(std::pow(2.0, D) * D, p / q + 1.0);
    std::vector<double> terms;
    double total = 0.0;
    for (long K = 1; K <= 10'000'000; ++K) {
      const long k0 = std::max(1L, static_cast<long>(std::ceil(s * K - 1e-12)));
      const double inner = inner_series(w, k0, q, D).upper;
      const double t = std::pow(static_cast<double>(K), D - 1) * std::pow(inner, p / q);
      terms.push_back(t);
      total += t;
      if (t == 0.0 || (K > 8 && t * K < 1e-17 * total)) break;
    }
    double suffix = 0.0;
    const double target = std::pow(epsilon, p);
    long best = static_cast<long>(terms.size()) + 1;
    for (long K = static_cast<long>(terms.size()); K >= 1; --K) {
      suffix += terms[K - 1];
      if (pre * suffix < target) best = K;
      else break;
    }
    P.K2_tilde = static_cast<double>(best);
  }

  // Smallest R0 on the schedule meeting every constraint.
  const double R0_start = std::max(1.0, P.R0_tilde * P.n0);
  const double R0_max = opt.R0_max > 0.0 ? opt.R0_max : width / 2.0;
  bool constants_ok = false;
  std::optional<DeficitBox> box;
  for (double R = R0_start; R <= R0_max + 1e-9; R += opt.R0_step) {
    const int N0 = ceil_guarded(P.alpha3 * R);
    const int ca2 = ceil_guarded(P.alpha2 * N0);
    const int K1 = N0 - 1 - ca2;
    const double K2 = 2.0 * (P.alpha1 / P.alpha3 * N0 - ca2);
    if (N0 < P.n0 || N0 < P.alpha1 / P.alpha2 * P.R0_tilde) continue;
    if (!(std::pow(5.0 * P.alpha1 / P.alpha3 * R, D) * envelope_at(w, R / P.n0 - 2.0) < epsilon)) continue;
    if (K1 <= 1 || K2 < std::max(P.K2_tilde, static_cast<double>(K1))) continue;
    constants_ok = true;
    box = deficit_box_search(gamma, P.alpha2, {R}, R / 4.0);
    if (box) {
      P.R0 = R;
      P.N0 = N0;
      P.K1 = K1;
      P.K2 = K2;
      P.z0 = box->z0;
      break;
    }
  }
  if (!box) {
    if (constants_ok) throw Error(ErrorCode::NoDeficitBox, "no deficit box on the R0 schedule");
    throw Error(ErrorCode::ParamInfeasible, "no R0 on the schedule satisfies the constant constraints");
  }

  // Matrix <g_{j'}, pi(j/alpha3 + z0) g0>, rows enumerated about z0.
  auto e = std::make_shared<Enumeration>(enumerate_by_norm(gamma, P.z0));
  const int N0 = P.N0;
  const int ca2 = ceil_guarded(P.alpha2 * N0);
  const int R2 = static_cast<int>(std::floor(ca2 + P.K2 + 1e-12));
  const int R3 = R2 + 1;
  if (e->radius < R2)
    throw Error(ErrorCode::Coverage, "sequence does not cover the Case-2 rows");
  MatrixSpec spec;
  spec.d = D;
  spec.domain = SpaceSpec(p, 0.0, D);
  spec.codomain = SpaceSpec(p, 0.0, D);
  {
    const auto stft = family.stft;
    const double inv = 1.0 / P.alpha3;
    const std::vector<double> z0 = P.z0;
    spec.entry = [e, stft, inv, z0, D](std::span<const int> row, std::span<const int> col) -> cplx {
      const auto pos = e->position_of(row);
      if (!pos) return 0.0;
      double z[16];
      for (int i = 0; i < D; ++i) z[i] = inv * col[i] + z0[i];
      return stft(*pos, std::span<const double>(z, D));
    };
  }
  if (D > 16) throw Error(ErrorCode::Config, "dimension too large");

  DminusWitness out;
  out.p = p;
  {
    // Entries decay like a Gaussian in |gamma - j/alpha3|; dropped ones are
    // accounted for by the residual check against the full rows below.
    SparseBlock block = truncate_sparse(spec, N0 - 1, N0, kSparseDrop);
    const double smax = block.max_row_norm;
    KernelResult kr = kernel_vector_sparse(block, p);
    block = SparseBlock{};
    out.x = kr.x;
    out.checked_radius = std::min(e->radius, R3 + 2);
    const std::vector<cplx> y = apply_rows(spec, out.x, out.checked_radius);
    const std::size_t n1 = static_cast<std::size_t>(box_size(D, N0 - 1));
    const std::size_t n2 = static_cast<std::size_t>(box_size(D, R2));
    double r2 = 0.0, x2 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r2 += std::norm(y[i]);
    for (const cplx& v : out.x.values()) x2 += std::norm(v);
    out.kernel_residual = std::sqrt(r2 / x2) / std::max(1.0, smax);
    if (!(out.kernel_residual <= opt.kernel_tol))
      throw Error(ErrorCode::NoKernel, "Case-1 rows do not vanish (residual " + std::to_string(out.kernel_residual) + ")");
    auto part = [&](std::size_t a, std::size_t b) {
      std::vector<cplx> v(y.begin() + a, y.begin() + std::min(b, y.size()));
      CompensatedSum acc;
      for (const cplx& z : v) acc.add(std::pow(std::abs(z), p));
      return std::pow(acc.value(), 1.0 / p);
    };
    out.case1_norm = part(0, n1);
    out.case2_numeric = part(n1, n2);
    out.case3_numeric = part(n2, y.size());
  }
  const double xnorm = 1.0;  // kernel vector has unit l^p norm

  // Case 2: rows N0 <= |j'| <= R2 lie outside Q_{R0(1+1/n0)} + z0.
  if (static_cast<std::size_t>(box_size(D, N0 - 1)) < e->dist.size()) {
    const double dmin = e->dist[static_cast<std::size_t>(box_size(D, N0 - 1))];
    if (!(dmin > P.R0 * (1.0 + 1.0 / P.n0)))
      throw Error(ErrorCode::CertFail, "a Case-2 center lies inside the enlarged deficit box");
  }
  {
    const double rows = static_cast<double>(box_size(D, R2) - box_size(D, N0 - 1));
    const double cols = static_cast<double>(box_size(D, N0));
    out.case2_bound = envelope_at(w, P.R0 / P.n0 - 2.0) * std::pow(rows, 1.0 / p) * std::pow(cols, 1.0 / q) * xnorm;
  }

  // Case 3: centers of shell R lie outside Q_{(R-1/2)/alpha1} + z0.
  double reach = kInf;
  for (int i = 0; i < D; ++i)
    reach = std::min({reach, P.z0[i] - gamma.cover_lo()[i], gamma.cover_hi()[i] - P.z0[i]});
  for (int R = R3; R <= e->radius; ++R) {
    const std::size_t at = static_cast<std::size_t>(box_size(D, R - 1));
    if (at >= e->dist.size() || e->dist[at] >= reach) break;
    if (!(e->dist[at] > (R - 0.5) / P.alpha1))
      throw Error(ErrorCode::CertFail, "a Case-3 center is closer than the upper density bound allows (shell " +
                                           std::to_string(R) + ")");
  }
  {
    auto row_bound = [&](long R) {
      CompensatedSum acc;
      for (int s = 0; s <= N0; ++s) {
        const double v = envelope_at(w, (R - 0.5) / P.alpha1 - s / P.alpha3);
        if (v > 0.0) acc.add(static_cast<double>(shell_count(D, s)) * std::pow(v, q));
      }
      return xnorm * std::pow(acc.value(), 1.0 / q);
    };
    const double S = static_cast<double>(box_size(D, N0));
    const double c0 = 1.5 + P.alpha1 * N0 / P.alpha3;
    const double A = 2.0 * D * std::pow(2.0, D - 1) * std::pow(std::max(P.alpha1, c0), D - 1) *
                     std::pow(xnorm * std::pow(S, 1.0 / q), p);
    const PowerGauss H{A * std::pow(w.C, p), (D - 1) - w.alpha * p, w.beta * p};
    CompensatedSum acc;
    long extra = 0;
    for (long R = R3;; ++R) {
      const double v0 = (R - 0.5) / P.alpha1 - N0 / P.alpha3;
      if (w.compact() && v0 > w.cutoff) break;
      if (v0 >= 0.0 && v0 >= H.certified_from() && H.nonincreasing_from(v0)) {
        const double rem = H.sum_from(v0, 1.0 / P.alpha1);
        if (rem <= kStop * acc.value() || extra >= kExtraShells) {
          acc.add(rem);
          break;
        }
        ++extra;
      }
      const double b = row_bound(R);
      if (b > 0.0) acc.add(static_cast<double>(shell_count(D, static_cast<int>(R))) * std::pow(b, p));
    }
    out.case3_bound = std::pow(acc.value(), 1.0 / p);
  }

  out.params = P;
  out.total_bound = std::pow(std::pow(out.case1_norm, p) + std::pow(out.case2_bound, p) + std::pow(out.case3_bound, p),
                             1.0 / p);
  if (out.case2_numeric > out.case2_bound * (1.0 + 1e-9) || out.case3_numeric > out.case3_bound * (1.0 + 1e-9))
    throw Error(ErrorCode::CertFail, "direct rows exceed the Case-2/3 certificates");
  if (!(out.total_bound <= std::pow(2.0, 1.0 / p) * epsilon))
    throw Error(ErrorCode::CertFail, "total bound " + std::to_string(out.total_bound) + " exceeds 2^{1/p} epsilon");
  return out;
}

}  // namespace wedgeframe
