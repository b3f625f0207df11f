#include "wedgeframe/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "wedgeframe/error.hpp"
#include "wedgeframe/parallel.hpp"

namespace wedgeframe {

namespace {

double boundary_tol(double R, std::span<const double> z) {
  double m = std::abs(R);
  for (double v : z) m = std::max(m, std::abs(v));
  return 1e-12 * std::max(1.0, m);
}

// Per-coordinate grid lo, lo+step, ..., always ending exactly at hi.
std::vector<double> axis_grid(double lo, double hi, double step) {
  std::vector<double> g;
  if (hi < lo) return g;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) g.push_back(lo + k * step);
  if (hi - g.back() > 1e-9 * std::max(1.0, std::abs(hi))) g.push_back(hi);
  return g;
}

std::vector<double> product_grid(const std::vector<std::vector<double>>& axes) {
  std::vector<double> out;
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  if (total == 0) return out;
  const std::size_t D = axes.size();
  out.reserve(total * D);
  std::vector<std::size_t> idx(D, 0);
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t i = 0; i < D; ++i) out.push_back(axes[i][idx[i]]);
    for (std::size_t i = D; i-- > 0;) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace

BoxCounter::BoxCounter(const PointSequence& gamma) : D_(gamma.phase_dim()) {
  const std::size_t n = gamma.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return gamma.coords(a)[0] < gamma.coords(b)[0]; });
  first_.reserve(n);
  coords_.reserve(n * D_);
  for (std::size_t i : perm) {
    auto c = gamma.coords(i);
    first_.push_back(c[0]);
    coords_.insert(coords_.end(), c.begin(), c.end());
  }
}

std::size_t BoxCounter::count(double R, std::span<const double> z) const {
  if (first_.empty()) return 0;
  const double tol = boundary_tol(R, z);
  const auto lo = std::lower_bound(first_.begin(), first_.end(), z[0] - R - tol);
  const auto hi = std::upper_bound(lo, first_.end(), z[0] + R + tol);
  std::size_t n = 0;
  for (auto it = lo; it != hi; ++it) {
    const double* c = coords_.data() + (it - first_.begin()) * D_;
    bool in = true;
    for (int i = 1; i < D_ && in; ++i) in = std::abs(c[i] - z[i]) <= R + tol;
    n += in;
  }
  return n;
}

std::size_t box_count(const PointSequence& gamma, double R, std::span<const double> z) {
  if (!(R > 0.0)) throw Error(ErrorCode::Config, "box radius must be positive");
  const int D = gamma.phase_dim();
  const double tol = boundary_tol(R, z);
  std::size_t n = 0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    auto c = gamma.coords(k);
    bool in = true;
    for (int i = 0; i < D && in; ++i) in = std::abs(c[i] - z[i]) <= R + tol;
    n += in;
  }
  return n;
}

namespace {

// Counts are constant between the breakpoints gamma_i +- R along an axis, so
// breakpoints and the midpoints between them cover every value on [a, b].
// Falls back to a uniform grid when there are too many.
std::vector<double> breakpoint_axis(const PointSequence& gamma, int axis, double R, double a, double b,
                                    double fallback_step) {
  constexpr std::size_t kMaxBreakpoints = 256;
  std::vector<double> bp{a, b};
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    const double g = gamma.coords(k)[axis];
    for (double v : {g - R, g + R})
      if (v > a && v < b) {
        bp.push_back(v);
        if (bp.size() > kMaxBreakpoints) return axis_grid(a, b, fallback_step);
      }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < bp.size(); ++k) {
    out.push_back(bp[k]);
    if (k + 1 < bp.size()) out.push_back(0.5 * (bp[k] + bp[k + 1]));
  }
  return out;
}

}  // namespace

std::vector<double> center_grid(const PointSequence& gamma, double R, double step) {
  const auto& lo = gamma.cover_lo();
  const auto& hi = gamma.cover_hi();
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double a = lo[i] + R, b = hi[i] - R;
    if (b < a - 1e-12 * std::max(1.0, std::abs(R))) return {};
    axes.push_back(axis_grid(a, std::max(a, b), step));
  }
  return product_grid(axes);
}

DensityProfile density_profile(const PointSequence& gamma, const std::vector<double>& radii, double search_step) {
  DensityProfile out;
  out.search_grid_step = search_step;
  if (gamma.d() < 1) throw Error(ErrorCode::Config, "density needs a sequence with a dimension");
  const BoxCounter counter(gamma);
  const int D = gamma.phase_dim();
  for (double R : radii) {
    if (!(R > 0.0)) throw Error(ErrorCode::Config, "radii must be positive");
    const double step = search_step > 0.0 ? search_step : R / 4.0;
    const std::vector<double> centers = center_grid(gamma, R, step);
    if (centers.empty()) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "radius %g does not fit inside the coverage window", R);
      throw Error(ErrorCode::Coverage, buf);
    }
    const std::size_t nc = centers.size() / D;
    std::vector<std::size_t> counts(nc);
    parallel_for(0, nc, [&](std::size_t i) {
      counts[i] = counter.count(R, std::span<const double>(centers.data() + i * D, D));
    });
    const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    std::size_t cmin = *mn, cmax = *mx;
    // One refinement pass around each extremum.
    const auto& lo = gamma.cover_lo();
    const auto& hi = gamma.cover_hi();
    for (std::size_t at : {static_cast<std::size_t>(mn - counts.begin()), static_cast<std::size_t>(mx - counts.begin())}) {
      std::vector<std::vector<double>> axes;
      for (int i = 0; i < D; ++i) {
        const double c = centers[at * D + i];
        const double a = std::max(lo[i] + R, c - step), b = std::min(hi[i] - R, c + step);
        axes.push_back(breakpoint_axis(gamma, i, R, a, std::max(a, b), step / 16.0));
      }
      const std::vector<double> fine = product_grid(axes);
      for (std::size_t k = 0; k < fine.size() / D; ++k) {
        const std::size_t v = counter.count(R, std::span<const double>(fine.data() + k * D, D));
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
      }
    }
    const double vol = std::pow(2.0 * R, D);
    out.radii.push_back(R);
    out.lower.push_back(static_cast<double>(cmin) / vol);
    out.upper.push_back(static_cast<double>(cmax) / vol);
  }
  return out;
}

std::string density_profile_csv(const DensityProfile& profile) {
  std::string out = "R,lower,upper\n";
  char buf[96];
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", profile.radii[i], profile.lower[i], profile.upper[i]);
    out += buf;
  }
  return out;
}

Enumeration enumerate_by_norm(const PointSequence& gamma, std::span<const double> z0) {
  Enumeration e;
  e.D = gamma.phase_dim();
  const std::size_t n = gamma.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = sup_distance(gamma.coords(i), z0);
  e.order.resize(n);
  std::iota(e.order.begin(), e.order.end(), 0);
  std::stable_sort(e.order.begin(), e.order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  e.dist.reserve(n);
  for (std::size_t i : e.order) e.dist.push_back(dist[i]);
  while (static_cast<std::size_t>(box_size(e.D, e.radius)) < n) ++e.radius;
  e.box = box_indexing(e.D, e.radius);
  return e;
}

std::optional<std::size_t> Enumeration::position_of(std::span<const int> jp) const {
  if (!box) return std::nullopt;
  const auto pos = box->position(jp);
  if (!pos || *pos >= order.size()) return std::nullopt;
  return order[*pos];
}

std::optional<DeficitBox> deficit_box_search(const PointSequence& gamma, double alpha2,
                                             const std::vector<double>& R_schedule, double z_step) {
  if (!(alpha2 > 0.0)) throw Error(ErrorCode::Config, "alpha2 must be positive");
  const BoxCounter counter(gamma);
  const int D = gamma.phase_dim();
  std::vector<double> mid(D);
  for (int i = 0; i < D; ++i) mid[i] = 0.5 * (gamma.cover_lo()[i] + gamma.cover_hi()[i]);
  for (double R : R_schedule) {
    const double step = z_step > 0.0 ? z_step : R / 4.0;
    const std::vector<double> centers = center_grid(gamma, R, step);
    const std::size_t nc = centers.size() / D;
    if (nc == 0) continue;
    std::vector<std::size_t> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(nc);
    for (std::size_t i = 0; i < nc; ++i) dist[i] = sup_distance({centers.data() + i * D, static_cast<std::size_t>(D)}, mid);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const double limit = std::pow(alpha2, D) * std::pow(2.0 * R, D);
    for (std::size_t i : order) {
      std::span<const double> z(centers.data() + i * D, D);
      const std::size_t c = counter.count(R, z);
      if (static_cast<double>(c) <= limit) return DeficitBox{R, std::vector<double>(z.begin(), z.end()), c};
    }
  }
  return std::nullopt;
}

}  // namespace wedgeframe
