#include "wedgeframe/core_seq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "wedgeframe/error.hpp"

namespace wedgeframe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Orientation: return "ORIENTATION";
    case ErrorCode::DivergentTail: return "DIVERGENT_TAIL";
    case ErrorCode::Exponents: return "EXPONENTS";
    case ErrorCode::TailRange: return "TAIL_RANGE";
    case ErrorCode::NoKernel: return "NO_KERNEL";
    case ErrorCode::K1Range: return "K1_RANGE";
    case ErrorCode::CertFail: return "CERT_FAIL";
    case ErrorCode::NoDeficitBox: return "NO_DEFICIT_BOX";
    case ErrorCode::ParamInfeasible: return "PARAM_INFEASIBLE";
    case ErrorCode::GridRange: return "GRID_RANGE";
    case ErrorCode::UnresolvedGrid: return "UNRESOLVED_GRID";
    case ErrorCode::Envelope: return "ENVELOPE";
    case ErrorCode::Coverage: return "COVERAGE";
    case ErrorCode::EntryEval: return "ENTRY_EVAL";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

int sup_norm(std::span<const int> coords) {
  int m = 0;
  for (int c : coords) m = std::max(m, std::abs(c));
  return m;
}

int IndexPoint::sup_norm() const { return wedgeframe::sup_norm(coords); }

SpaceSpec::SpaceSpec(double p_, double s_, int d_) : p(p_), s(s_), d(d_) {
  if (!(p >= 1.0) || std::isnan(p)) throw Error(ErrorCode::Exponents, "p must lie in [1, inf]");
  if (d < 1) throw Error(ErrorCode::Exponents, "dimension must be >= 1");
  if (!std::isfinite(s)) throw Error(ErrorCode::Exponents, "weight exponent must be finite");
}

double SpaceSpec::conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

static std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::int64_t box_size(int d, int n) {
  if (n < 0) return 0;
  return ipow(2 * static_cast<std::int64_t>(n) + 1, d);
}

std::int64_t shell_count(int d, int k) {
  if (k < 0) return 0;
  if (k == 0) return 1;
  return box_size(d, k) - box_size(d, k - 1);
}

std::vector<IndexPoint> shell_indices(int d, int k) {
  std::vector<IndexPoint> out;
  if (k < 0) return out;
  out.reserve(static_cast<std::size_t>(shell_count(d, k)));
  std::vector<int> c(d, -k);
  while (true) {
    if (sup_norm(c) == k) out.emplace_back(c);
    int i = d - 1;
    while (i >= 0 && c[i] == k) {
      c[i] = -k;
      --i;
    }
    if (i < 0) break;
    ++c[i];
  }
  return out;
}

BoxIndexing::BoxIndexing(int d, int radius) : d_(d), radius_(radius) {
  if (d < 1 || radius < 0) throw Error(ErrorCode::Config, "invalid box");
  const std::int64_t n = box_size(d, radius);
  if (n > std::int64_t(1) << 31) throw Error(ErrorCode::Config, "box too large");
  const std::size_t count = static_cast<std::size_t>(n);
  const int side = 2 * radius + 1;

  std::vector<int> raster_shell(count);
  std::vector<int> c(d, -radius);
  for (std::size_t r = 0; r < count; ++r) {
    raster_shell[r] = sup_norm(c);
    for (int i = d - 1; i >= 0; --i) {
      if (++c[i] <= radius) break;
      c[i] = -radius;
    }
  }
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return raster_shell[a] < raster_shell[b]; });

  coords_.resize(count * static_cast<std::size_t>(d));
  shell_of_.resize(count);
  raster_to_pos_.resize(count);
  for (std::size_t pos = 0; pos < count; ++pos) {
    std::uint32_t r = order[pos];
    raster_to_pos_[r] = static_cast<std::uint32_t>(pos);
    shell_of_[pos] = raster_shell[r];
    for (int i = d - 1; i >= 0; --i) {
      coords_[pos * d + i] = static_cast<int>(r % side) - radius;
      r /= side;
    }
  }
}

IndexPoint BoxIndexing::point(std::size_t pos) const {
  auto c = coords(pos);
  return IndexPoint(std::vector<int>(c.begin(), c.end()));
}

std::size_t BoxIndexing::shell_begin(int k) const {
  if (k <= 0) return 0;
  return static_cast<std::size_t>(box_size(d_, k - 1));
}

std::optional<std::size_t> BoxIndexing::position(std::span<const int> c) const {
  if (static_cast<int>(c.size()) != d_) return std::nullopt;
  const int side = 2 * radius_ + 1;
  std::size_t r = 0;
  for (int v : c) {
    if (std::abs(v) > radius_) return std::nullopt;
    r = r * side + static_cast<std::size_t>(v + radius_);
  }
  return raster_to_pos_[r];
}

std::shared_ptr<const BoxIndexing> box_indexing(int d, int radius) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const BoxIndexing>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, radius);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto made = std::make_shared<const BoxIndexing>(d, radius);
  cache.emplace(key, made);
  return made;
}

FiniteVector::FiniteVector(int d, int support_radius)
    : d_(d), radius_(support_radius), values_(static_cast<std::size_t>(box_size(d, support_radius))) {
  if (d < 1 || support_radius < 0) throw Error(ErrorCode::Config, "invalid support box");
}

FiniteVector::FiniteVector(int d, int support_radius, std::vector<cplx> values)
    : d_(d), radius_(support_radius), values_(std::move(values)) {
  if (d < 1 || support_radius < 0) throw Error(ErrorCode::Config, "invalid support box");
  if (values_.size() != static_cast<std::size_t>(box_size(d, support_radius)))
    throw Error(ErrorCode::Config, "value count does not match support box");
}

cplx FiniteVector::at(const IndexPoint& j) const {
  if (j.dim() != d_ || j.sup_norm() > radius_) return {};
  return values_[*box_indexing(d_, radius_)->position(j)];
}

void FiniteVector::set(const IndexPoint& j, cplx v) {
  if (j.dim() != d_ || j.sup_norm() > radius_)
    throw Error(ErrorCode::Config, "index outside the support box");
  values_[*box_indexing(d_, radius_)->position(j)] = v;
}

FiniteVector FiniteVector::padded(int radius) const {
  if (radius < radius_) throw Error(ErrorCode::Config, "padding cannot shrink the support");
  std::vector<cplx> v(static_cast<std::size_t>(box_size(d_, radius)));
  std::copy(values_.begin(), values_.end(), v.begin());
  return FiniteVector(d_, radius, std::move(v));
}

double weighted_norm(std::span<const cplx> values, int d, double p, double s) {
  // Shell boundaries follow from the prefix property, so no index table is needed.
  double sup = 0.0;
  CompensatedSum acc;
  std::size_t pos = 0;
  for (int k = 0; pos < values.size(); ++k) {
    const std::size_t end = std::min(values.size(), static_cast<std::size_t>(box_size(d, k)));
    const double weight = std::pow(1.0 + k, s);
    for (; pos < end; ++pos) {
      const double a = weight * std::abs(values[pos]);
      if (std::isinf(p)) {
        sup = std::max(sup, a);
      } else if (a != 0.0) {
        acc.add(p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p)));
      }
    }
  }
  if (std::isinf(p)) return sup;
  const double t = acc.value();
  return p == 1.0 ? t : (p == 2.0 ? std::sqrt(t) : std::pow(t, 1.0 / p));
}

double weighted_norm(const FiniteVector& x, const SpaceSpec& spec) {
  return weighted_norm(x.values(), x.dim(), spec.p, spec.s);
}

}  // namespace wedgeframe
