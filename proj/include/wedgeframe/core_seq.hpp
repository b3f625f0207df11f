#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace wedgeframe {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of Z^d.
struct IndexPoint {
  std::vector<int> coords;

  IndexPoint() = default;
  explicit IndexPoint(std::vector<int> c) : coords(std::move(c)) {}
  IndexPoint(std::initializer_list<int> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int sup_norm() const;

  auto operator<=>(const IndexPoint&) const = default;
};

int sup_norm(std::span<const int> coords);

/// Exponent pair for the weighted space l^p_s(Z^d). p may be kInf.
struct SpaceSpec {
  double p = 2.0;
  double s = 0.0;
  int d = 1;

  SpaceSpec() = default;
  SpaceSpec(double p_, double s_, int d_);

  /// Hoelder conjugate q with 1/p + 1/q = 1.
  double conjugate() const { return conjugate_exponent(p); }

  static double conjugate_exponent(double p);
};

/// Running sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exact number of points of Z^d with sup-norm k.
std::int64_t shell_count(int d, int k);

/// Number of points of Z^d with sup-norm at most n, i.e. (2n+1)^d.
std::int64_t box_size(int d, int n);

/// All points with sup-norm exactly k, lexicographically ordered.
std::vector<IndexPoint> shell_indices(int d, int k);

/// Linearization of the box {||j||_inf <= N}: shells 0, 1, 2, ... and
/// lexicographic order within a shell. The box of radius M < N is a prefix of
/// the box of radius N in this order.
class BoxIndexing {
 public:
  BoxIndexing(int d, int radius);

  int dim() const { return d_; }
  int radius() const { return radius_; }
  std::size_t size() const { return shell_of_.size(); }

  std::span<const int> coords(std::size_t pos) const {
    return {coords_.data() + pos * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  IndexPoint point(std::size_t pos) const;
  int shell(std::size_t pos) const { return shell_of_[pos]; }

  /// First linear position of shell k (k <= radius + 1).
  std::size_t shell_begin(int k) const;

  /// Linear position of a point, or nullopt if it lies outside the box.
  std::optional<std::size_t> position(std::span<const int> coords) const;
  std::optional<std::size_t> position(const IndexPoint& j) const { return position(j.coords); }

 private:
  int d_;
  int radius_;
  std::vector<int> coords_;
  std::vector<int> shell_of_;
  std::vector<std::uint32_t> raster_to_pos_;
};

/// Shared, lazily built indexing for a (d, radius) box. Thread-safe.
std::shared_ptr<const BoxIndexing> box_indexing(int d, int radius);

/// Finitely supported sequence on Z^d, stored densely over the box of radius
/// support_radius in BoxIndexing order. Entries outside the box are zero.
class FiniteVector {
 public:
  FiniteVector(int d, int support_radius);
  FiniteVector(int d, int support_radius, std::vector<cplx> values);

  int dim() const { return d_; }
  int support_radius() const { return radius_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  cplx at(const IndexPoint& j) const;
  void set(const IndexPoint& j, cplx v);

  /// Same vector viewed on a larger box (zero padding).
  FiniteVector padded(int radius) const;

 private:
  int d_;
  int radius_;
  std::vector<cplx> values_;
};

/// (sum_j ((1+||j||_inf)^s |x_j|)^p)^(1/p), or the weighted sup for p = inf.
double weighted_norm(const FiniteVector& x, const SpaceSpec& spec);

/// Same norm over raw values laid out in BoxIndexing order for dimension d.
double weighted_norm(std::span<const cplx> values, int d, double p, double s);

}  // namespace wedgeframe
