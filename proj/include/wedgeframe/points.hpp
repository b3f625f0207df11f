#pragma once

#include <span>
#include <string>
#include <vector>

namespace wedgeframe {

/// Point z = (y, xi) of R^d x R^d.
struct TFPoint {
  std::vector<double> y;
  std::vector<double> xi;

  TFPoint() = default;
  TFPoint(std::vector<double> y_, std::vector<double> xi_) : y(std::move(y_)), xi(std::move(xi_)) {}
  static TFPoint zero(int d) { return TFPoint(std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)); }
  /// Splits 2d coordinates into time (first d) and frequency (last d).
  static TFPoint from_coords(std::span<const double> c);

  int dim() const { return static_cast<int>(y.size()); }
  std::vector<double> coords() const;
  double sup_norm() const;
  double norm2_squared() const;

  TFPoint operator+(const TFPoint& o) const;
  TFPoint operator-(const TFPoint& o) const;
  TFPoint scaled(double s) const;
  bool operator==(const TFPoint&) const = default;
};

double sup_distance(std::span<const double> a, std::span<const double> b);

enum class SequenceKind { Lattice, Explicit };

/// Finite point sequence in R^{2d}; repeats are kept (a sequence, not a set).
/// Coordinates are stored flat, 2d per point. The coverage window is the
/// region in which the sequence is known to be complete.
class PointSequence {
 public:
  PointSequence() = default;
  PointSequence(int d, std::vector<double> flat_coords);

  /// mu Z^{2d} restricted to |j|_inf <= radius, listed in shell-lex order of j.
  static PointSequence lattice(double mu, int d, int radius);

  int d() const { return d_; }
  int phase_dim() const { return 2 * d_; }
  std::size_t size() const { return d_ == 0 ? 0 : coords_.size() / (2 * d_); }
  bool empty() const { return size() == 0; }
  SequenceKind kind() const { return kind_; }
  double lattice_scale() const { return mu_; }
  int lattice_radius() const { return radius_; }

  std::span<const double> coords(std::size_t i) const {
    return {coords_.data() + i * phase_dim(), static_cast<std::size_t>(phase_dim())};
  }
  TFPoint point(std::size_t i) const { return TFPoint::from_coords(coords(i)); }
  const std::vector<double>& flat() const { return coords_; }

  const std::vector<double>& cover_lo() const { return lo_; }
  const std::vector<double>& cover_hi() const { return hi_; }
  void set_coverage(std::vector<double> lo, std::vector<double> hi);

  PointSequence doubled() const;
  PointSequence translated(std::span<const double> u) const;

 private:
  int d_ = 0;
  SequenceKind kind_ = SequenceKind::Explicit;
  double mu_ = 0.0;
  int radius_ = 0;
  std::vector<double> coords_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// CSV of 2d coordinates per line; '#' lines are comments.
PointSequence read_gamma_csv(const std::string& path, int d);
void write_gamma_csv(const PointSequence& gamma, const std::string& path);

}  // namespace wedgeframe
