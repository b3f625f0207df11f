#include "wedgeframe/points.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wedgeframe/block_io.hpp"
#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/error.hpp"

namespace wedgeframe {

TFPoint TFPoint::from_coords(std::span<const double> c) {
  const std::size_t d = c.size() / 2;
  return TFPoint(std::vector<double>(c.begin(), c.begin() + d), std::vector<double>(c.begin() + d, c.end()));
}

std::vector<double> TFPoint::coords() const {
  std::vector<double> c(y);
  c.insert(c.end(), xi.begin(), xi.end());
  return c;
}

double TFPoint::sup_norm() const {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  for (double v : xi) m = std::max(m, std::abs(v));
  return m;
}

double TFPoint::norm2_squared() const {
  double s = 0.0;
  for (double v : y) s += v * v;
  for (double v : xi) s += v * v;
  return s;
}

TFPoint TFPoint::operator+(const TFPoint& o) const {
  TFPoint r = *this;
  for (std::size_t i = 0; i < y.size(); ++i) {
    r.y[i] += o.y[i];
    r.xi[i] += o.xi[i];
  }
  return r;
}

TFPoint TFPoint::operator-(const TFPoint& o) const { return *this + o.scaled(-1.0); }

TFPoint TFPoint::scaled(double s) const {
  TFPoint r = *this;
  for (double& v : r.y) v *= s;
  for (double& v : r.xi) v *= s;
  return r;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PointSequence::PointSequence(int d, std::vector<double> flat_coords) : d_(d), coords_(std::move(flat_coords)) {
  if (d < 1) throw Error(ErrorCode::Config, "point sequence dimension must be >= 1");
  const std::size_t D = 2 * static_cast<std::size_t>(d);
  if (coords_.size() % D != 0) throw Error(ErrorCode::Config, "coordinate count is not a multiple of 2d");
  for (double v : coords_)
    if (!std::isfinite(v)) throw Error(ErrorCode::Config, "point coordinates must be finite");
  lo_.assign(D, 0.0);
  hi_.assign(D, 0.0);
  if (coords_.empty()) return;
  lo_.assign(D, kInf);
  hi_.assign(D, -kInf);
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    lo_[i % D] = std::min(lo_[i % D], coords_[i]);
    hi_[i % D] = std::max(hi_[i % D], coords_[i]);
  }
}

PointSequence PointSequence::lattice(double mu, int d, int radius) {
  if (!(mu > 0.0) || radius < 0) throw Error(ErrorCode::Config, "lattice needs mu > 0 and radius >= 0");
  const auto box = box_indexing(2 * d, radius);
  std::vector<double> c;
  c.reserve(box->size() * 2 * d);
  for (std::size_t i = 0; i < box->size(); ++i)
    for (int v : box->coords(i)) c.push_back(mu * v);
  PointSequence out(d, std::move(c));
  out.kind_ = SequenceKind::Lattice;
  out.mu_ = mu;
  out.radius_ = radius;
  return out;
}

void PointSequence::set_coverage(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != static_cast<std::size_t>(phase_dim()) || hi.size() != lo.size())
    throw Error(ErrorCode::Config, "coverage window has the wrong dimension");
  lo_ = std::move(lo);
  hi_ = std::move(hi);
}

PointSequence PointSequence::doubled() const {
  std::vector<double> c;
  c.reserve(2 * coords_.size());
  const std::size_t D = phase_dim();
  for (std::size_t i = 0; i < size(); ++i)
    for (int rep = 0; rep < 2; ++rep) c.insert(c.end(), coords_.begin() + i * D, coords_.begin() + (i + 1) * D);
  PointSequence out(d_, std::move(c));
  out.set_coverage(lo_, hi_);
  return out;
}

PointSequence PointSequence::translated(std::span<const double> u) const {
  const std::size_t D = phase_dim();
  if (u.size() != D) throw Error(ErrorCode::Config, "translation has the wrong dimension");
  std::vector<double> c = coords_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += u[i % D];
  PointSequence out(d_, std::move(c));
  std::vector<double> lo = lo_, hi = hi_;
  for (std::size_t i = 0; i < D; ++i) {
    lo[i] += u[i];
    hi[i] += u[i];
  }
  out.set_coverage(std::move(lo), std::move(hi));
  return out;
}

PointSequence read_gamma_csv(const std::string& path, int d) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<double> c;
  std::string line;
  const int D = 2 * d;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double v;
    int n = 0;
    while (ls >> v) {
      c.push_back(v);
      ++n;
    }
    if (n == 0) continue;
    if (n != D) throw Error(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(D) + " coordinates");
  }
  return PointSequence(d, std::move(c));
}

void write_gamma_csv(const PointSequence& gamma, const std::string& path) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    auto c = gamma.coords(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.17g", k ? "," : "", c[k]);
      out += buf;
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace wedgeframe
