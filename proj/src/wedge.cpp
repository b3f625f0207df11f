#include "wedgeframe/wedge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "wedgeframe/error.hpp"
#include "wedgeframe/parallel.hpp"

namespace wedgeframe {

namespace {

constexpr int kExtraTailRows = 4096;
constexpr double kStopRatio = 1e-15;

std::string format_index(std::span<const int> c) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

double inv_or_zero(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

void DecayProfile::validate() const {
  w.validate();
  if (!(lambda > 0.0) || lambda == 1.0 || !std::isfinite(lambda))
    throw Error(ErrorCode::Orientation, "lambda must be positive and different from 1");
  if (!(K0 > 0.0) || !std::isfinite(K0)) throw Error(ErrorCode::Config, "K0 must be positive");
  if (!std::isfinite(r1) || !std::isfinite(r2)) throw Error(ErrorCode::Exponents, "r1, r2 must be finite");
}

DenseBlock::DenseBlock(int d_, int Ntilde_, int N_) : d(d_), Ntilde(Ntilde_), N(N_) {
  values.assign(rows() * cols(), cplx{});
}

DenseBlock DenseBlock::adjoint() const {
  DenseBlock out(d, N, Ntilde);
  const std::size_t m = rows(), n = cols();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out.values[c * m + r] = std::conj(values[r * n + c]);
  return out;
}

double critical_exponent(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain) {
  const int d = domain.d;
  const double q1 = domain.conjugate();
  return d * inv_or_zero(q1) + d * inv_or_zero(codomain.p) + profile.r1 + profile.r2 - domain.s + codomain.s;
}

double default_delta(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain) {
  constexpr double margin = 1e-6;
  const double r1e = profile.r1 - domain.s;
  const double r2e = profile.r2 + codomain.s;
  double delta = 0.0;
  if (r1e <= 0.0) delta = std::max(delta, -r1e + margin);
  const double t = domain.d * inv_or_zero(codomain.p) + r1e + r2e;
  if (t <= 0.0) delta = std::max(delta, -t + margin);
  return delta;
}

void check_admissible(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain,
                      double delta) {
  if (profile.orientation() != Orientation::Left)
    throw Error(ErrorCode::Orientation, "exponent conditions are stated for left wedges; use the adjoint");
  const double r1e = profile.r1 - domain.s;
  const double r2e = profile.r2 + codomain.s;
  if (!(delta >= 0.0)) throw Error(ErrorCode::Exponents, "delta must be >= 0");
  if (!(r1e + delta > 0.0)) throw Error(ErrorCode::Exponents, "r1 - s1 + delta must be positive");
  if (!(domain.d * inv_or_zero(codomain.p) + r1e + r2e + delta > 0.0))
    throw Error(ErrorCode::Exponents, "d/p2 + r1 + r2 - s1 + s2 + delta must be positive");
  const auto& w = profile.w;
  if (w.compact() || w.beta > 0.0 || w.C == 0.0) return;
  const double crit = critical_exponent(profile, domain, codomain) + delta;
  if (!(w.alpha > crit)) {
    std::ostringstream os;
    os << "envelope exponent " << w.alpha << " does not exceed the critical exponent " << crit;
    throw Error(ErrorCode::DivergentTail, os.str());
  }
}

std::optional<double> entry_bound(const DecayProfile& profile, int row_norm, int col_norm) {
  if (profile.orientation() != Orientation::Left)
    throw Error(ErrorCode::Orientation, "entry_bound is defined for left wedges");
  const double slack = profile.lambda * row_norm - col_norm;
  if (!(slack > profile.K0)) return std::nullopt;
  return profile.w(slack) * std::pow(1.0 + col_norm, profile.r1) * std::pow(1.0 + row_norm, profile.r2);
}

std::optional<double> entry_bound(const DecayProfile& profile, const IndexPoint& row, const IndexPoint& col) {
  return entry_bound(profile, row.sup_norm(), col.sup_norm());
}

TailSum inner_tail(const DecayProfile& profile, double K, double q1, int d) {
  if (!(K >= 1.0)) throw Error(ErrorCode::Config, "inner_tail needs K >= 1");
  return inner_series(profile.w, static_cast<long>(std::ceil(K)), q1, d);
}

TailSum a_k1(const AK1Params& params, long K1) {
  if (!(params.p2 >= 1.0) || !(params.q1 >= 1.0) || params.d < 1)
    throw Error(ErrorCode::Exponents, "a_k1 needs p2, q1 in [1, inf] and d >= 1");
  if (K1 < 1) throw Error(ErrorCode::Config, "a_k1 needs K1 >= 1");
  const TailSum outer = outer_series(params.profile.w, params.d, params.q1, params.p2, params.r2, K1);
  const double pre = std::isinf(params.p2) ? std::pow(static_cast<double>(K1), params.r1)
                                           : std::pow(static_cast<double>(K1), params.p2 * params.r1);
  return {pre * outer.upper, pre * outer.lower};
}

DenseBlock truncate(const MatrixSpec& spec, int Ntilde, int N) {
  if (Ntilde < 0 || N < 0) throw Error(ErrorCode::Config, "truncation radii must be >= 0");
  DenseBlock block(spec.d, Ntilde, N);
  const auto rows = box_indexing(spec.d, Ntilde);
  const auto cols = box_indexing(spec.d, N);
  const std::size_t n = block.cols();
  parallel_for(0, block.rows(), [&](std::size_t r) {
    auto jr = rows->coords(r);
    for (std::size_t c = 0; c < n; ++c) {
      auto jc = cols->coords(c);
      try {
        block.values[r * n + c] = spec.entry(jr, jc);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::EntryEval, "entry " + format_index(jr) + "," + format_index(jc) + ": " + e.what());
      }
    }
  });
  return block;
}

SparseBlock truncate_sparse(const MatrixSpec& spec, int Ntilde, int N, double drop_rel) {
  if (Ntilde < 0 || N < 0) throw Error(ErrorCode::Config, "truncation radii must be >= 0");
  SparseBlock block;
  block.d = spec.d;
  block.Ntilde = Ntilde;
  block.N = N;
  const auto rows = box_indexing(spec.d, Ntilde);
  const auto cols = box_indexing(spec.d, N);
  const std::size_t m = block.rows();
  const std::size_t n = block.cols();
  std::vector<std::vector<std::pair<std::size_t, cplx>>> kept(m);
  std::vector<double> norms(m, 0.0);
  parallel_for(0, m, [&](std::size_t r) {
    auto jr = rows->coords(r);
    std::vector<cplx> row(n);
    double big = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      auto jc = cols->coords(c);
      try {
        row[c] = spec.entry(jr, jc);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::EntryEval, "entry " + format_index(jr) + "," + format_index(jc) + ": " + e.what());
      }
      big = std::max(big, std::abs(row[c]));
    }
    const double cut = drop_rel * big;
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (row[c] != cplx(0.0) && std::abs(row[c]) >= cut) {
        kept[r].emplace_back(c, row[c]);
        s += std::norm(row[c]);
      }
    norms[r] = std::sqrt(s);
  });
  block.row_start.assign(m + 1, 0);
  for (std::size_t r = 0; r < m; ++r) block.row_start[r + 1] = block.row_start[r] + kept[r].size();
  block.col.reserve(block.row_start[m]);
  block.values.reserve(block.row_start[m]);
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto& [c, v] : kept[r]) {
      block.col.push_back(c);
      block.values.push_back(v);
    }
    block.max_row_norm = std::max(block.max_row_norm, norms[r]);
  }
  return block;
}

double row_tail_bound(const MatrixSpec& spec, const FiniteVector& x, int Jmax) {
  const DecayProfile& P = spec.profile;
  if (P.orientation() != Orientation::Left)
    throw Error(ErrorCode::Orientation, "row_tail_bound is defined for left wedges");
  const int d = spec.d;
  const int N = x.support_radius();
  const double lambda = P.lambda;
  const double p1 = spec.domain.p;
  const double q1 = spec.domain.conjugate();
  const double p2 = spec.codomain.p;
  const double r1e = P.r1 - spec.domain.s;
  const double r2e = P.r2 + spec.codomain.s;
  const Envelope& w = P.w;

  if (!(lambda * (Jmax + 1.0) - N > P.K0)) {
    std::ostringstream os;
    os << "rows beyond Jmax=" << Jmax << " are not all inside the wedge for support radius " << N;
    throw Error(ErrorCode::TailRange, os.str());
  }
  const double xt = weighted_norm(x.values(), d, p1, spec.domain.s);
  if (xt == 0.0 || w.C == 0.0) return 0.0;

  // Column-side Hoelder factor, exact shell counts.
  auto psi = [&](long R) {
    if (w.compact() && lambda * R - N > w.cutoff) return 0.0;
    double m = 0.0;
    if (std::isinf(q1)) {
      for (int s = 0; s <= N; ++s) m = std::max(m, std::pow(1.0 + s, r1e) * w(lambda * R - s));
    } else {
      CompensatedSum acc;
      for (int s = 0; s <= N; ++s) {
        const double v = std::pow(1.0 + s, r1e) * w(lambda * R - s);
        if (v > 0.0) acc.add(static_cast<double>(shell_count(d, s)) * std::pow(v, q1));
      }
      m = std::pow(acc.value(), 1.0 / q1);
    }
    return xt * m * std::pow(1.0 + R, r2e);
  };
  double SN = 0.0;
  if (std::isinf(q1)) {
    for (int s = 0; s <= N; ++s) SN = std::max(SN, std::pow(1.0 + s, r1e));
  } else {
    CompensatedSum acc;
    for (int s = 0; s <= N; ++s) acc.add(static_cast<double>(shell_count(d, s)) * std::pow(1.0 + s, r1e * q1));
    SN = std::pow(acc.value(), 1.0 / q1);
  }
  // (1+R)^E <= kappa (1+v)^E with v = lambda R - N.
  auto kappa = [&](double E) { return E >= 0.0 ? std::pow((lambda + N) / lambda, E) : std::pow(lambda, -E); };

  if (std::isinf(p2)) {
    const PowerGauss H{kappa(r2e) * w.C, r2e - w.alpha, w.beta};
    if (!w.compact() && H.b == 0.0 && H.c > 0.0)
      throw Error(ErrorCode::DivergentTail, "row bounds do not decay for p2 = inf");
    double best = 0.0;
    long extra = 0;
    for (long R = Jmax + 1;; ++R) {
      const double v0 = lambda * R - N;
      if (w.compact() && v0 > w.cutoff) return best;
      if (H.nonincreasing_from(v0)) {
        const double tail = xt * SN * H(v0);
        if (tail <= kStopRatio * best || extra >= kExtraTailRows) return std::max(best, tail);
        ++extra;
      }
      best = std::max(best, psi(R));
    }
  }

  const double E = (d - 1) + r2e * p2;
  const PowerGauss H{2.0 * d * std::pow(2.0, d - 1) * kappa(E) * std::pow(w.C, p2), E - w.alpha * p2, w.beta * p2};
  if (!w.compact() && H.b == 0.0 && H.c >= -1.0)
    throw Error(ErrorCode::DivergentTail, "row tail series diverges for this envelope");
  const double scale = std::pow(xt * SN, p2);
  CompensatedSum acc;
  long extra = 0;
  for (long R = Jmax + 1;; ++R) {
    const double v0 = lambda * R - N;
    if (w.compact() && v0 > w.cutoff) return std::pow(acc.value(), 1.0 / p2);
    if (v0 >= H.certified_from() && H.nonincreasing_from(v0)) {
      const double rem = scale * H.sum_from(v0, lambda);
      if (rem <= kStopRatio * acc.value() || extra >= kExtraTailRows)
        return std::pow(acc.value() + rem, 1.0 / p2);
      ++extra;
    }
    const double v = psi(R);
    if (v > 0.0) acc.add(static_cast<double>(shell_count(d, static_cast<int>(R))) * std::pow(v, p2));
  }
}

double spot_certify(MatrixSpec& spec, int row_radius, int col_radius) {
  const DecayProfile& P = spec.profile;
  const auto rows = box_indexing(spec.d, row_radius);
  const auto cols = box_indexing(spec.d, col_radius);
  double worst = 0.0;
  for (std::size_t r = 0; r < rows->size(); ++r) {
    const int rn = rows->shell(r);
    for (std::size_t c = 0; c < cols->size(); ++c) {
      const int cn = cols->shell(c);
      const double slack = P.orientation() == Orientation::Left ? P.lambda * rn - cn : cn - P.lambda * rn;
      if (!(slack > P.K0)) continue;
      const double bound = P.w(slack) * std::pow(1.0 + cn, P.r1) * std::pow(1.0 + rn, P.r2);
      const double mag = std::abs(spec.entry(rows->coords(r), cols->coords(c)));
      if (mag == 0.0) continue;
      const double ratio = bound > 0.0 ? mag / bound : kInf;
      worst = std::max(worst, ratio);
    }
  }
  spec.certified = worst <= 1.0 + 1e-12;
  return worst;
}

MatrixSpec adjoint(const MatrixSpec& spec) {
  MatrixSpec out;
  out.d = spec.d;
  auto entry = spec.entry;
  out.entry = [entry](std::span<const int> row, std::span<const int> col) { return std::conj(entry(col, row)); };
  out.domain = spec.codomain;
  out.codomain = spec.domain;
  const DecayProfile& P = spec.profile;
  DecayProfile Q;
  const double lam = P.lambda;
  // w(lam x) <= C min(1,lam)^(-alpha) (1+x)^(-alpha) exp(-beta lam^2 x^2).
  Q.w = Envelope{P.w.C * std::pow(std::min(1.0, lam), -P.w.alpha), P.w.alpha, P.w.beta * lam * lam,
                 P.w.compact() ? P.w.cutoff / lam : kInf};
  Q.lambda = 1.0 / lam;
  Q.K0 = P.K0 / lam;
  Q.r1 = P.r2;
  Q.r2 = P.r1;
  out.profile = Q;
  out.certified = spec.certified;
  return out;
}

}  // namespace wedgeframe
