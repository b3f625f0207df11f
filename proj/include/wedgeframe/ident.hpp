#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/points.hpp"
#include "wedgeframe/tf.hpp"
#include "wedgeframe/wedge.hpp"

namespace wedgeframe {

/// Smooth bump on [0, a]: 1 on |t - a/2| <= a/(2 lambda), 0 on |t - a/2| >= a/2,
/// smoothstep phi(u)/(phi(u)+phi(1-u)), phi(u) = exp(-1/u), in between.
struct Bump {
  double a = 1.5;
  double lambda = 1.1;
  double operator()(double t) const;
};

Bump bump_eta(double a, double lambda);

/// Signal evaluable anywhere on R.
using Signal = std::function<cplx(double)>;

Signal gaussian_signal();
/// sum_k c_k g0(x - x_k) exp(2 pi i xi_k x) with seeded random c_k, x_k in
/// [-2, 2], xi_k in [-1, 1].
Signal random_gaussian_mixture(std::uint64_t seed, int terms = 6);
/// Lanczos (a = 8) interpolation of samples; zero outside the grid.
Signal interpolated_signal(SampledFunction f);

/// Spreading function eta(t) eta(nu) on [0, a]^2 with its quadrature and the
/// signal grid [-L, L] of step h.
struct SpreadingSpec {
  double a = 1.5;
  double lambda = 1.1;
  Bump eta;
  int nu_nodes = 128;
  int t_nodes = 128;
  int t_sub = 0;  // t step h / t_sub; 0 picks the smallest with h/t_sub <= a/t_nodes
  double h = 1.0 / 64.0;
  double L = 16.0;

  /// Throws CONFIG unless a > 0 and 1 < lambda^4 < a^2.
  static SpreadingSpec make(double a, double lambda);
  void validate() const;
  SampledFunction grid_template() const;
  int t_ratio() const;
  double t_step() const { return h / t_ratio(); }
  /// Same spec with t and nu quadrature steps halved.
  SpreadingSpec refined() const;
};

/// eta-check(u) = int eta(nu) exp(2 pi i nu u) dnu by the nu quadrature.
cplx eta_check(const SpreadingSpec& spec, double u);

struct OperatorResult {
  SampledFunction Hf;
  double halving_error = 0.0;  // ||Hf_h - Hf_{h/2}|| / ||Hf_{h/2}||
};

/// Hf(x) = int int eta(t) eta(nu) exp(2 pi i nu (x - t)) f(x - t) dt dnu on
/// the signal grid, with a step-halving error estimate.
OperatorResult apply_operator(const SpreadingSpec& spec, const Signal& f);

/// P_j g for z = (lambda/a) j as the operator with modulated spreading
/// function, sampled on the signal grid. Throws GRID_RANGE if P_j g leaves
/// the grid and UNRESOLVED_GRID if the grid misses its frequencies.
SampledFunction family_member(const SpreadingSpec& spec, std::span<const int> j, const Signal& g);

/// The same member computed as pi(z) P pi(z)^* g.
SampledFunction family_member_composed(const SpreadingSpec& spec, std::span<const int> j, const Signal& g);

/// Entries <P_j g, pi((lambda^2/a) j') g0> for |j'| <= Ntilde, |j| <= N.
DenseBlock identification_matrix(const SpreadingSpec& spec, const Signal& g, int Ntilde, int N);

struct IdentPoint {
  int N = 0;
  int Ntilde = 0;         // rows of the tall truncation used for sigma_min
  double sigma_min = 0.0;
  int Ntilde_wide = 0;    // rows of the wide truncation
  std::size_t wide_rows = 0;
  std::size_t wide_cols = 0;
};

/// Row radius covering every analysis point within reach of the columns.
int tall_rows(const SpreadingSpec& spec, int N);
/// min(ceil(N/lambda), N - 1), so (2 Ntilde + 1)^2 < (2N + 1)^2.
int wide_rows(const SpreadingSpec& spec, int N);

std::vector<IdentPoint> identifiability_diagnostic(const SpreadingSpec& spec, const Signal& g,
                                                   const std::vector<int>& sizes);

}  // namespace wedgeframe
