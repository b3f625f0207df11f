#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/linsolve.hpp"
#include "wedgeframe/tf.hpp"
#include "wedgeframe/wedge.hpp"

namespace wedgeframe {

struct WitnessParams {
  double epsilon = 1e-2;
  double p1 = 2.0;
  double p2 = 2.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  std::optional<double> delta;  // default_delta when absent
  int d = 1;
  DecayProfile profile;
  double cert_slack = 0.05;
  double kernel_tol = kDefaultKernelTol;
  int max_escalations = 8;

  static WitnessParams from_spec(const MatrixSpec& spec, double epsilon);
};

/// Smallest K1 > max(K0, 1) whose certified tail quantity meets the
/// threshold of the regime selected by (p1, p2). Throws K1_RANGE past 1e7.
long choose_k1(const WitnessParams& params);

/// N = ceil(lambda (K1+1)/(lambda-1)), Ntilde = ceil(N/lambda) + K1.
std::pair<int, int> dims_from_k1(long K1, double lambda);

struct Witness {
  FiniteVector x{1, 0};
  double epsilon = 0.0;
  double p2 = 2.0;
  long K1 = 0;
  int N = 0;
  int Ntilde = 0;
  int Jmax = 0;
  double numeric_norm = 0.0;      // rows |j'| <= Jmax, weighted l^{p2}_{s2}
  double tail_certificate = 0.0;  // rows |j'| > Jmax
  double total_bound = 0.0;
  double kernel_residual = 0.0;   // rows |j'| <= Ntilde, relative to sigma_max
  double explicit_tail = 0.0;     // rows Jmax < |j'| <= 2 Jmax by direct multiplication
  double verified_norm = 0.0;     // rows |j'| <= 2 Jmax by direct multiplication
  int escalations = 0;
  bool adjoint = false;           // built on the adjoint of a right-wedge spec
};

/// Truncation witness: choose K1, truncate, take a kernel vector, then
/// certify ||Mx|| by direct rows up to Jmax and the analytic row tail.
/// Right-wedge specs are handled through their adjoint. Throws CERT_FAIL if
/// the direct rows exceed the target or contradict the tail certificate.
Witness build_witness(const MatrixSpec& spec, const WitnessParams& params);

/// Rows |j'| <= radius of Mx for x on the column box, in BoxIndexing order.
std::vector<cplx> apply_rows(const MatrixSpec& spec, const FiniteVector& x, int radius);

struct DminusParams {
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  int n0 = 0;
  double R0_tilde = 0.0;
  double R0 = 0.0;
  int N0 = 0;
  int K1 = 0;
  double K2 = 0.0;
  double K2_tilde = 0.0;
  std::vector<double> z0;
  double epsilon = 0.0;
  double lower_density = 0.0;
  double upper_density = 0.0;
};

struct DminusOptions {
  double p = 2.0;
  double alpha2_margin = 0.02;  // alpha2^{2d} = lower density estimate + margin
  double alpha3_pow = 0.99;     // alpha3^{2d}
  double density_radius = 0.0;  // 0 selects a quarter of the coverage width
  double R0_step = 1.0;
  double R0_max = 0.0;          // 0 selects half the coverage width
  int max_n0 = 1000;
  double kernel_tol = kDefaultKernelTol;
};

struct DminusWitness {
  FiniteVector x{2, 0};
  DminusParams params;
  double p = 2.0;
  double case1_norm = 0.0;      // rows |j'| <= N0 - 1, direct
  double case2_bound = 0.0;
  double case2_numeric = 0.0;
  double case3_bound = 0.0;
  double case3_numeric = 0.0;   // rows beyond Case 2 up to the checked radius, direct
  double total_bound = 0.0;
  double kernel_residual = 0.0;
  int checked_radius = 0;
};

/// Density-deficit witness for molecules over Gamma = family.centers against
/// the Riesz basis pi(j/alpha3 + z0) g0. Throws NO_DEFICIT_BOX or
/// PARAM_INFEASIBLE when the construction has no admissible constants, and
/// CERT_FAIL if a geometric step fails on the actual sequence.
DminusWitness dminus_witness(const MoleculeFamily& family, double epsilon, const DminusOptions& opt = {});

std::string witness_to_json(const Witness& w, bool include_vector = true);
std::string dminus_to_json(const DminusWitness& w, bool include_vector = true);

}  // namespace wedgeframe
