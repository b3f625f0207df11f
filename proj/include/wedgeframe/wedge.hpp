#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/envelope.hpp"

namespace wedgeframe {

enum class Orientation { Left, Right };

/// Wedge-decay certificate |m_{j'j}| <= w(lambda|j'| - |j|) (1+|j|)^r1 (1+|j'|)^r2
/// on lambda|j'| - |j| > K0 (left wedge, lambda > 1). For 0 < lambda < 1 the
/// profile describes a right wedge: the same bound with the slack
/// |j| - lambda|j'|.
struct DecayProfile {
  Envelope w;
  double lambda = 2.0;
  double K0 = 1.0;
  double r1 = 0.0;
  double r2 = 0.0;

  Orientation orientation() const { return lambda > 1.0 ? Orientation::Left : Orientation::Right; }
  void validate() const;
};

using EntryFn = std::function<cplx(std::span<const int> row, std::span<const int> col)>;

/// Bi-infinite matrix M: l^{p1}_{s1}(Z^d) -> l^{p2}_{s2}(Z^d) given by an entry
/// generator. The generator must be pure and thread-safe.
struct MatrixSpec {
  int d = 1;
  EntryFn entry;
  SpaceSpec domain;
  SpaceSpec codomain;
  DecayProfile profile;
  bool certified = false;
};

/// Dense truncation (m_{j'j}) over |j'| <= Ntilde, |j| <= N, row-major, both
/// index boxes in BoxIndexing order.
struct DenseBlock {
  int d = 1;
  int Ntilde = 0;
  int N = 0;
  std::vector<cplx> values;

  DenseBlock() = default;
  DenseBlock(int d_, int Ntilde_, int N_);

  std::size_t rows() const { return static_cast<std::size_t>(box_size(d, Ntilde)); }
  std::size_t cols() const { return static_cast<std::size_t>(box_size(d, N)); }
  cplx& operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  cplx operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  /// Conjugate transpose; the result has Ntilde and N swapped.
  DenseBlock adjoint() const;
};

/// Critical decay exponent (d/q1 + d/p2) + r1 + r2 - s1 + s2 that a left-wedge
/// spec must exceed for the target spaces.
double critical_exponent(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain);

/// Smallest delta >= 0 meeting the strict exponent conditions (with a small
/// margin), used when the caller supplies none.
double default_delta(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain);

/// Throws EXPONENTS if delta violates the exponent conditions and
/// DIVERGENT_TAIL if the envelope is not strictly supercritical.
void check_admissible(const DecayProfile& profile, const SpaceSpec& domain, const SpaceSpec& codomain,
                      double delta);

/// Envelope bound for one entry, or nullopt inside the wedge complement.
std::optional<double> entry_bound(const DecayProfile& profile, const IndexPoint& row, const IndexPoint& col);
std::optional<double> entry_bound(const DecayProfile& profile, int row_norm, int col_norm);

/// sum_{k >= ceil(K)} k^(d-1) w(k)^q1 as certified {upper, lower}.
TailSum inner_tail(const DecayProfile& profile, double K, double q1, int d);

struct AK1Params {
  double p2 = 2.0;
  double q1 = 2.0;
  int d = 1;
  double r1 = 0.0;
  double r2 = 0.0;
  DecayProfile profile;
};

/// A_{K1} = K1^{p2 r1} sum_{K>=K1} K^{p2 r2+d-1} (sum_{k>=K} k^{d-1} w(k)^{q1})^{p2/q1}
/// as certified {upper, lower}. For p2 = inf the outer sum becomes a sup
/// and the prefactor K1^{r1}.
TailSum a_k1(const AK1Params& params, long K1);

/// Dense truncation, assembled in parallel by row.
DenseBlock truncate(const MatrixSpec& spec, int Ntilde, int N);

/// Truncation that keeps, in each row, the entries with modulus at least
/// drop_rel times the row's largest. Column-sorted within each row.
struct SparseBlock {
  int d = 1;
  int Ntilde = 0;
  int N = 0;
  std::vector<std::size_t> row_start;  // rows()+1 offsets into col/values
  std::vector<std::size_t> col;
  std::vector<cplx> values;
  double max_row_norm = 0.0;           // over the kept entries

  std::size_t rows() const { return static_cast<std::size_t>(box_size(d, Ntilde)); }
  std::size_t cols() const { return static_cast<std::size_t>(box_size(d, N)); }
};

SparseBlock truncate_sparse(const MatrixSpec& spec, int Ntilde, int N, double drop_rel);

/// Certified bound on the l^{p2}_{s2} norm of the rows |j'| > Jmax of Mx,
/// with x given in the original (weighted) coordinates.
double row_tail_bound(const MatrixSpec& spec, const FiniteVector& x, int Jmax);

/// Spot check |entry| <= entry_bound over |j'| <= row_radius, |j| <= col_radius.
/// Returns the worst ratio observed; sets spec.certified when it is <= 1.
double spot_certify(MatrixSpec& spec, int row_radius, int col_radius);

/// Adjoint matrix with swapped spaces and the mirrored wedge profile
/// (lambda -> 1/lambda, r1 <-> r2, w(x) -> w(lambda x) dominated in-family).
MatrixSpec adjoint(const MatrixSpec& spec);

}  // namespace wedgeframe
