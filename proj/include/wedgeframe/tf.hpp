#pragma once

#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wedgeframe/core_seq.hpp"
#include "wedgeframe/density.hpp"
#include "wedgeframe/envelope.hpp"
#include "wedgeframe/points.hpp"
#include "wedgeframe/wedge.hpp"

namespace wedgeframe {

/// With pi(y, xi) f(x) = exp(2 pi i xi (x - y)) f(x - y), the integral
/// int f(x) conj(g(x - y)) exp(-2 pi i (x - y) xi) dx equals <f, pi(z) g>
/// exactly, so quadrature values and inner products share one phase.
inline constexpr bool kStftIsInnerProduct = true;

/// Samples v[k] of a function on the uniform grid x0 + k h (d = 1).
struct SampledFunction {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<cplx> v;

  std::size_t size() const { return v.size(); }
  double x(std::size_t k) const { return x0 + static_cast<double>(k) * h; }
  double x_end() const { return v.empty() ? x0 : x(v.size() - 1); }
  double l2_norm() const;
  double max_abs() const;
};

enum class WindowKind { Gaussian, Sampled };

/// Analysis/synthesis window: the L^2-normalized Gaussian 2^{d/4} e^{-pi|x|^2}
/// or samples (d = 1) with a declared envelope |g(x)| <= env(|x|).
struct Window {
  WindowKind kind = WindowKind::Gaussian;
  int d = 1;
  SampledFunction samples;
  Envelope envelope{std::pow(2.0, 0.25), 0.0, std::numbers::pi, kInf};

  static Window gaussian(int d = 1);
  /// Throws ENVELOPE if a sample exceeds the declared envelope.
  static Window sampled(SampledFunction f, Envelope env);

  double sup_abs() const;
};

/// 2^{1/4} exp(-pi x^2).
double gaussian_1d(double x);

SampledFunction sample(const Window& g, double L = 12.0, double h = 1.0 / 32.0);
SampledFunction sample_function(const std::function<cplx(double)>& f, double L, double h);

/// pi(z) f on the same grid when y is a multiple of h, else on the grid moved
/// by y. Throws GRID_RANGE if non-negligible samples would leave the grid.
SampledFunction tf_shift(const SampledFunction& f, const TFPoint& z);

/// <pi(z1) g0, pi(z2) g0> for the normalized Gaussian g0, any d.
cplx gauss_inner(const TFPoint& z1, const TFPoint& z2);

/// |V_g0 g0(z)| = exp(-pi |z|_2^2 / 2).
double stft_gauss_gauss(const TFPoint& z);

struct QuadratureOptions {
  double step = 1.0 / 32.0;
  double L = 12.0;
};

struct QuadratureResult {
  cplx value;
  double error_bound = 0.0;  // truncation bound from the declared envelopes
};

/// V_g f(z) = int f(x) conj(g(x - y)) exp(-2 pi i (x - y) xi) dx by the
/// trapezoidal rule. Sampled inputs fix the nodes to their grid; Gaussian
/// pairs use nodes of the requested step around y/2. Throws UNRESOLVED_GRID
/// if the step exceeds 1/(4(|xi|_inf + 4)).
QuadratureResult stft_quadrature(const Window& f, const Window& g, const TFPoint& z,
                                 const QuadratureOptions& opt = {});

struct GaborOptions {
  double p = 2.0;
  double s = 0.0;
  double delta = 1.0;                       // decay margin for measured power-law envelopes
  double gamma_scale = 0.0;                 // nominal spacing of an explicit sequence, 0 derives it
  std::optional<TFPoint> enumeration_center;  // defaults to z0
  QuadratureOptions quad;
};

/// Shared data behind a Gabor composition matrix.
struct GaborSystem {
  Window g;
  PointSequence gamma;
  double mu = 1.0;
  TFPoint z0;
  TFPoint center;
  Enumeration enumeration;
  double gamma_scale = 0.0;
  double offset = 0.0;  // c with |gamma_{j'} - mu j - z0| >= mu (lambda|j'| - |j|) - c
};

/// Matrix with entries <pi(mu j + z0) g0, pi(gamma_{j'}) g> over the index
/// dimension 2d, gamma enumerated by sup distance to the center. Gaussian g
/// uses the closed form and its Gaussian envelope; other windows get a
/// measured power-law envelope with 10% inflation (ENVELOPE if unstable).
MatrixSpec gabor_analysis_synthesis_matrix(const Window& g, const PointSequence& gamma, double mu, const TFPoint& z0,
                                           const GaborOptions& opt = {});
/// Entry generator alone, without envelope measurement or certification.
EntryFn gabor_entry(std::shared_ptr<const GaborSystem> system, const QuadratureOptions& quad = {});
MatrixSpec gabor_analysis_synthesis_matrix(std::shared_ptr<const GaborSystem> system, const GaborOptions& opt = {});
std::shared_ptr<GaborSystem> make_gabor_system(const Window& g, const PointSequence& gamma, double mu,
                                               const TFPoint& z0, const GaborOptions& opt = {});

double coeff_mod_norm(const FiniteVector& c, double p, double s);

struct MoleculeFamily {
  PointSequence centers;
  /// V_g0 g_{member}(z), member = position in the sequence, z as (y, xi) coordinates.
  std::function<cplx(std::size_t, std::span<const double>)> stft;
  Envelope w;
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Members pi(gamma_k) g0 scaled by `scale`.
MoleculeFamily gaussian_molecules(const PointSequence& gamma, Envelope w, double scale = 1.0);

struct MoleculeReport {
  bool pass = true;
  double worst_ratio = 0.0;
  std::size_t worst_member = 0;
  TFPoint worst_z;
};

/// max |V_g0 g_{j'}(z)| / ((1+|z|)^r1 (1+|j'|)^r2 w(|z - gamma_{j'}|)) over members and
/// probes, with j' from the enumeration by norm about the origin.
MoleculeReport molecule_check(const MoleculeFamily& family, const std::vector<TFPoint>& probes);

struct FramePoint {
  int N = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sigma_min = 0.0;
};

/// sigma_min of the composition truncated to columns |j| <= N and rows
/// whose gamma lies within mu N + margin of the center.
std::vector<FramePoint> frame_lower_diagnostic(const Window& g, const PointSequence& gamma, double mu,
                                               const std::vector<int>& sizes, double margin = 6.0,
                                               const GaborOptions& opt = {});

/// Window CSV: lines "x,re,im" on a uniform grid, with a header comment
/// "# envelope C=<c> alpha=<a> beta=<b>".
Window read_window_csv(const std::string& path);
void write_window_csv(const Window& g, const std::string& path);

}  // namespace wedgeframe
