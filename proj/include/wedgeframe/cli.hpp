#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wedgeframe/error.hpp"
#include "wedgeframe/wedge.hpp"

namespace wedgeframe::cli {

enum class Command { Witness, Frame, Density, Identify, Tailsum };

std::string to_string(Command c);
Command parse_command(const std::string& name);

struct EnvelopeConfig {
  double C = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool operator==(const EnvelopeConfig&) const = default;
};

/// Matrix source for the witness command.
/// kind: "gauss-gabor" (analysis lattice mu Z^d, synthesis lattice lambda Z^d,
/// Gaussian window), "power-wedge" (entries w(lambda|j'| - |j|) on the wedge),
/// "zero", or "table" (entry CSV file with a declared decay profile).
struct MatrixConfig {
  std::string kind = "gauss-gabor";
  int d = 2;
  double mu = 1.25;
  double lambda = 1.1;
  int radius = 150;     // gauss-gabor lattice radius
  double K0 = 1.0;
  EnvelopeConfig w{1.0, 3.0, 0.0};
  double r1 = 0.0;
  double r2 = 0.0;
  std::string file;
  bool operator==(const MatrixConfig&) const = default;
};

struct WitnessConfig {
  std::string construction = "kernel";  // kernel | dminus
  MatrixConfig matrix;
  double epsilon = 1e-3;
  double p1 = 2.0;
  double p2 = 2.0;
  double s1 = 0.0;
  double s2 = 0.0;
  bool include_vector = true;
  // dminus: Gaussian molecules over mu Z^2 truncated at `radius`, or gamma_file
  std::string gamma_file;
  bool operator==(const WitnessConfig&) const = default;
};

struct FrameConfig {
  double mu_analysis = 1.25;
  double mu_synthesis = 1.1;
  int radius = 0;  // 0: large enough for the largest size
  std::string gamma_file;
  std::string window_file;
  std::vector<int> sizes{6, 10, 14, 20};
  double margin = 6.0;
  bool operator==(const FrameConfig&) const = default;
};

struct DensityConfig {
  double mu = 1.25;
  double coverage = 40.0;  // lattice points kept in [-coverage, coverage]^2
  std::string gamma_file;
  int d = 1;
  std::vector<double> radii{5.0, 10.0, 20.0};
  double step = 0.0;
  bool doubled = false;
  bool operator==(const DensityConfig&) const = default;
};

struct IdentifyConfig {
  double a = 1.5;
  double lambda = 1.1;
  std::string g_kind = "gauss";  // gauss | mixture | file
  std::string g_file;
  int mixture_terms = 6;
  std::vector<int> sizes{4, 6, 8, 10};
  int nu_nodes = 128;
  int t_nodes = 128;
  double h = 1.0 / 64.0;
  double L = 16.0;
  bool record_timings = false;
  bool operator==(const IdentifyConfig&) const = default;
};

struct TailsumConfig {
  int d = 1;
  double p2 = 2.0;
  double q1 = 2.0;
  double r1 = 0.0;
  double r2 = 0.0;
  EnvelopeConfig w{1.0, 2.0, 0.0};
  std::vector<long> K1{5, 10, 20, 40};
  bool operator==(const TailsumConfig&) const = default;
};

struct ExperimentConfig {
  Command command = Command::Witness;
  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
  double kernel_tol = 1e-10;
  double cert_slack = 0.05;
  int quad_steps = 32;
  int threads = 0;
  std::uint64_t seed = 1;
  WitnessConfig witness;
  FrameConfig frame;
  DensityConfig density;
  IdentifyConfig identify;
  TailsumConfig tailsum;
  bool operator==(const ExperimentConfig&) const = default;

  /// Throws CONFIG on invalid values.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Builtin or table matrix described by a matrix config.
MatrixSpec build_matrix(const MatrixConfig& m, const ExperimentConfig& config);

/// 0 success, 1 usage or config, 2 certification failure, 3 numeric failure.
int exit_code_for(ErrorCode code);

/// Runs the configured command, writing results under out_dir and a
/// summary line to stdout. Library errors propagate.
int run(const ExperimentConfig& config);

int cmd_witness(const ExperimentConfig& config);
int cmd_frame(const ExperimentConfig& config);
int cmd_density(const ExperimentConfig& config);
int cmd_identify(const ExperimentConfig& config);
int cmd_tailsum(const ExperimentConfig& config);

}  // namespace wedgeframe::cli
