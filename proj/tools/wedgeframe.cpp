#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wedgeframe/cli.hpp"

namespace wf = wedgeframe;

static const char* kFooter = R"(Outputs (under --out, CSV or JSON per io.format, plus a .dat for plotting):
  witness   witness.json
  frame     frame.csv     N,rows,cols,sigma_min
  density   density.csv   R,lower,upper
  identify  identify.csv  N,Ntilde,sigma_min,assembly_seconds,Ntilde_wide,wide_rows,wide_cols
  tailsum   tailsum.csv   K1,upper,lower
Exit codes: 0 success, 1 usage or config, 2 certification failure, 3 numeric failure.
Threads: --threads wins over WEDGEFRAME_THREADS; 0 means all cores.)";

int main(int argc, char** argv) {
  CLI::App app{"Wedge-decay witnesses and time-frequency diagnostics"};
  app.footer(kFooter);
  std::string command, config_path, out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "witness | frame | density | identify | tailsum")
      ->required()
      ->check(CLI::IsMember({"witness", "frame", "density", "identify", "tailsum"}));
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory (overrides io.out_dir)");
  app.add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "seed for random probes");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    wf::cli::ExperimentConfig config = wf::cli::load_config(config_path);
    config.command = wf::cli::parse_command(command);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (threads) {
      config.threads = *threads;
    } else if (const char* env = std::getenv("WEDGEFRAME_THREADS")) {
      try {
        config.threads = std::stoi(env);
      } catch (const std::exception&) {
        throw wf::Error(wf::ErrorCode::Config, "WEDGEFRAME_THREADS is not an integer");
      }
    }
    if (seed) config.seed = *seed;
    return wf::cli::run(config);
  } catch (const wf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wf::cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
