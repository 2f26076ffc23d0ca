#pragma once

// Command dispatch for the pileup tool. Every command writes one CSV table
// (to a file, or to the given stream when no path is set) with `# meta:`
// and result comment lines ahead of the header.

#include "pileup/boundary_layer.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pileup::cli {

enum class Command { minimize, boundary_layer, matched, scaling_table, verify };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerify = 4;

struct Tolerances {
  double newton = 1e-10;
};

struct RunConfig {
  Command command = Command::verify;
  int n = 128;
  std::string gamma_rule = "1/2";
  Tolerances tolerances;
  std::string output_path;  ///< empty: write to the output stream

  // scaling-table
  std::vector<std::string> rules{"1/4", "1/2", "3/4"};
  int nmin = 8;
  int nmax = 256;

  // boundary-layer
  boundary_layer::GridTargets grid;
  std::string affine_path;  ///< optional piecewise-linear profile
  int affine_points = 2001;

  /// Worker threads for scaling rows; 0 = hardware concurrency, capped by PILEUP_THREADS.
  unsigned threads = 0;
};

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& name);

/// "256" or "2^8". Throws DomainError for anything else or values < 1.
int parse_count(const std::string& text);

/// Thread count after applying the PILEUP_THREADS cap.
unsigned effective_threads(unsigned requested);

/// Runs one command. Diagnostics go to `err`; returns one of the kExit* codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and calls run().
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pileup::cli
