#pragma once

#include <ostream>

#include "tei/io.hpp"

namespace tei {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitAssertion = 2;

const std::vector<std::string>& command_names();

struct CommandOutput {
  int status = kExitOk;
  std::string summary;
  Json report;  // deterministic part; metadata is added when written
  std::vector<std::pair<std::string, std::string>> side_files;  // name, CSV content
};

// Runs the command without touching the filesystem beyond reading the instance.
CommandOutput execute(const RunConfig& cfg);

// execute() plus report and side-file writes into cfg.output_dir; never throws.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace tei
