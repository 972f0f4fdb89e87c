#pragma once

#include <ostream>
#include <string>

namespace davg::cli {

struct CliOptions {
  int threads = 0;          // 0 = available parallelism
  bool paper_scale = false; // restore the full-size experiment defaults
  std::string out_dir;      // prefix for relative output paths
};

// Exit codes: 0 success, 1 config validation failure, 2 runtime failure.
int cmd_run(const std::string& config_path, const CliOptions& options,
            std::ostream& out, std::ostream& err);
int cmd_spectrum(const std::string& config_path, const CliOptions& options,
                 std::ostream& out, std::ostream& err);
int cmd_bound(const std::string& config_path, const CliOptions& options,
              std::ostream& out, std::ostream& err);

}  // namespace davg::cli
