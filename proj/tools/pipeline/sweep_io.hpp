#pragma once

#include <filesystem>
#include <vector>

#include "ltc/evaluation.hpp"
#include "ltc/sweep.hpp"

namespace ltc::cli {

struct SweepArtifact {
  std::vector<EvalReport> reports;
  std::vector<VariableRanking> rankings;  // one per (product, criterion)
};

void write_sweep(const SweepArtifact& sweep, const std::filesystem::path& path);
SweepArtifact read_sweep(const std::filesystem::path& path);

}  // namespace ltc::cli
