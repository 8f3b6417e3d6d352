#pragma once

#include "gmlab/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gmlab {

struct SummaryRow {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::string centering;
  double mean = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 when count == 1.
  double sd = 0.0;
  std::size_t count = 0;
};

/// Accuracy grouped by (experiment, parameters, centering), in order of
/// first appearance. Throws ValidationError on empty input.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& summary);

}  // namespace gmlab
