#include "gmlab/summarize.hpp"

#include "gmlab/graph_io.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace gmlab {

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
  if (rows.empty()) {
    throw ValidationError("summarize: no rows");
  }
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> values;
  std::map<std::string, std::size_t> index;
  for (const auto& row : rows) {
    std::string key = row.experiment + '|' + row.centering;
    for (const auto& [k, v] : row.params) key += '|' + k + '=' + format_number(v);
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      out.push_back({row.experiment, row.params, row.centering, 0.0, 0.0, 0});
      values.emplace_back();
    }
    values[it->second].push_back(row.accuracy);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& xs = values[g];
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    out[g].mean = mean;
    out[g].sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    out[g].count = xs.size();
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  std::string current_header;
  for (const auto& row : summary) {
    std::string header = "experiment";
    for (const auto& [key, value] : row.params) header += "," + key;
    header += ",centering,mean,sd,count";
    if (header != current_header) {
      out << header << '\n';
      current_header = header;
    }
    out << row.experiment;
    for (const auto& [key, value] : row.params) out << ',' << format_number(value);
    out << ',' << row.centering << ',' << format_number(row.mean) << ',' << format_number(row.sd) << ','
        << row.count << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& summary) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  write_summary_csv(out, summary);
}

}  // namespace gmlab
