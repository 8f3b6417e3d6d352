#pragma once

#include "gmlab/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace gmlab {

/// Reads an undirected edge list: one "u v" or "u v w" per line, 0-based
/// ids, '#' comments and blank lines ignored. Unweighted duplicates are
/// idempotent; weighted duplicates accumulate. The vertex count is
/// max(n_hint, largest id + 1). Self-loops raise ValidationError; bad lines
/// raise ParseError naming the line number.
Matrix load_graph(const std::filesystem::path& path, bool weighted, std::optional<std::size_t> n_hint = std::nullopt);
Matrix parse_graph(std::istream& in, bool weighted, std::optional<std::size_t> n_hint = std::nullopt);

/// Writes the upper triangle as an edge list ("u v" or "u v w"). A leading
/// "# n <count>" comment keeps isolated trailing vertices.
void save_graph(const std::filesystem::path& path, const Matrix& m, bool weighted);

/// Full matrix as comma-separated rows, 10 significant digits.
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// printf("%.10g") formatting used by every CSV writer.
std::string format_number(double x);

}  // namespace gmlab
