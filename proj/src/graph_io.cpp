#include "gmlab/graph_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

namespace gmlab {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Matrix parse_graph(std::istream& in, bool weighted, std::optional<std::size_t> n_hint) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  std::size_t n = n_hint.value_or(0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      // "# n <count>" header written by save_graph.
      std::istringstream header(line.substr(hash + 1));
      std::string key;
      std::size_t count = 0;
      if (header >> key >> count && key == "n") n = std::max(n, count);
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw ParseError(where + ": expected 'u v' or 'u v w'");
    }
    auto parse_id = [&](const std::string& tok) {
      std::size_t pos = 0;
      long long value = 0;
      try {
        value = std::stoll(tok, &pos);
      } catch (const std::exception&) {
        throw ParseError(where + ": bad vertex id '" + tok + "'");
      }
      if (pos != tok.size() || value < 0) throw ParseError(where + ": bad vertex id '" + tok + "'");
      return static_cast<std::size_t>(value);
    };
    const std::size_t u = parse_id(tokens[0]);
    const std::size_t v = parse_id(tokens[1]);
    double w = 1.0;
    if (tokens.size() == 3) {
      std::size_t pos = 0;
      try {
        w = std::stod(tokens[2], &pos);
      } catch (const std::exception&) {
        throw ParseError(where + ": bad weight '" + tokens[2] + "'");
      }
      if (pos != tokens[2].size() || !std::isfinite(w)) throw ParseError(where + ": bad weight '" + tokens[2] + "'");
    }
    if (u == v) {
      throw ValidationError(where + ": self-loop at vertex " + std::to_string(u));
    }
    n = std::max({n, u + 1, v + 1});
    edges.emplace_back(u, v, w);
  }
  const auto m = static_cast<Eigen::Index>(n);
  Matrix g = Matrix::Zero(m, m);
  for (const auto& [u, v, w] : edges) {
    const auto iu = static_cast<Eigen::Index>(u);
    const auto iv = static_cast<Eigen::Index>(v);
    if (weighted) {
      g(iu, iv) += w;
      g(iv, iu) = g(iu, iv);
    } else {
      g(iu, iv) = g(iv, iu) = 1.0;
    }
  }
  return g;
}

Matrix load_graph(const std::filesystem::path& path, bool weighted, std::optional<std::size_t> n_hint) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open graph file " + path.string());
  }
  return parse_graph(in, weighted, n_hint);
}

void save_graph(const std::filesystem::path& path, const Matrix& m, bool weighted) {
  require_square(m, "save_graph");
  auto out = open_out(path);
  out << "# n " << m.rows() << '\n';
  for (Eigen::Index u = 0; u < m.rows(); ++u) {
    for (Eigen::Index v = u + 1; v < m.cols(); ++v) {
      if (m(u, v) == 0.0) continue;
      out << u << ' ' << v;
      if (weighted) out << ' ' << format_number(m(u, v));
      out << '\n';
    }
  }
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_number(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace gmlab
