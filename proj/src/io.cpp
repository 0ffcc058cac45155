#include "wlra/io.hpp"

#include "wlra/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <utility>

namespace wlra::io {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("invalid real '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  return v;
}

long long parse_count(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0)
    throw ParseError("invalid non-negative integer '" + std::string(tok) + "'", line);
  return v;
}

// Next non-blank line, or false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_ws(line).empty()) return true;
  }
  return false;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

DenseMatrix read_matrix(std::istream& in, MatrixFormat* format) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno)) throw ParseError("missing header", lineno + 1);
  const auto head = split_ws(line);

  if (head.size() == 4 && head[0] == "wlra-dense" && head[1] == "v1") {
    const long long rows = parse_count(head[2], lineno);
    const long long cols = parse_count(head[3], lineno);
    DenseMatrix m(rows, cols);
    for (long long i = 0; i < rows; ++i) {
      if (!next_line(in, line, lineno))
        throw ParseError("expected " + std::to_string(rows) + " rows, got " + std::to_string(i), lineno + 1);
      const auto toks = split_ws(line);
      if (static_cast<long long>(toks.size()) != cols)
        throw ParseError("expected " + std::to_string(cols) + " values, got " + std::to_string(toks.size()), lineno);
      for (long long j = 0; j < cols; ++j) m(i, j) = parse_real(toks[static_cast<std::size_t>(j)], lineno);
    }
    if (next_line(in, line, lineno)) throw ParseError("trailing data after last row", lineno);
    if (format) *format = MatrixFormat::Dense;
    return m;
  }

  if (head.size() == 5 && head[0] == "wlra-coo" && head[1] == "v1") {
    const long long rows = parse_count(head[2], lineno);
    const long long cols = parse_count(head[3], lineno);
    const long long nnz = parse_count(head[4], lineno);
    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    std::set<std::pair<long long, long long>> seen;
    for (long long e = 0; e < nnz; ++e) {
      if (!next_line(in, line, lineno))
        throw ParseError("expected " + std::to_string(nnz) + " entries, got " + std::to_string(e), lineno + 1);
      const auto toks = split_ws(line);
      if (toks.size() != 3) throw ParseError("entry must be '<i> <j> <value>'", lineno);
      const long long i = parse_count(toks[0], lineno);
      const long long j = parse_count(toks[1], lineno);
      if (i >= rows || j >= cols)
        throw ParseError("coordinate (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", lineno);
      if (!seen.emplace(i, j).second)
        throw ParseError("duplicate coordinate (" + std::to_string(i) + ", " + std::to_string(j) + ")", lineno);
      m(i, j) = parse_real(toks[2], lineno);
    }
    if (next_line(in, line, lineno)) throw ParseError("trailing data after last entry", lineno);
    if (format) *format = MatrixFormat::Coo;
    return m;
  }

  throw ParseError("unrecognized header '" + line + "'", lineno);
}

void write_dense(std::ostream& out, const DenseMatrix& m) {
  out << "wlra-dense v1 " << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_coo(std::ostream& out, const DenseMatrix& m) {
  const Index nnz = (m.array() != 0.0).count();
  out << "wlra-coo v1 " << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << format_real(m(i, j)) << '\n';
}

DenseMatrix load_matrix(const std::filesystem::path& path, MatrixFormat* format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return read_matrix(in, format);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_dense(out, m);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void save_matrix_coo(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_coo(out, m);
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

GroundTruth load_truth(const std::filesystem::path& dir) {
  DenseMatrix u = load_matrix(dir / "U.txt");
  DenseMatrix s = load_matrix(dir / "sigma.txt");
  DenseMatrix v = load_matrix(dir / "V.txt");
  if (s.cols() != 1) throw DimensionError("sigma.txt must be a k x 1 column");
  Vector sigma = s.col(0);
  return GroundTruth(OrthonormalFactor(std::move(u)), std::move(sigma), OrthonormalFactor(std::move(v)));
}

void save_truth(const std::filesystem::path& dir, const GroundTruth& truth) {
  save_matrix(dir / "U.txt", truth.u().matrix());
  save_matrix(dir / "sigma.txt", DenseMatrix(truth.sigma()));
  save_matrix(dir / "V.txt", truth.v().matrix());
}

void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace) {
  for (const auto& r : trace) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["weighted_residual"] = r.weighted_residual;
    j["kkt_residual"] = r.kkt_residual;
    j["clipped_rows_x"] = r.clipped_rows_x;
    j["clipped_rows_y"] = r.clipped_rows_y;
    if (r.dist_x) j["dist_x"] = *r.dist_x;
    if (r.dist_y) j["dist_y"] = *r.dist_y;
    out << j.dump() << '\n';
  }
}

std::vector<IterationRecord> read_trace(std::istream& in) {
  std::vector<IterationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(in, line, lineno)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      IterationRecord r;
      r.t = j.at("t").get<int>();
      r.weighted_residual = j.at("weighted_residual").get<double>();
      r.kkt_residual = j.at("kkt_residual").get<double>();
      r.clipped_rows_x = j.at("clipped_rows_x").get<Index>();
      r.clipped_rows_y = j.at("clipped_rows_y").get<Index>();
      if (j.contains("dist_x")) r.dist_x = j["dist_x"].get<double>();
      if (j.contains("dist_y")) r.dist_y = j["dist_y"].get<double>();
      const int expected = out.empty() ? 1 : out.back().t + 1;
      if (r.t != expected) throw ParseError("trace t must increase by one from 1", lineno);
      out.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed trace record: ") + e.what(), lineno);
    }
  }
  return out;
}

GapSweep best_scaled_gap(const DenseMatrix& w, int scale_exp_min, int scale_exp_max) {
  if (scale_exp_min > scale_exp_max) throw ValidationError("best_scaled_gap: empty exponent range");
  const DenseMatrix ones = all_ones(w.rows(), w.cols());
  GapSweep best;
  bool first = true;
  for (int e = scale_exp_min; e <= scale_exp_max; ++e) {
    const double s = std::ldexp(1.0, e);
    const double gap = spectral_norm(s * w - ones);
    if (first || gap < best.best_gap) {
      best = {gap, s, e};
      first = false;
    }
  }
  return best;
}

DenseMatrix apply_weight_transform(const DenseMatrix& w, WeightTransform kind, double value) {
  if (!std::isfinite(value)) throw ValidationError("weight transform: value must be finite");
  return kind == WeightTransform::Floor ? DenseMatrix(w.cwiseMax(value)) : DenseMatrix(w.cwiseMin(value));
}

}  // namespace wlra::io
