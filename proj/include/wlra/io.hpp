#pragma once

// Text matrix formats, trace emission and the weight-scaling sweep.
//
// Dense:  "wlra-dense v1 <rows> <cols>" then <rows> lines of <cols> reals (17 significant
//         digits, so doubles round-trip exactly).
// Sparse: "wlra-coo v1 <rows> <cols> <nnz>" then nnz lines "<i> <j> <value>", 0-based,
//         no duplicate coordinates.

#include "wlra/matcore.hpp"
#include "wlra/problem.hpp"
#include "wlra/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wlra::io {

enum class MatrixFormat { Dense, Coo };

DenseMatrix read_matrix(std::istream& in, MatrixFormat* format = nullptr);
void write_dense(std::ostream& out, const DenseMatrix& m);
void write_coo(std::ostream& out, const DenseMatrix& m);

/// Accepts either format; `format` receives the one found.
DenseMatrix load_matrix(const std::filesystem::path& path, MatrixFormat* format = nullptr);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);
void save_matrix_coo(const std::filesystem::path& path, const DenseMatrix& m);

/// U.txt, sigma.txt (k x 1) and V.txt inside a directory.
GroundTruth load_truth(const std::filesystem::path& dir);
void save_truth(const std::filesystem::path& dir, const GroundTruth& truth);

/// One JSON object per line with keys t, weighted_residual, kkt_residual, clipped_rows_x,
/// clipped_rows_y and, when known, dist_x, dist_y.
void write_trace(std::ostream& out, const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> read_trace(std::istream& in);

struct GapSweep {
  double best_gap = 0.0;    // min_s ||s W - E||_2
  double best_scale = 1.0;  // the achieving s = 2^e
  int best_exponent = 0;
};

/// Sweeps s = 2^e for integer e in [scale_exp_min, scale_exp_max]. Ties keep the smallest e.
GapSweep best_scaled_gap(const DenseMatrix& w, int scale_exp_min = -20, int scale_exp_max = 10);

/// Entrywise weight transforms applied on ingestion: Floor computes max(w, value),
/// Cap computes min(w, value).
enum class WeightTransform { Floor, Cap };
DenseMatrix apply_weight_transform(const DenseMatrix& w, WeightTransform kind, double value);

std::string format_real(double x);

}  // namespace wlra::io
