#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "analogcast/field.hpp"

namespace analogcast {

enum class BasisKind { kEof, kMeof, kCca };

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

/// Rows [first_row, first_row + rows) of a stacked basis come from field
/// `source`, which was divided by `scale` before decomposition.
struct BasisSegment {
  std::string source;
  Eigen::Index first_row = 0;
  Eigen::Index rows = 0;
  double scale = 1.0;

  friend bool operator==(const BasisSegment&, const BasisSegment&) = default;
};

/// Spatial basis matrix (locations x p) with provenance.
class BasisSet {
 public:
  BasisSet() = default;
  BasisSet(Eigen::MatrixXd matrix, BasisKind kind, std::vector<Coord> coords,
           std::vector<double> explained_variance = {}, std::vector<BasisSegment> segments = {});

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  BasisKind kind() const { return kind_; }
  const std::vector<Coord>& coords() const { return coords_; }
  const std::vector<double>& explained_variance() const { return explained_variance_; }
  const std::vector<BasisSegment>& segments() const { return segments_; }
  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index size() const { return matrix_.cols(); }

  /// CCA only: canonical correlations, nonincreasing.
  std::vector<double> canonical_correlations;
  /// Warnings raised while computing the basis (rank deficiency, ridge).
  std::vector<std::string> notes;

  /// The rows belonging to `source`, rescaled to physical units so that
  /// field ~ block * coefficients.
  BasisSet block(std::string_view source) const;

 private:
  Eigen::MatrixXd matrix_;
  BasisKind kind_ = BasisKind::kEof;
  std::vector<Coord> coords_;
  std::vector<double> explained_variance_;
  std::vector<BasisSegment> segments_;
};

/// Coefficients (p x n_time) of a field in a basis.
struct CoefficientSeries {
  Eigen::MatrixXd coeffs;
  std::shared_ptr<const BasisSet> basis;
  std::vector<TimeStamp> times;

  Eigen::Index p() const { return coeffs.rows(); }
  Eigen::Index n_time() const { return coeffs.cols(); }
};

/// Leading p left singular vectors of the anomaly matrix. Each column's
/// largest-magnitude entry is made positive.
BasisSet compute_eof(const FieldSeries& field, int p);

/// EOFs of the two fields stacked over locations, each divided by its
/// all-cell standard deviation. Segments "forcing" then "response".
BasisSet compute_meof(const FieldSeries& forcing, const FieldSeries& response, int p);

struct CcaResult {
  Eigen::MatrixXd forcing_weights;   // p_x x k
  Eigen::MatrixXd response_weights;  // p_y x k
  std::vector<double> correlations;  // nonincreasing
  bool ridge_applied = false;
};

/// Canonical correlation analysis between paired samples (columns).
CcaResult canonical_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct CcaBases {
  BasisSet forcing;
  BasisSet response;
};

/// Reduced-rank CCA: each field is first reduced to its own p_pre EOFs,
/// then the lagged pairs (x_{t-lag}, y_t) are correlated. Bases are
/// EOF matrix times canonical weights, truncated to p columns.
CcaBases compute_cca(const FieldSeries& forcing, const FieldSeries& response, int lag, int p_pre,
                     int p);

/// Least-squares coefficients (Phi'Phi)^{-1} Phi' Y via column-pivoted QR.
CoefficientSeries project(const FieldSeries& field, std::shared_ptr<const BasisSet> basis);

/// Phi * coefficients on the basis locations.
FieldSeries reconstruct(const CoefficientSeries& coeffs);

/// Wide CSV "lon,lat,b1..bp" plus `<path>.meta.json` sidecar.
void save_basis(const std::filesystem::path& path, const BasisSet& basis);
BasisSet load_basis(const std::filesystem::path& path);

}  // namespace analogcast
