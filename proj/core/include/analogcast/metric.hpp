#pragma once

#include <Eigen/Dense>

#include "analogcast/error.hpp"

namespace analogcast {

using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Frobenius norm of a - b.
double euclidean_distance(const MatrixRef& a, const MatrixRef& b);

/// Norm used in the optimal-scale denominator.
enum class ScaleNorm {
  kCentered,    // ||C~||^2: exact least-squares scale
  kUncentered,  // ||C||^2
};

/// Result of matching a comparison matrix to a target by column centring,
/// an orthogonal right rotation and a positive scale.
struct ProcrustesFit {
  Eigen::MatrixXd rotation;  // q x q, orthogonal (reflections allowed)
  double scale = 0.0;
  double distance = 0.0;     // ||T~ - scale * C~ * rotation||_F
  double normalized = 0.0;   // distance / ||C~||_F
};

/// Thrown when the comparison has zero centred norm.
class DegenerateComparison : public NumericError {
 public:
  DegenerateComparison() : NumericError("Procrustes comparison has zero centred norm") {}
};

/// The comparison is transformed onto the target; not symmetric in its
/// arguments.
ProcrustesFit procrustes_fit(const MatrixRef& target, const MatrixRef& comparison,
                             ScaleNorm norm = ScaleNorm::kCentered);

/// Normalized Procrustes distance only. Returns +infinity for a degenerate
/// comparison so callers can rank it last.
double procrustes_distance(const MatrixRef& target, const MatrixRef& comparison,
                           ScaleNorm norm = ScaleNorm::kCentered);

/// gamma * forcing + (1 - gamma) * response.
double combined_distance(double forcing_distance, double response_distance, double gamma);

}  // namespace analogcast
