#include "analogcast/metric.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace analogcast {

namespace {

void require_same_shape(const MatrixRef& a, const MatrixRef& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DataError("shape mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

Eigen::MatrixXd centred(const MatrixRef& m) { return m.rowwise() - m.colwise().mean(); }

bool degenerate(double centred_norm, double raw_norm) {
  return !(centred_norm > 1e-14 * raw_norm) || centred_norm == 0.0;
}

}  // namespace

double euclidean_distance(const MatrixRef& a, const MatrixRef& b) {
  require_same_shape(a, b);
  return (a - b).norm();
}

ProcrustesFit procrustes_fit(const MatrixRef& target, const MatrixRef& comparison, ScaleNorm norm) {
  require_same_shape(target, comparison);
  const Eigen::MatrixXd t = centred(target);
  const Eigen::MatrixXd c = centred(comparison);
  const double c_norm = c.norm();
  if (degenerate(c_norm, comparison.norm())) throw DegenerateComparison();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.transpose() * t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesFit fit;
  fit.rotation = svd.matrixU() * svd.matrixV().transpose();
  const double trace = svd.singularValues().sum();
  const double denom = norm == ScaleNorm::kCentered ? c_norm * c_norm : comparison.squaredNorm();
  fit.scale = trace / denom;
  fit.distance = (t - fit.scale * c * fit.rotation).norm();
  fit.normalized = fit.distance / c_norm;
  return fit;
}

double procrustes_distance(const MatrixRef& target, const MatrixRef& comparison, ScaleNorm norm) {
  require_same_shape(target, comparison);
  const Eigen::MatrixXd t = centred(target);
  const Eigen::MatrixXd c = centred(comparison);
  const double c_sq = c.squaredNorm();
  if (degenerate(std::sqrt(c_sq), comparison.norm())) return std::numeric_limits<double>::infinity();

  // ||T~ - s C~ R||^2 = ||T~||^2 - 2 s tr(D) + s^2 ||C~||^2 at the optimal R.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.transpose() * t);
  const double trace = svd.singularValues().sum();
  const double scale = trace / (norm == ScaleNorm::kCentered ? c_sq : comparison.squaredNorm());
  const double t_sq = t.squaredNorm();
  const double d_sq = t_sq - 2.0 * scale * trace + scale * scale * c_sq;
  // The closed form cancels badly near a perfect fit; recompute directly there.
  if (d_sq < 1e-6 * t_sq) return procrustes_fit(target, comparison, norm).normalized;
  return std::sqrt(d_sq / c_sq);
}

double combined_distance(double forcing_distance, double response_distance, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  return gamma * forcing_distance + (1.0 - gamma) * response_distance;
}

}  // namespace analogcast
