#include "analogcast/basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "analogcast/error.hpp"
#include "text.hpp"

namespace analogcast {

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::kEof:
      return "EOF";
    case BasisKind::kMeof:
      return "MEOF";
    case BasisKind::kCca:
      return "CCA";
  }
  return "?";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "EOF" || name == "eof") return BasisKind::kEof;
  if (name == "MEOF" || name == "meof") return BasisKind::kMeof;
  if (name == "CCA" || name == "cca") return BasisKind::kCca;
  throw ConfigError("unknown basis kind '" + std::string(name) + "' (EOF | MEOF | CCA)");
}

BasisSet::BasisSet(Eigen::MatrixXd matrix, BasisKind kind, std::vector<Coord> coords,
                   std::vector<double> explained_variance, std::vector<BasisSegment> segments)
    : matrix_(std::move(matrix)),
      kind_(kind),
      coords_(std::move(coords)),
      explained_variance_(std::move(explained_variance)),
      segments_(std::move(segments)) {
  if (static_cast<Eigen::Index>(coords_.size()) != matrix_.rows())
    throw DataError("basis has " + std::to_string(matrix_.rows()) + " rows but " +
                    std::to_string(coords_.size()) + " coordinates");
  if (!matrix_.allFinite()) throw NumericError("basis contains non-finite entries");
  if (!explained_variance_.empty()) {
    if (static_cast<Eigen::Index>(explained_variance_.size()) != matrix_.cols())
      throw DataError("explained variance length does not match basis size");
    for (std::size_t j = 0; j < explained_variance_.size(); ++j) {
      if (explained_variance_[j] < 0.0) throw DataError("negative explained variance");
      if (j > 0 && explained_variance_[j] > explained_variance_[j - 1])
        throw DataError("explained variance must be nonincreasing");
    }
  }
  for (const auto& s : segments_)
    if (s.first_row < 0 || s.rows < 0 || s.first_row + s.rows > matrix_.rows() || !(s.scale > 0.0))
      throw DataError("invalid basis segment '" + s.source + "'");
}

BasisSet BasisSet::block(std::string_view source) const {
  for (const auto& s : segments_) {
    if (s.source != source) continue;
    std::vector<Coord> c(coords_.begin() + s.first_row, coords_.begin() + s.first_row + s.rows);
    BasisSet out(s.scale * matrix_.middleRows(s.first_row, s.rows), kind_, std::move(c),
                 explained_variance_);
    out.canonical_correlations = canonical_correlations;
    out.notes = notes;
    return out;
  }
  throw DataError("basis has no segment named '" + std::string(source) + "'");
}

namespace {

// Largest-magnitude entry of each column made positive (first index wins ties).
void fix_signs(Eigen::MatrixXd& m, Eigen::MatrixXd* partner = nullptr) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0.0) {
      m.col(j) *= -1.0;
      if (partner) partner->col(j) *= -1.0;
    }
  }
}

struct Decomposition {
  Eigen::MatrixXd vectors;
  std::vector<double> explained;
  std::vector<std::string> notes;
};

Decomposition leading_singular_vectors(const Eigen::MatrixXd& data, int p) {
  if (p < 1) throw ConfigError("basis size must be positive");
  if (p > std::min(data.rows(), data.cols()))
    throw ConfigError("basis size " + std::to_string(p) + " exceeds min(n_loc, n_time) = " +
                      std::to_string(std::min(data.rows(), data.cols())));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.squaredNorm();
  if (!(total > 0.0)) throw NumericError("cannot compute a basis for an all-zero field");
  Decomposition out;
  out.vectors = svd.matrixU().leftCols(p);
  fix_signs(out.vectors);
  for (int j = 0; j < p; ++j) out.explained.push_back(s(j) * s(j) / total);
  if (s(p - 1) < 1e-12 * s(0))
    out.notes.push_back("rank deficient: singular value " + std::to_string(p) + " is " +
                        text::format_double(s(p - 1)) + " (< 1e-12 x leading)");
  return out;
}

double cell_sd(const Eigen::MatrixXd& m) {
  const double mean = m.mean();
  return std::sqrt((m.array() - mean).square().mean());
}

}  // namespace

BasisSet compute_eof(const FieldSeries& field, int p) {
  auto d = leading_singular_vectors(field.values(), p);
  BasisSet out(std::move(d.vectors), BasisKind::kEof, field.coords(), std::move(d.explained));
  out.notes = std::move(d.notes);
  return out;
}

BasisSet compute_meof(const FieldSeries& forcing, const FieldSeries& response, int p) {
  if (forcing.times() != response.times())
    throw DataError("multivariate EOF needs forcing and response on the same time axis");
  const double sx = cell_sd(forcing.values());
  const double sy = cell_sd(response.values());
  if (!(sx > 0.0) || !(sy > 0.0)) throw NumericError("cannot standardise a constant field");
  Eigen::MatrixXd stacked(forcing.n_loc() + response.n_loc(), forcing.n_time());
  stacked.topRows(forcing.n_loc()) = forcing.values() / sx;
  stacked.bottomRows(response.n_loc()) = response.values() / sy;
  auto d = leading_singular_vectors(stacked, p);
  std::vector<Coord> coords = forcing.coords();
  coords.insert(coords.end(), response.coords().begin(), response.coords().end());
  std::vector<BasisSegment> segments{{"forcing", 0, forcing.n_loc(), sx},
                                     {"response", forcing.n_loc(), response.n_loc(), sy}};
  BasisSet out(std::move(d.vectors), BasisKind::kMeof, std::move(coords), std::move(d.explained),
               std::move(segments));
  out.notes = std::move(d.notes);
  return out;
}

namespace {

struct Whitener {
  Eigen::MatrixXd inv_sqrt;
  bool ridge = false;
};

Whitener whiten(Eigen::MatrixXd cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double max_eig = eig.eigenvalues().maxCoeff();
  if (!(max_eig > 0.0)) throw NumericError("within-set covariance is zero");
  Whitener w;
  if (eig.eigenvalues().minCoeff() < 1e-12 * max_eig) {
    cov.diagonal().array() += 1e-8 * cov.diagonal().mean();
    eig.compute(cov);
    w.ridge = true;
  }
  w.inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
               eig.eigenvectors().transpose();
  return w;
}

}  // namespace

CcaResult canonical_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols()) throw DataError("CCA needs paired samples");
  const Eigen::Index n = x.cols();
  if (n < std::max(x.rows(), y.rows()) + 2)
    throw DataError("CCA needs more paired samples (" + std::to_string(n) + ") than dimensions");
  const Eigen::MatrixXd xc = x.colwise() - x.rowwise().mean();
  const Eigen::MatrixXd yc = y.colwise() - y.rowwise().mean();
  const double denom = static_cast<double>(n - 1);
  const auto wx = whiten(xc * xc.transpose() / denom);
  const auto wy = whiten(yc * yc.transpose() / denom);
  const Eigen::MatrixXd cross = wx.inv_sqrt * (xc * yc.transpose() / denom) * wy.inv_sqrt;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index k = std::min(x.rows(), y.rows());
  CcaResult out;
  out.forcing_weights = wx.inv_sqrt * svd.matrixU().leftCols(k);
  out.response_weights = wy.inv_sqrt * svd.matrixV().leftCols(k);
  fix_signs(out.forcing_weights, &out.response_weights);
  for (Eigen::Index j = 0; j < k; ++j)
    out.correlations.push_back(std::min(1.0, svd.singularValues()(j)));
  out.ridge_applied = wx.ridge || wy.ridge;
  return out;
}

CcaBases compute_cca(const FieldSeries& forcing, const FieldSeries& response, int lag, int p_pre,
                     int p) {
  if (lag < 0) throw ConfigError("CCA lag must be nonnegative");
  if (p < 1 || p > p_pre) throw ConfigError("CCA needs 1 <= p <= p_pre");
  if (forcing.times() != response.times())
    throw DataError("CCA needs forcing and response on the same time axis");
  const Eigen::Index pairs = forcing.n_time() - lag;
  if (pairs < p_pre + 2)
    throw DataError("CCA has only " + std::to_string(std::max<Eigen::Index>(pairs, 0)) +
                    " lagged pairs for " + std::to_string(p_pre) + " pre-reduction modes");
  const BasisSet ex = compute_eof(forcing, p_pre);
  const BasisSet ey = compute_eof(response, p_pre);
  const Eigen::MatrixXd ax = ex.matrix().transpose() * forcing.values();
  const Eigen::MatrixXd ay = ey.matrix().transpose() * response.values();
  const auto cca = canonical_correlation(ax.leftCols(pairs), ay.rightCols(pairs));

  BasisSet bx(ex.matrix() * cca.forcing_weights.leftCols(p), BasisKind::kCca, forcing.coords());
  BasisSet by(ey.matrix() * cca.response_weights.leftCols(p), BasisKind::kCca, response.coords());
  for (BasisSet* b : {&bx, &by}) {
    b->canonical_correlations.assign(cca.correlations.begin(), cca.correlations.begin() + p);
    b->notes = ex.notes;
    b->notes.insert(b->notes.end(), ey.notes.begin(), ey.notes.end());
    if (cca.ridge_applied)
      b->notes.push_back("singular within-set covariance: ridge 1e-8 applied");
  }
  return {std::move(bx), std::move(by)};
}

CoefficientSeries project(const FieldSeries& field, std::shared_ptr<const BasisSet> basis) {
  if (!basis) throw DataError("no basis supplied");
  if (basis->rows() != field.n_loc() || basis->coords() != field.coords())
    throw DataError("basis rows do not match field locations");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis->matrix());
  if (qr.rank() < basis->size())
    throw NumericError("basis Gram matrix is numerically singular (rank " +
                       std::to_string(qr.rank()) + " < " + std::to_string(basis->size()) + ")");
  return {qr.solve(field.values()), std::move(basis), field.times()};
}

FieldSeries reconstruct(const CoefficientSeries& coeffs) {
  if (!coeffs.basis) throw DataError("coefficient series has no basis");
  return FieldSeries(coeffs.basis->matrix() * coeffs.coeffs, coeffs.basis->coords(), coeffs.times);
}

void save_basis(const std::filesystem::path& path, const BasisSet& basis) {
  {
    auto out = text::open_output(path);
    out << "lon,lat";
    for (Eigen::Index j = 0; j < basis.size(); ++j) out << ",b" << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      const auto& c = basis.coords()[static_cast<std::size_t>(i)];
      out << text::format_double(c.lon) << ',' << text::format_double(c.lat);
      for (Eigen::Index j = 0; j < basis.size(); ++j)
        out << ',' << text::format_double(basis.matrix()(i, j));
      out << '\n';
    }
  }
  nlohmann::json meta;
  meta["kind"] = std::string(to_string(basis.kind()));
  meta["explained_variance"] = basis.explained_variance();
  meta["canonical_correlations"] = basis.canonical_correlations;
  meta["notes"] = basis.notes;
  meta["source_rows"] = nlohmann::json::array();
  for (const auto& s : basis.segments())
    meta["source_rows"].push_back(
        {{"source", s.source}, {"first_row", s.first_row}, {"rows", s.rows}, {"scale", s.scale}});
  auto out = text::open_output(path.string() + ".meta.json");
  out << meta.dump(2) << '\n';
}

BasisSet load_basis(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty basis file");
  const auto header = text::split(line);
  if (header.size() < 3 || header[0] != "lon" || header[1] != "lat")
    throw DataError(path.string() + ":1: expected header 'lon,lat,b1..bp'");
  const auto p = static_cast<Eigen::Index>(header.size() - 2);
  std::vector<Coord> coords;
  std::vector<double> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto row = text::split(line);
    if (row.size() != header.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    std::vector<double> v(row.size());
    for (std::size_t k = 0; k < row.size(); ++k)
      if (!text::parse_double(row[k], v[k]) || !std::isfinite(v[k]))
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": column " +
                        std::to_string(k + 1) + ": cannot parse '" + row[k] + "'");
    coords.push_back({v[0], v[1]});
    cells.insert(cells.end(), v.begin() + 2, v.end());
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(coords.size()), p);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = cells[static_cast<std::size_t>(i * p + j)];

  std::ifstream meta_in(path.string() + ".meta.json");
  if (!meta_in) throw DataError(path.string() + ": missing metadata sidecar");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ".meta.json: " + e.what());
  }
  std::vector<BasisSegment> segments;
  for (const auto& s : meta.value("source_rows", nlohmann::json::array()))
    segments.push_back({s.at("source").get<std::string>(), s.at("first_row").get<Eigen::Index>(),
                        s.at("rows").get<Eigen::Index>(), s.at("scale").get<double>()});
  BasisSet out(std::move(m), parse_basis_kind(meta.at("kind").get<std::string>()),
               std::move(coords), meta.value("explained_variance", std::vector<double>{}),
               std::move(segments));
  out.canonical_correlations = meta.value("canonical_correlations", std::vector<double>{});
  out.notes = meta.value("notes", std::vector<std::string>{});
  return out;
}

}  // namespace analogcast
