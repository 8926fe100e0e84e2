#include "analogcast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "analogcast/error.hpp"
#include "text.hpp"

namespace analogcast {

namespace {

void check_aligned(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p) {
  if (a.rows() != p.rows() || a.cols() != p.cols())
    throw DataError("forecasts (" + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) +
                    ") are not aligned with actuals (" + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ")");
  if (a.size() == 0) throw DataError("no hold-out values to score");
}

}  // namespace

double mse(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& predictions) {
  check_aligned(actuals, predictions);
  return (actuals - predictions).squaredNorm() / static_cast<double>(actuals.size());
}

double anomaly_correlation(const Eigen::MatrixXd& actuals, const Eigen::MatrixXd& predictions,
                           AcForm form) {
  check_aligned(actuals, predictions);
  const double cross = (actuals.array() * predictions.array()).sum();
  const double yy = actuals.squaredNorm();
  const double pp = predictions.squaredNorm();
  if (!(yy > 0.0) || !(pp > 0.0)) throw NumericError("anomaly correlation of an all-zero field");
  if (form == AcForm::kPrinted) return cross / (pp * yy);
  return std::clamp(cross / (std::sqrt(pp) * std::sqrt(yy)), -1.0, 1.0);
}

const ScoreRow& ScoreCard::at(int region, const std::string& model, int lead) const {
  for (const auto& r : rows)
    if (r.region == region && r.model == model && r.lead == lead) return r;
  throw DataError("scorecard has no entry for region " + std::to_string(region) + ", model " +
                  model + ", lead " + std::to_string(lead));
}

namespace {

void flag_bests(std::vector<ScoreRow>& rows) {
  std::map<std::pair<int, int>, std::pair<double, double>> best;
  for (const auto& r : rows) {
    auto [it, fresh] = best.try_emplace({r.region, r.lead}, r.mse, r.ac);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r.mse);
      it->second.second = std::max(it->second.second, r.ac);
    }
  }
  for (auto& r : rows) {
    const auto& b = best.at({r.region, r.lead});
    r.best_mse = r.mse == b.first;
    r.best_ac = r.ac == b.second;
  }
}

void sort_rows(std::vector<ScoreRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    return std::tie(a.region, a.lead, a.model) < std::tie(b.region, b.lead, b.model);
  });
}

}  // namespace

ScoreCard scorecard(std::span<const ModelForecasts> forecasts,
                    std::span<const std::string> required_models, AcForm form) {
  ScoreCard card;
  std::set<std::tuple<int, int, std::string>> seen;
  std::set<std::pair<int, int>> cells;
  for (const auto& f : forecasts) {
    if (!seen.emplace(f.region, f.lead, f.model).second)
      throw DataError("duplicate forecasts for region " + std::to_string(f.region) + ", model " +
                      f.model + ", lead " + std::to_string(f.lead));
    cells.emplace(f.region, f.lead);
    ScoreRow row;
    row.region = f.region;
    row.model = f.model;
    row.lead = f.lead;
    row.mse = mse(f.actuals, f.predictions);
    row.ac = anomaly_correlation(f.actuals, f.predictions, form);
    row.n = static_cast<int>(f.actuals.cols());
    card.rows.push_back(std::move(row));
  }
  for (const auto& [region, lead] : cells)
    for (const auto& m : required_models)
      if (!seen.count({region, lead, m}))
        throw ConfigError("missing output of model " + m + " for region " + std::to_string(region) +
                          ", lead " + std::to_string(lead));
  sort_rows(card.rows);
  flag_bests(card.rows);
  return card;
}

void save_scorecard(const std::filesystem::path& path, const ScoreCard& card) {
  auto out = text::open_output(path);
  out << "region,model,lead,mse,ac,is_best_mse,is_best_ac\n";
  for (const auto& r : card.rows)
    out << r.region << ',' << r.model << ',' << r.lead << ',' << text::format_double(r.mse) << ','
        << text::format_double(r.ac) << ',' << (r.best_mse ? 1 : 0) << ',' << (r.best_ac ? 1 : 0)
        << '\n';
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

ScoreCard load_scorecard(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "region,model,lead,mse,ac,is_best_mse,is_best_ac")
    throw DataError(path.string() + ":1: expected scorecard header");
  ScoreCard card;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto c = text::split(line);
    long long region = 0, lead = 0, bm = 0, ba = 0;
    ScoreRow r;
    if (c.size() != 7 || !text::parse_int(c[0], region) || !text::parse_int(c[2], lead) ||
        !text::parse_double(c[3], r.mse) || !text::parse_double(c[4], r.ac) ||
        !text::parse_int(c[5], bm) || !text::parse_int(c[6], ba))
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed scorecard row");
    r.region = static_cast<int>(region);
    r.model = c[1];
    r.lead = static_cast<int>(lead);
    r.best_mse = bm != 0;
    r.best_ac = ba != 0;
    card.rows.push_back(std::move(r));
  }
  return card;
}

}  // namespace analogcast
