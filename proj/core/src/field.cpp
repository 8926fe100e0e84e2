#include "analogcast/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "analogcast/error.hpp"
#include "text.hpp"

namespace analogcast {

namespace {

bool coord_less(const Coord& a, const Coord& b) {
  return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

TimeStamp parse_time_label(std::string_view label) {
  label = text::trim(label);
  long long value = 0;
  if (text::parse_int(label, value)) return {static_cast<int>(value), std::string(label)};
  const auto dash = label.find('-');
  long long year = 0;
  long long month = 0;
  if (dash != std::string_view::npos && dash > 0 &&
      text::parse_int(label.substr(0, dash), year) &&
      text::parse_int(label.substr(dash + 1), month) && month >= 1 && month <= 12) {
    return {static_cast<int>(year * 12 + month - 1), std::string(label)};
  }
  throw DataError("unrecognised time label '" + std::string(label) +
                  "' (expected integer or YYYY-MM)");
}

FieldSeries::FieldSeries(Eigen::MatrixXd values, std::vector<Coord> coords,
                         std::vector<TimeStamp> times, std::vector<int> region_ids) {
  if (static_cast<Eigen::Index>(coords.size()) != values.rows())
    throw DataError("field has " + std::to_string(values.rows()) + " rows but " +
                    std::to_string(coords.size()) + " coordinates");
  if (static_cast<Eigen::Index>(times.size()) != values.cols())
    throw DataError("field has " + std::to_string(values.cols()) + " columns but " +
                    std::to_string(times.size()) + " time stamps");
  if (!region_ids.empty() && region_ids.size() != coords.size())
    throw DataError("region labels do not match location count");
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!std::isfinite(values(i, j)))
        throw DataError("non-finite value at location " + std::to_string(i) + ", time '" +
                        times[j].label + "'");

  std::vector<Eigen::Index> row_order(coords.size());
  std::iota(row_order.begin(), row_order.end(), 0);
  std::stable_sort(row_order.begin(), row_order.end(),
                   [&](auto a, auto b) { return coord_less(coords[a], coords[b]); });
  std::vector<Eigen::Index> col_order(times.size());
  std::iota(col_order.begin(), col_order.end(), 0);
  std::stable_sort(col_order.begin(), col_order.end(),
                   [&](auto a, auto b) { return times[a].index < times[b].index; });

  for (std::size_t k = 1; k < row_order.size(); ++k)
    if (coords[row_order[k]] == coords[row_order[k - 1]])
      throw DataError("duplicate location (" + text::format_double(coords[row_order[k]].lon) +
                      ", " + text::format_double(coords[row_order[k]].lat) + ")");
  for (std::size_t k = 1; k < col_order.size(); ++k)
    if (times[col_order[k]].index == times[col_order[k - 1]].index)
      throw DataError("duplicate time index " + std::to_string(times[col_order[k]].index));

  values_.resize(values.rows(), values.cols());
  for (std::size_t c = 0; c < col_order.size(); ++c)
    for (std::size_t r = 0; r < row_order.size(); ++r)
      values_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values(row_order[r], col_order[c]);
  coords_.reserve(coords.size());
  for (auto r : row_order) coords_.push_back(coords[r]);
  times_.reserve(times.size());
  for (auto c : col_order) times_.push_back(std::move(times[c]));
  if (!region_ids.empty()) {
    region_ids_.reserve(region_ids.size());
    for (auto r : row_order) region_ids_.push_back(region_ids[r]);
  }
}

std::optional<Eigen::Index> FieldSeries::column_of(int t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t,
                                   [](const TimeStamp& s, int v) { return s.index < v; });
  if (it == times_.end() || it->index != t) return std::nullopt;
  return static_cast<Eigen::Index>(it - times_.begin());
}

bool FieldSeries::contiguous() const {
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (times_[k].index != times_[k - 1].index + 1) return false;
  return true;
}

FieldSeries FieldSeries::with_values(Eigen::MatrixXd values) const {
  return FieldSeries(std::move(values), coords_, times_, region_ids_);
}

FieldSeries FieldSeries::with_regions(std::vector<int> region_ids) const {
  return FieldSeries(values_, coords_, times_, std::move(region_ids));
}

FieldSeries FieldSeries::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), values_.cols());
  std::vector<Coord> c;
  std::vector<int> r;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    v.row(static_cast<Eigen::Index>(k)) = values_.row(rows[k]);
    c.push_back(coords_[rows[k]]);
    if (!region_ids_.empty()) r.push_back(region_ids_[rows[k]]);
  }
  return FieldSeries(std::move(v), std::move(c), times_, std::move(r));
}

FieldSeries FieldSeries::select_columns(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > n_time())
    throw DataError("column range out of bounds");
  std::vector<TimeStamp> t(times_.begin() + first, times_.begin() + first + count);
  return FieldSeries(values_.middleCols(first, count), coords_, std::move(t), region_ids_);
}

CsvLayout parse_layout(std::string_view name) {
  if (name == "long" || name == "long-csv") return CsvLayout::kLong;
  if (name == "wide" || name == "wide-csv") return CsvLayout::kWide;
  throw ConfigError("unknown field format '" + std::string(name) + "' (long-csv | wide-csv)");
}

namespace {

Coord parse_coord(const std::vector<std::string>& cells, const std::filesystem::path& path,
                  std::size_t line) {
  Coord c;
  if (!text::parse_double(cells[0], c.lon) || !std::isfinite(c.lon))
    throw DataError(where(path, line) + "column 1 (lon): cannot parse '" + cells[0] + "'");
  if (!text::parse_double(cells[1], c.lat) || !std::isfinite(c.lat))
    throw DataError(where(path, line) + "column 2 (lat): cannot parse '" + cells[1] + "'");
  return c;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t line,
                  std::size_t column, std::string_view name) {
  double v = 0.0;
  if (!text::parse_double(cell, v))
    throw DataError(where(path, line) + "column " + std::to_string(column) + " (" +
                    std::string(name) + "): cannot parse '" + cell + "'");
  if (!std::isfinite(v))
    throw DataError(where(path, line) + "column " + std::to_string(column) + " (" +
                    std::string(name) + "): non-finite value '" + cell + "'");
  return v;
}

FieldSeries load_wide(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(where(path, 1) + "empty file");
  ++line_no;
  const auto header = text::split(line);
  if (header.size() < 3 || header[0] != "lon" || header[1] != "lat")
    throw DataError(where(path, 1) + "expected header 'lon,lat,t1,...,tK'");
  std::vector<TimeStamp> times;
  for (std::size_t k = 2; k < header.size(); ++k) {
    try {
      times.push_back(parse_time_label(header[k]));
    } catch (const DataError& e) {
      throw DataError(where(path, 1) + e.what());
    }
  }
  std::vector<Coord> coords;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line);
    if (cells.size() != header.size())
      throw DataError(where(path, line_no) + "ragged row: " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    coords.push_back(parse_coord(cells, path, line_no));
    std::vector<double> row;
    for (std::size_t k = 2; k < cells.size(); ++k)
      row.push_back(parse_cell(cells[k], path, line_no, k + 1, header[k]));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(where(path, line_no) + "no data rows");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return FieldSeries(std::move(values), std::move(coords), std::move(times));
}

FieldSeries load_long(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(where(path, 1) + "empty file");
  ++line_no;
  const auto header = text::split(line);
  if (header != std::vector<std::string>{"lon", "lat", "time", "value"})
    throw DataError(where(path, 1) + "expected header 'lon,lat,time,value'");

  auto cmp = [](const Coord& a, const Coord& b) { return coord_less(a, b); };
  std::map<Coord, std::map<int, double>, decltype(cmp)> cells(cmp);
  std::map<int, std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto row = text::split(line);
    if (row.size() != 4)
      throw DataError(where(path, line_no) + "ragged row: " + std::to_string(row.size()) +
                      " cells, expected 4");
    const Coord c = parse_coord(row, path, line_no);
    TimeStamp t;
    try {
      t = parse_time_label(row[2]);
    } catch (const DataError& e) {
      throw DataError(where(path, line_no) + e.what());
    }
    const double v = parse_cell(row[3], path, line_no, 4, "value");
    auto [it, inserted] = cells[c].emplace(t.index, v);
    if (!inserted)
      throw DataError(where(path, line_no) + "duplicate cell for location (" + row[0] + ", " +
                      row[1] + ") at time '" + row[2] + "'");
    labels.emplace(t.index, t.label);
  }
  if (cells.empty()) throw DataError(where(path, line_no) + "no data rows");

  std::vector<TimeStamp> times;
  for (const auto& [idx, label] : labels) times.push_back({idx, label});
  Eigen::MatrixXd values(static_cast<Eigen::Index>(cells.size()),
                         static_cast<Eigen::Index>(times.size()));
  std::vector<Coord> coords;
  Eigen::Index i = 0;
  for (const auto& [c, series] : cells) {
    if (series.size() != times.size())
      throw DataError(path.string() + ": location (" + text::format_double(c.lon) + ", " +
                      text::format_double(c.lat) + ") has " + std::to_string(series.size()) +
                      " of " + std::to_string(times.size()) + " time steps (missing cells)");
    Eigen::Index j = 0;
    for (const auto& [idx, v] : series) values(i, j++) = v;
    coords.push_back(c);
    ++i;
  }
  return FieldSeries(std::move(values), std::move(coords), std::move(times));
}

}  // namespace

FieldSeries load_field(const std::filesystem::path& path, CsvLayout layout) {
  auto in = text::open_input(path);
  return layout == CsvLayout::kWide ? load_wide(in, path) : load_long(in, path);
}

void save_field(const std::filesystem::path& path, const FieldSeries& field) {
  auto out = text::open_output(path);
  out << "lon,lat";
  for (const auto& t : field.times()) out << ',' << t.label;
  out << '\n';
  for (Eigen::Index i = 0; i < field.n_loc(); ++i) {
    const auto& c = field.coords()[static_cast<std::size_t>(i)];
    out << text::format_double(c.lon) << ',' << text::format_double(c.lat);
    for (Eigen::Index j = 0; j < field.n_time(); ++j)
      out << ',' << text::format_double(field.values()(i, j));
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

FieldSeries to_anomalies(const FieldSeries& field, int clim_start, int clim_end, int by_period) {
  if (by_period < 1 || 12 % by_period != 0)
    throw ConfigError("anomaly period " + std::to_string(by_period) +
                      " must divide the 12-step calendar cycle");
  if (clim_end < clim_start) throw DataError("empty climatology window");
  if (field.n_time() == 0 || clim_start < field.times().front().index ||
      clim_end > field.times().back().index)
    throw DataError("climatology window [" + std::to_string(clim_start) + ", " +
                    std::to_string(clim_end) + "] lies outside the series");

  auto period_class = [by_period](int t) { return ((t % by_period) + by_period) % by_period; };
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(field.n_loc(), by_period);
  std::vector<int> counts(static_cast<std::size_t>(by_period), 0);
  for (Eigen::Index j = 0; j < field.n_time(); ++j) {
    const int t = field.times()[static_cast<std::size_t>(j)].index;
    if (t < clim_start || t > clim_end) continue;
    const int c = period_class(t);
    sums.col(c) += field.values().col(j);
    ++counts[static_cast<std::size_t>(c)];
  }
  if (std::all_of(counts.begin(), counts.end(), [](int n) { return n == 0; }))
    throw DataError("empty climatology window");

  Eigen::MatrixXd out = field.values();
  for (Eigen::Index j = 0; j < field.n_time(); ++j) {
    const auto& ts = field.times()[static_cast<std::size_t>(j)];
    const int c = period_class(ts.index);
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw DataError("climatology window has no samples for period class " +
                      std::to_string(c) + " (time '" + ts.label + "')");
    out.col(j) -= sums.col(c) / counts[static_cast<std::size_t>(c)];
  }
  return field.with_values(std::move(out));
}

RegionPartition::RegionPartition(std::vector<int> assignments)
    : assignments_(std::move(assignments)) {
  if (assignments_.empty()) throw DataError("region partition is empty");
  const int max_id = *std::max_element(assignments_.begin(), assignments_.end());
  const int min_id = *std::min_element(assignments_.begin(), assignments_.end());
  if (min_id < 1) throw DataError("region ids must start at 1");
  std::vector<int> sizes(static_cast<std::size_t>(max_id) + 1, 0);
  for (int r : assignments_) ++sizes[static_cast<std::size_t>(r)];
  for (int r = 1; r <= max_id; ++r)
    if (sizes[static_cast<std::size_t>(r)] == 0)
      throw DataError("region ids are not contiguous: region " + std::to_string(r) +
                      " is empty");
  region_count_ = max_id;
}

std::vector<Eigen::Index> RegionPartition::members(int region) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignments_.size(); ++i)
    if (assignments_[i] == region) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

RegionPartition load_regions(const std::filesystem::path& path, const FieldSeries& field) {
  auto in = text::open_input(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(where(path, 1) + "empty file");
  ++line_no;
  if (text::split(line) != std::vector<std::string>{"lon", "lat", "region"})
    throw DataError(where(path, 1) + "expected header 'lon,lat,region'");
  auto cmp = [](const Coord& a, const Coord& b) { return coord_less(a, b); };
  std::map<Coord, int, decltype(cmp)> lookup(cmp);
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = text::split(line);
    if (cells.size() != 3) throw DataError(where(path, line_no) + "ragged row");
    const Coord c = parse_coord(cells, path, line_no);
    long long id = 0;
    if (!text::parse_int(cells[2], id))
      throw DataError(where(path, line_no) + "column 3 (region): cannot parse '" + cells[2] + "'");
    if (!lookup.emplace(c, static_cast<int>(id)).second)
      throw DataError(where(path, line_no) + "duplicate location");
  }
  std::vector<int> assignments;
  for (const auto& c : field.coords()) {
    const auto it = lookup.find(c);
    if (it == lookup.end())
      throw DataError(path.string() + ": no region for location (" + text::format_double(c.lon) +
                      ", " + text::format_double(c.lat) + ")");
    assignments.push_back(it->second);
  }
  return RegionPartition(std::move(assignments));
}

void save_regions(const std::filesystem::path& path, const FieldSeries& field,
                  const RegionPartition& partition) {
  if (partition.assignments().size() != static_cast<std::size_t>(field.n_loc()))
    throw DataError("partition does not match field locations");
  auto out = text::open_output(path);
  out << "lon,lat,region\n";
  for (std::size_t i = 0; i < field.coords().size(); ++i)
    out << text::format_double(field.coords()[i].lon) << ','
        << text::format_double(field.coords()[i].lat) << ',' << partition.assignments()[i]
        << '\n';
}

RegionPartition banded_partition(const FieldSeries& field, int n_regions) {
  if (n_regions < 1 || n_regions > field.n_loc())
    throw ConfigError("region count " + std::to_string(n_regions) + " invalid for " +
                      std::to_string(field.n_loc()) + " locations");
  std::vector<int> ids(static_cast<std::size_t>(field.n_loc()));
  for (Eigen::Index i = 0; i < field.n_loc(); ++i)
    ids[static_cast<std::size_t>(i)] = static_cast<int>(i * n_regions / field.n_loc()) + 1;
  return RegionPartition(std::move(ids));
}

FieldSeries restrict_to_region(const FieldSeries& field, const RegionPartition& partition,
                               int region) {
  if (partition.assignments().size() != static_cast<std::size_t>(field.n_loc()))
    throw DataError("partition does not match field locations");
  if (region < 1 || region > partition.region_count())
    throw ConfigError("region " + std::to_string(region) + " does not exist");
  const auto rows = partition.members(region);
  return field.with_regions(partition.assignments()).select_rows(rows);
}

FieldSeries stack_fields(std::span<const FieldSeries> parts) {
  if (parts.empty()) throw DataError("nothing to stack");
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.times() != parts.front().times())
      throw DataError("cannot stack fields with different time axes");
    rows += p.n_loc();
  }
  const bool regions = std::all_of(parts.begin(), parts.end(),
                                   [](const FieldSeries& f) { return f.has_regions(); });
  Eigen::MatrixXd v(rows, parts.front().n_time());
  std::vector<Coord> coords;
  std::vector<int> ids;
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    v.middleRows(r, p.n_loc()) = p.values();
    r += p.n_loc();
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    if (regions) ids.insert(ids.end(), p.region_ids().begin(), p.region_ids().end());
  }
  return FieldSeries(std::move(v), std::move(coords), parts.front().times(), std::move(ids));
}

}  // namespace analogcast
