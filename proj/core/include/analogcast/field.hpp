#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace analogcast {

struct Coord {
  double lon = 0.0;  // degrees
  double lat = 0.0;  // degrees

  friend bool operator==(const Coord&, const Coord&) = default;
};

/// Integer time index plus the calendar label it was read from. Labels of
/// the form "YYYY-MM" map to year*12 + (month-1); plain integers map to
/// themselves.
struct TimeStamp {
  int index = 0;
  std::string label;

  friend bool operator==(const TimeStamp&, const TimeStamp&) = default;
};

TimeStamp parse_time_label(std::string_view label);

/// A gridded field: one row per location, one column per time.
///
/// Rows are kept in (lat, lon) lexicographic order and columns in
/// increasing time order, so anything derived from the matrix (bases,
/// libraries) is reproducible run to run. Immutable once constructed.
class FieldSeries {
 public:
  FieldSeries() = default;

  /// Validates finiteness and shape; sorts rows and columns into canonical
  /// order. Throws DataError on violation.
  FieldSeries(Eigen::MatrixXd values, std::vector<Coord> coords, std::vector<TimeStamp> times,
              std::vector<int> region_ids = {});

  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<Coord>& coords() const { return coords_; }
  const std::vector<TimeStamp>& times() const { return times_; }
  const std::vector<int>& region_ids() const { return region_ids_; }
  bool has_regions() const { return !region_ids_.empty(); }

  Eigen::Index n_loc() const { return values_.rows(); }
  Eigen::Index n_time() const { return values_.cols(); }

  /// Column holding time index `t`, if present.
  std::optional<Eigen::Index> column_of(int t) const;

  /// True when time indices increase by exactly one per column.
  bool contiguous() const;

  FieldSeries with_values(Eigen::MatrixXd values) const;
  FieldSeries with_regions(std::vector<int> region_ids) const;
  FieldSeries select_rows(std::span<const Eigen::Index> rows) const;
  /// Columns [first, first + count).
  FieldSeries select_columns(Eigen::Index first, Eigen::Index count) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<Coord> coords_;
  std::vector<TimeStamp> times_;
  std::vector<int> region_ids_;
};

enum class CsvLayout {
  kLong,  // lon,lat,time,value
  kWide,  // lon,lat,t1,...,tK
};

CsvLayout parse_layout(std::string_view name);

FieldSeries load_field(const std::filesystem::path& path, CsvLayout layout);
void save_field(const std::filesystem::path& path, const FieldSeries& field);

/// Subtracts, per location and per period class (time index mod
/// `by_period`), the mean over the climatology window [clim_start,
/// clim_end] (time indices, inclusive).
FieldSeries to_anomalies(const FieldSeries& field, int clim_start, int clim_end, int by_period);

/// Location -> region id, ids contiguous from 1.
class RegionPartition {
 public:
  RegionPartition() = default;
  explicit RegionPartition(std::vector<int> assignments);

  const std::vector<int>& assignments() const { return assignments_; }
  int region_count() const { return region_count_; }
  std::vector<Eigen::Index> members(int region) const;

 private:
  std::vector<int> assignments_;
  int region_count_ = 0;
};

/// Reads "lon,lat,region" and matches rows against the field's locations.
RegionPartition load_regions(const std::filesystem::path& path, const FieldSeries& field);
void save_regions(const std::filesystem::path& path, const FieldSeries& field,
                  const RegionPartition& partition);

/// Splits the field's canonical row order into `n_regions` consecutive
/// bands of near-equal size.
RegionPartition banded_partition(const FieldSeries& field, int n_regions);

FieldSeries restrict_to_region(const FieldSeries& field, const RegionPartition& partition,
                               int region);

/// Concatenates fields over locations; the result is re-sorted into
/// canonical order. All parts must share the same time axis.
FieldSeries stack_fields(std::span<const FieldSeries> parts);

}  // namespace analogcast
