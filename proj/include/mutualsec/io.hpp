#pragma once

// CSV readers and writers. Numbers are written with std::to_chars (shortest
// round-trip form, '.' separator, independent of the locale).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mutualsec/network.hpp"
#include "mutualsec/sim.hpp"

namespace mutualsec::io {

std::string format_double(double x);
// Parses a whole field as a double; throws InvalidArgument otherwise.
double parse_double(std::string_view field);
std::vector<std::string> split_csv_line(std::string_view line);

// N rows of N comma-separated rates, no header. Row i, column j is the rate i -> j.
TrafficMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& os, const TrafficMatrix& tm);

// Rows "i,j,rate" or "i,j,rate,directed" with 1-based AS labels and an
// optional header line. Edges are symmetric unless directed is 1/true. The
// collection size defaults to the largest label.
TrafficMatrix read_edge_csv(const std::filesystem::path& path, std::optional<std::size_t> n = std::nullopt);

// Rows "T,eps" for a tabulated monitoring curve, optional header.
std::vector<std::pair<double, double>> read_curve_csv(const std::filesystem::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  CsvWriter& header(const std::vector<std::string>& names);
  CsvWriter& field(double x);
  CsvWriter& field(std::string_view s);
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
  CsvWriter& field(long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(bool b) { return field(static_cast<long long>(b ? 1 : 0)); }
  void end_row();

 private:
  void sep();
  std::ostream& os_;
  bool first_ = true;
};

// Columns period,total_cost,trigger_fired,mean_rating.
void write_time_series_csv(std::ostream& os, const std::vector<SeriesRow>& series);

}  // namespace mutualsec::io
