#include "mutualsec/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mutualsec/error.hpp"

namespace mutualsec::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line + 1) + ": ";
}

bool parse_flag(std::string_view s) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "directed") return true;
  if (s == "0" || s == "false" || s == "undirected" || s.empty()) return false;
  throw InvalidArgument("bad directed flag '" + std::string(s) + "'");
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

double parse_double(std::string_view field) {
  std::string_view s = trim(field);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s == "inf") return INFINITY;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw InvalidArgument("not a number: '" + std::string(field) + "'");
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

TrafficMatrix read_matrix_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::size_t n = lines.size();
  std::vector<double> rates;
  rates.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != n)
      throw InvalidArgument(where(path, r) + "expected " + std::to_string(n) + " columns, got " +
                            std::to_string(fields.size()));
    for (const auto& f : fields) {
      try {
        rates.push_back(parse_double(f));
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(where(path, r) + e.what());
      }
    }
  }
  return TrafficMatrix(n, std::move(rates));
}

void write_matrix_csv(std::ostream& os, const TrafficMatrix& tm) {
  CsvWriter w(os);
  for (std::size_t i = 0; i < tm.size(); ++i) {
    for (std::size_t j = 0; j < tm.size(); ++j) w.field(tm(i, j));
    w.end_row();
  }
}

TrafficMatrix read_edge_csv(const std::filesystem::path& path, std::optional<std::size_t> n) {
  auto lines = read_lines(path);
  std::size_t first = 0;
  if (!lines.empty()) {
    const auto fields = split_csv_line(lines.front());
    if (!fields.empty() && !is_number(fields.front())) first = 1;
  }
  std::vector<topology::Edge> edges;
  std::size_t max_label = 0;
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto f = split_csv_line(lines[r]);
    if (f.size() != 3 && f.size() != 4)
      throw InvalidArgument(where(path, r) + "expected i,j,rate[,directed]");
    try {
      const double a = parse_double(f[0]), b = parse_double(f[1]);
      if (a < 1 || b < 1 || a != std::floor(a) || b != std::floor(b))
        throw InvalidArgument("AS labels must be positive integers");
      const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
      max_label = std::max({max_label, ia, ib});
      edges.push_back(topology::Edge{ia - 1, ib - 1, parse_double(f[2]), f.size() == 4 && parse_flag(f[3])});
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where(path, r) + e.what());
    }
  }
  const std::size_t size = n.value_or(max_label);
  if (max_label > size)
    throw InvalidArgument(path.string() + ": label " + std::to_string(max_label) + " exceeds n = " +
                          std::to_string(size));
  return from_edges(size, std::move(edges));
}

std::vector<std::pair<double, double>> read_curve_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto f = split_csv_line(lines[r]);
    if (r == 0 && !f.empty() && !is_number(f.front())) continue;
    if (f.size() != 2) throw InvalidArgument(where(path, r) + "expected T,eps");
    try {
      pts.emplace_back(parse_double(f[0]), parse_double(f[1]));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where(path, r) + e.what());
    }
  }
  return pts;
}

void CsvWriter::sep() {
  if (!first_) os_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(std::string_view(n));
  end_row();
  return *this;
}

CsvWriter& CsvWriter::field(double x) {
  sep();
  os_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view s) {
  sep();
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    os_ << s;
  } else {
    os_ << '"';
    for (char ch : s) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::field(long long v) {
  sep();
  os_ << v;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  first_ = true;
}

void write_time_series_csv(std::ostream& os, const std::vector<SeriesRow>& series) {
  CsvWriter w(os);
  w.header({"period", "total_cost", "trigger_fired", "mean_rating"});
  for (const auto& r : series) {
    w.field(r.period).field(r.total_cost).field(r.trigger_fired).field(r.mean_rating);
    w.end_row();
  }
}

}  // namespace mutualsec::io
