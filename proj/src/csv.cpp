#include "dll/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dll/errors.hpp"

namespace dll {
namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("bad numeric field '" + s + "' in " + path);
  return v;
}

uint64_t parse_u64(const std::string& s, const std::string& path) {
  uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("bad integer field '" + s + "' in " + path);
  return v;
}

void expect_header(std::ifstream& f, const char* expected, const std::string& path) {
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw IoError("unexpected header in " + path + " (expected '" + expected + "')");
}

}  // namespace

void write_cloud_csv(const PointCloud& cloud, const std::string& path) {
  auto f = open_out(path);
  f << "x1,x2\n";
  for (size_t i = 0; i < cloud.n; ++i)
    f << format_g9(cloud.pts[2 * i]) << ',' << format_g9(cloud.pts[2 * i + 1]) << '\n';
  if (!f) throw IoError("write failed: " + path);
}

PointCloud read_cloud_csv(const std::string& path) {
  auto f = open_in(path);
  expect_header(f, "x1,x2", path);
  PointCloud cloud;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = split_line(line);
    if (fields.size() != 2) throw IoError("expected 2 columns in " + path);
    cloud.pts.push_back(parse_double(fields[0], path));
    cloud.pts.push_back(parse_double(fields[1], path));
  }
  cloud.n = cloud.pts.size() / 2;
  if (cloud.n == 0) throw IoError("no data rows in " + path);
  cloud.normalized = true;  // files written by this tool hold normalized clouds
  return cloud;
}

void write_epochs_csv(const std::vector<EpochRow>& rows, const std::string& path) {
  auto f = open_out(path);
  f << "epoch,train_loss,test_nelbo,test_weighted,test_rescaled\n";
  for (const auto& r : rows)
    f << r.epoch << ',' << format_g9(r.train_loss) << ',' << format_g9(r.test_nelbo) << ','
      << format_g9(r.test_weighted) << ',' << format_g9(r.test_rescaled) << '\n';
  if (!f) throw IoError("write failed: " + path);
}

std::vector<EpochRow> read_epochs_csv(const std::string& path) {
  auto f = open_in(path);
  expect_header(f, "epoch,train_loss,test_nelbo,test_weighted,test_rescaled", path);
  std::vector<EpochRow> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = split_line(line);
    if (fields.size() != 5) throw IoError("expected 5 columns in " + path);
    rows.push_back({parse_u64(fields[0], path), parse_double(fields[1], path),
                    parse_double(fields[2], path), parse_double(fields[3], path),
                    parse_double(fields[4], path)});
  }
  return rows;
}

void write_bins_csv(const std::vector<BinRowCsv>& rows, const std::string& path) {
  auto f = open_out(path);
  f << "epoch,bin_lo,bin_hi,count,mean_loss\n";
  for (const auto& r : rows) {
    f << r.epoch << ',' << format_g9(r.bin_lo) << ',' << format_g9(r.bin_hi) << ',' << r.count
      << ',' << (r.count == 0 ? std::string("nan") : format_g9(r.mean_loss)) << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

std::vector<BinRowCsv> read_bins_csv(const std::string& path) {
  auto f = open_in(path);
  expect_header(f, "epoch,bin_lo,bin_hi,count,mean_loss", path);
  std::vector<BinRowCsv> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = split_line(line);
    if (fields.size() != 5) throw IoError("expected 5 columns in " + path);
    rows.push_back({parse_u64(fields[0], path), parse_double(fields[1], path),
                    parse_double(fields[2], path), parse_u64(fields[3], path),
                    parse_double(fields[4], path)});
  }
  return rows;
}

namespace {
constexpr const char* kMetricsHeader = "space,form,dataset,seed,loss,mean_dist,covar_dist";

void write_metrics_row(std::ofstream& f, const MetricsCsvRow& r) {
  f << r.space << ',' << r.form << ',' << r.dataset << ',' << r.seed << ',' << format_g9(r.loss)
    << ',' << format_g9(r.mean_dist) << ',' << format_g9(r.covar_dist) << '\n';
}
}  // namespace

void append_metrics_csv(const MetricsCsvRow& row, const std::string& path) {
  const bool exists = std::filesystem::exists(path);
  auto f = open_out(path, std::ios::app);
  if (!exists) f << kMetricsHeader << '\n';
  write_metrics_row(f, row);
  if (!f) throw IoError("write failed: " + path);
}

void write_metrics_csv(const std::vector<MetricsCsvRow>& rows, const std::string& path) {
  auto f = open_out(path);
  f << kMetricsHeader << '\n';
  for (const auto& r : rows) write_metrics_row(f, r);
  if (!f) throw IoError("write failed: " + path);
}

std::vector<MetricsCsvRow> read_metrics_csv(const std::string& path) {
  auto f = open_in(path);
  expect_header(f, kMetricsHeader, path);
  std::vector<MetricsCsvRow> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    const auto fields = split_line(line);
    if (fields.size() != 7) throw IoError("expected 7 columns in " + path);
    rows.push_back({fields[0], fields[1], fields[2], parse_u64(fields[3], path),
                    parse_double(fields[4], path), parse_double(fields[5], path),
                    parse_double(fields[6], path)});
  }
  return rows;
}

}  // namespace dll
