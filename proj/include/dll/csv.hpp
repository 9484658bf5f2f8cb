#pragma once

// CSV writers/readers for every file the CLI emits. All floating-point fields
// use 9 significant digits ("%.9g"), comma separators, and a declared header,
// so identical inputs produce byte-identical files.

#include <cstdio>
#include <string>
#include <vector>

#include "dll/datasets.hpp"

namespace dll {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_cloud_csv(const PointCloud& cloud, const std::string& path);
PointCloud read_cloud_csv(const std::string& path);

struct EpochRow {
  size_t epoch;
  double train_loss;
  double test_nelbo;
  double test_weighted;
  double test_rescaled;
};

struct BinRowCsv {
  size_t epoch;
  double bin_lo;
  double bin_hi;
  size_t count;
  double mean_loss;  // NaN marks an empty bin ("missing", written as "nan")
};

void write_epochs_csv(const std::vector<EpochRow>& rows, const std::string& path);
std::vector<EpochRow> read_epochs_csv(const std::string& path);

void write_bins_csv(const std::vector<BinRowCsv>& rows, const std::string& path);
std::vector<BinRowCsv> read_bins_csv(const std::string& path);

struct MetricsCsvRow {
  std::string space;
  std::string form;
  std::string dataset;
  uint64_t seed;
  double loss;
  double mean_dist;
  double covar_dist;
};

// Appends, writing the header only when the file does not exist yet.
void append_metrics_csv(const MetricsCsvRow& row, const std::string& path);
void write_metrics_csv(const std::vector<MetricsCsvRow>& rows, const std::string& path);
std::vector<MetricsCsvRow> read_metrics_csv(const std::string& path);

}  // namespace dll
