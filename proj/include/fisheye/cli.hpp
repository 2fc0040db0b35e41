#pragma once

#include <optional>
#include <string>

#include "fisheye/blockmatch.hpp"
#include "fisheye/fruc.hpp"

// Command implementations behind the fisheye tool. Each function prints its
// results to stdout, diagnostics to stderr, and returns a process exit code:
// 0 success, 1 usage error, 2 data error.

namespace fisheye::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct GeometryOptions {
  double focal_mm = 1.8;
  double sensor_mm = 5.2;
  double fov_deg = 185.0;
  std::string calib_path;  // switches the fisheye model to the calibrated one
};

struct EstimateOptions {
  std::string ref_path;
  std::string cur_path;
  std::string method = "tme";
  int block = 16;
  int range = 64;
  int precision = 8;
  std::string metric = "ssd";
  GeometryOptions geometry;
  std::optional<double> mask_fov_deg;
  std::string out_prefix = "estimate";  // writes <prefix>_field.csv, <prefix>_comp.png
};

struct CompensateOptions {
  std::string ref_path;
  std::string field_path;
  GeometryOptions geometry;
  std::string out_path = "compensated.png";
};

struct FrucOptions {
  std::string prev_path;
  std::string next_path;
  std::string truth_path;  // optional ground-truth middle frame
  std::string mode = "mcla";
  std::string adapt = "none";
  double alpha = 0.5;
  double hybrid_fov_deg = 170.0;
  int block = 16;
  int range = 64;
  int precision = 8;
  std::string metric = "ssd";
  GeometryOptions geometry;
  std::optional<double> mask_fov_deg;
  std::string out_path = "intermediate.png";
  std::string debug_prefix;  // also writes <prefix>_fw.png / <prefix>_bw.png
};

struct GenerateOptions {
  std::string source_path;  // empty: procedural noise source
  int source_size = 4096;
  unsigned noise_seed = 7;
  int size = 512;  // output resolution (square)
  int frames = 2;
  int shift_dx = 4;
  int shift_dy = 0;
  GeometryOptions geometry{1.8, 5.2, 170.0, {}};
  std::string out_prefix = "synth";  // writes <prefix>_NNNN.png + <prefix>_truth.csv
};

struct MetricsOptions {
  std::string ref_path;
  std::string cur_path;
  GeometryOptions geometry;
  std::optional<double> mask_fov_deg;
};

struct BatchOptions {
  std::string manifest_path;  // lines "reference_path,current_path"
  std::string method = "tme";
  int block = 16;
  int range = 64;
  int precision = 8;
  std::string metric = "ssd";
  GeometryOptions geometry;
  std::optional<double> mask_fov_deg;
  std::string out_csv = "batch.csv";
};

int cmd_estimate(const EstimateOptions& options);
int cmd_compensate(const CompensateOptions& options);
int cmd_fruc(const FrucOptions& options);
int cmd_generate(const GenerateOptions& options);
int cmd_metrics(const MetricsOptions& options);
int cmd_batch(const BatchOptions& options);

}  // namespace fisheye::cli
