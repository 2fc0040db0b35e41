#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fisheye/blockmatch.hpp"

// Temporal resolution enhancement: frame repetition, linear averaging,
// motion-compensated fetching and motion-compensated linear averaging with
// central-weighted-median vector re-timing, plus the fisheye-adapted variants
// with region-based hybridization.

namespace fisheye {

enum class FrucMode { repetition, linear_average, mc_fetch, mc_linear_average };
enum class AdaptKind { none, equisolid, calibrated };
enum class FieldTime { forward, backward, retimed };

const char* to_string(FrucMode mode);
const char* to_string(AdaptKind adapt);
FrucMode fruc_mode_from_string(const std::string& s);
AdaptKind adapt_from_string(const std::string& s);

// Per-pixel motion vectors, real-valued components in pixels.
struct DenseMotionField {
  int width = 0;
  int height = 0;
  FieldTime time = FieldTime::forward;
  std::vector<float> mx;
  std::vector<float> my;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

struct FrucConfig {
  double alpha = 0.5;  // intermediate frame sits at time t - alpha
  FrucMode mode = FrucMode::mc_linear_average;
  AdaptKind adapt = AdaptKind::none;
  double hybrid_fov_deg = 170.0;  // adapted blocks must sit inside this FOV
  SearchConfig search;

  void validate() const;
};

// Block-level method assignment for the region-based hybrid: a block is
// adapted iff all four of its corner pixels lie within the hybrid FOV disc.
std::vector<std::uint8_t> hybrid_region_split(const CameraGeometry& geom,
                                              const ProjectionModel& model,
                                              double hybrid_fov_deg, int blocks_x,
                                              int blocks_y, int block_size);

// Re-projected matching for blocks inside the hybrid FOV circle, conventional
// block matching elsewhere.
MotionField estimate_hybrid(const Frame& cur, const Frame& ref, const SearchConfig& cfg,
                            const ProjectionModel& model, const CameraGeometry& geom,
                            double hybrid_fov_deg);

// Spreads a block field to pixel resolution. TME blocks pass their vector to
// every pixel; re-projected blocks assign each pixel the fisheye-domain
// displacement of its own coordinates under the winning candidate, so the
// dense vectors vary within a block. model/geom required iff the field
// contains re-projected blocks.
DenseMotionField densify(const MotionField& field, const ProjectionModel* model = nullptr,
                         const CameraGeometry* geom = nullptr);

// Central weighted median re-timing. Per pixel and per component the median
// of 38 values: the forward and the negated backward center with weight 7
// each, plus 4 cross arms x 3 taps at distances {b, 2b, 3b} from both fields
// with weight 1. Out-of-frame taps drop out of the multiset.
DenseMotionField retime_cwm(const DenseMotionField& fwd, const DenseMotionField& bwd,
                            int block_size);

struct FrucFrames {
  Frame intermediate;
  std::optional<Frame> fetch_fw;  // one-sided fetches, motion compensated modes only
  std::optional<Frame> fetch_bw;
};

// Creates the intermediate frame at time t - alpha between prev (t-1) and
// next (t). model/geom are only consulted by the adapted modes.
FrucFrames interpolate_full(const Frame& prev, const Frame& next, const FrucConfig& cfg,
                            const ProjectionModel& model, const CameraGeometry& geom);

Frame interpolate(const Frame& prev, const Frame& next, const FrucConfig& cfg,
                  const ProjectionModel& model, const CameraGeometry& geom);

}  // namespace fisheye
