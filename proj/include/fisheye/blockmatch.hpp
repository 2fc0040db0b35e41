#pragma once

#include <string>
#include <vector>

#include "fisheye/frame.hpp"
#include "fisheye/geometry.hpp"

// Exhaustive block-matching motion estimation in three variants: TME
// (conventional translational matching), EME+ (equisolid re-projection with
// ultra wide-angle compensation) and CME+ (calibrated re-projection with the
// same compensation), plus motion-compensated frame prediction.

namespace fisheye {

enum class Metric { ssd, sad };
enum class Method { tme, eme_plus, cme_plus };

const char* to_string(Metric metric);
const char* to_string(Method method);
Metric metric_from_string(const std::string& s);
Method method_from_string(const std::string& s);

struct SearchConfig {
  int block_size = 16;    // one of 8, 16, 32, 64
  int search_range = 64;  // candidates cover [-s, s]^2, (2s+1)^2 in total
  int precision = 8;      // sub-pel denominator for reference sampling
  Metric metric = Metric::ssd;
  Method method = Method::tme;

  void validate() const;
};

struct MotionVector {
  int dx = 0;
  int dy = 0;
  bool operator==(const MotionVector&) const = default;
};

// Per-block vectors and costs. Vectors are image-domain offsets for TME
// blocks and perspective-domain offsets for re-projected blocks.
struct MotionField {
  int blocks_x = 0;
  int blocks_y = 0;
  int frame_width = 0;
  int frame_height = 0;
  SearchConfig config;
  std::vector<MotionVector> vectors;
  std::vector<double> costs;
  std::vector<std::uint8_t> skipped;  // block entirely outside the image circle
  std::vector<Method> methods;        // effective method per block

  std::size_t index(int bx, int by) const {
    return static_cast<std::size_t>(by) * blocks_x + bx;
  }
  MotionVector vec(int bx, int by) const { return vectors[index(bx, by)]; }
  double cost(int bx, int by) const { return costs[index(bx, by)]; }
};

// Matching cost of one block of the current frame against the upscaled
// reference displaced by an integer candidate. Block coordinates must lie
// within the current frame.
double block_cost(const Frame& cur, const UpscaledFrame& ref, int x0, int y0,
                  int block_w, int block_h, MotionVector mv, Metric metric);

// Conventional exhaustive block matching. Ties are broken towards the
// smaller |dx| + |dy|, then by ascending (dy, dx); the rule is order-free, so
// block-level parallelism cannot change the result.
MotionField estimate_tme(const Frame& cur, const Frame& ref, const SearchConfig& cfg);

// Re-projected block matching: EME+ with the equisolid model, CME+ with a
// calibrated model. Any model is accepted; the pinhole model makes both
// domain transforms identities and degenerates the search to TME. Candidate
// vectors are added, and bounded, in the perspective domain.
MotionField estimate_projected(const Frame& cur, const Frame& ref,
                               const SearchConfig& cfg, const ProjectionModel& model,
                               const CameraGeometry& geom);

// General form behind the two entry points above: per_block_adapted selects
// the re-projection pipeline block by block (nullptr: every block follows
// cfg.method). model/geom may be null for pure-TME runs.
MotionField estimate_mixed(const Frame& cur, const Frame& ref, const SearchConfig& cfg,
                           const ProjectionModel* model, const CameraGeometry* geom,
                           const std::vector<std::uint8_t>* per_block_adapted);

// Re-applies each block's winning candidate and writes the fetched reference
// samples at the block's original positions. Skipped blocks and pixels beyond
// the image circle come out black. model/geom are required iff the field
// contains re-projected blocks.
Frame compensate(const Frame& ref, const MotionField& field,
                 const ProjectionModel* model = nullptr,
                 const CameraGeometry* geom = nullptr);

// Text CSV with header "bx,by,dx,dy,cost,skipped,method,block,range,precision".
void save_motion_field(const MotionField& field, const std::string& path);
MotionField load_motion_field(const std::string& path);

}  // namespace fisheye
