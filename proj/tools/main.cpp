#include <CLI11.hpp>

#include "fisheye/cli.hpp"

namespace {

void add_geometry_flags(CLI::App* sub, fisheye::cli::GeometryOptions& g) {
  sub->add_option("--focal-mm", g.focal_mm, "Focal length in millimeters");
  sub->add_option("--sensor-mm", g.sensor_mm, "Sensor width in millimeters");
  sub->add_option("--fov", g.fov_deg, "Field of view in degrees");
  sub->add_option("--calib", g.calib_path,
                  "Calibration lookup table (theta_deg,r_mm CSV); selects the "
                  "calibrated projection");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Projection-aware block-based motion estimation and frame-rate "
      "up-conversion for circular fisheye video"};
  app.require_subcommand(1);

  using namespace fisheye::cli;
  EstimateOptions est;
  CompensateOptions comp;
  FrucOptions fruc;
  GenerateOptions gen;
  MetricsOptions met;
  BatchOptions batch;
  int rc = kExitOk;

  auto* s_est = app.add_subcommand(
      "estimate", "Estimate motion between a frame pair and compensate");
  s_est->add_option("reference", est.ref_path, "Reference frame")->required();
  s_est->add_option("current", est.cur_path, "Current frame to predict")->required();
  s_est->add_option("--method", est.method, "tme | eme+ | cme+");
  s_est->add_option("--block", est.block, "Block size (8, 16, 32, 64)");
  s_est->add_option("--range", est.range, "Search range in pixels");
  s_est->add_option("--precision", est.precision, "Sub-pel denominator");
  s_est->add_option("--metric", est.metric, "ssd | sad");
  s_est->add_option("--mask-fov", est.mask_fov_deg, "Metric mask FOV in degrees");
  s_est->add_option("-o,--out", est.out_prefix, "Output prefix");
  add_geometry_flags(s_est, est.geometry);
  s_est->callback([&] { rc = cmd_estimate(est); });

  auto* s_comp = app.add_subcommand(
      "compensate", "Apply a stored motion field to a reference frame");
  s_comp->add_option("reference", comp.ref_path, "Reference frame")->required();
  s_comp->add_option("field", comp.field_path, "Motion field CSV")->required();
  s_comp->add_option("-o,--out", comp.out_path, "Output image");
  add_geometry_flags(s_comp, comp.geometry);
  s_comp->callback([&] { rc = cmd_compensate(comp); });

  auto* s_fruc = app.add_subcommand(
      "fruc", "Create the intermediate frame between two frames");
  s_fruc->add_option("previous", fruc.prev_path, "Frame at t-1")->required();
  s_fruc->add_option("next", fruc.next_path, "Frame at t")->required();
  s_fruc->add_option("--truth", fruc.truth_path, "Ground-truth middle frame");
  s_fruc->add_option("--mode", fruc.mode, "rep | la | mcf | mcla");
  s_fruc->add_option("--adapt", fruc.adapt, "none | equisolid | calibrated");
  s_fruc->add_option("--alpha", fruc.alpha, "Intermediate position in (0,1)");
  s_fruc->add_option("--hybrid-fov", fruc.hybrid_fov_deg,
                     "FOV of the adapted region in degrees");
  s_fruc->add_option("--block", fruc.block, "Block size (8, 16, 32, 64)");
  s_fruc->add_option("--range", fruc.range, "Search range in pixels");
  s_fruc->add_option("--precision", fruc.precision, "Sub-pel denominator");
  s_fruc->add_option("--metric", fruc.metric, "ssd | sad");
  s_fruc->add_option("--mask-fov", fruc.mask_fov_deg, "Metric mask FOV in degrees");
  s_fruc->add_option("-o,--out", fruc.out_path, "Output image");
  s_fruc->add_option("--debug-fetches", fruc.debug_prefix,
                     "Also write the one-sided fetches under this prefix");
  add_geometry_flags(s_fruc, fruc.geometry);
  s_fruc->callback([&] { rc = cmd_fruc(fruc); });

  auto* s_gen = app.add_subcommand(
      "generate", "Render a synthetic fisheye sequence with known motion");
  s_gen->add_option("--source", gen.source_path,
                    "Perspective source image (default: procedural noise)");
  s_gen->add_option("--source-size", gen.source_size, "Procedural source size");
  s_gen->add_option("--noise-seed", gen.noise_seed, "Procedural source seed");
  s_gen->add_option("--size", gen.size, "Output resolution (square)");
  s_gen->add_option("--frames", gen.frames, "Number of frames");
  s_gen->add_option("--shift-dx", gen.shift_dx, "Truth shift per step, x");
  s_gen->add_option("--shift-dy", gen.shift_dy, "Truth shift per step, y");
  s_gen->add_option("-o,--out", gen.out_prefix, "Output prefix");
  add_geometry_flags(s_gen, gen.geometry);
  s_gen->callback([&] { rc = cmd_generate(gen); });

  auto* s_met = app.add_subcommand("metrics", "PSNR/SSIM over the fisheye disc");
  s_met->add_option("reference", met.ref_path, "First frame")->required();
  s_met->add_option("current", met.cur_path, "Second frame")->required();
  s_met->add_option("--mask-fov", met.mask_fov_deg, "Metric mask FOV in degrees");
  add_geometry_flags(s_met, met.geometry);
  s_met->callback([&] { rc = cmd_metrics(met); });

  auto* s_batch = app.add_subcommand(
      "batch", "Estimate and score every frame pair of a manifest");
  s_batch->add_option("manifest", batch.manifest_path,
                      "CSV manifest with reference,current lines")
      ->required();
  s_batch->add_option("--method", batch.method, "tme | eme+ | cme+");
  s_batch->add_option("--block", batch.block, "Block size (8, 16, 32, 64)");
  s_batch->add_option("--range", batch.range, "Search range in pixels");
  s_batch->add_option("--precision", batch.precision, "Sub-pel denominator");
  s_batch->add_option("--metric", batch.metric, "ssd | sad");
  s_batch->add_option("--mask-fov", batch.mask_fov_deg, "Metric mask FOV in degrees");
  s_batch->add_option("-o,--out", batch.out_csv, "Aggregate CSV path");
  add_geometry_flags(s_batch, batch.geometry);
  s_batch->callback([&] { rc = cmd_batch(batch); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return rc;
}
