#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace pixellink;
using namespace pixellink::cli;

namespace {

void add_common(CLI::App* cmd, Common& common, bool decode_flags, bool loss_flags) {
  auto& o = common.overrides;
  cmd->add_option("--config", common.config, "flat key=value config file; flags override it");
  cmd->add_option("--preset", o.preset, "ic15 | td500 | ic13 | ic13-ms (default ic15)");
  cmd->add_option("--resolution", o.resolution, "prediction resolution: 2s or 4s (default 4s)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--jobs", common.jobs, "worker threads (default $PIXELLINK_JOBS or 1)");
  if (decode_flags) {
    cmd->add_option("--pixel-thresh", o.pixel_thresh, "pixel probability threshold");
    cmd->add_option("--link-thresh", o.link_thresh, "link probability threshold");
    cmd->add_option("--min-short-side", o.min_short_side, "post-filter: minimum shorter side");
    cmd->add_option("--min-area", o.min_area, "post-filter: minimum box area");
    cmd->add_option("--scale-back", o.scale_back, "map-to-image scale (default from --resolution)");
  }
  if (loss_flags) {
    cmd->add_option("--lambda", o.lambda, "pixel loss weight (default 2)");
    cmd->add_option("--neg-ratio", o.neg_ratio, "OHEM negatives per positive (default 3)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pixellink: link-based text detection pipeline tools"};
  app.require_subcommand(1);

  Common common;

  EncodeGtArgs encode;
  auto* enc = app.add_subcommand("encode-gt", "encode annotations into label, link, weight and ignore tensors");
  add_common(enc, common, false, false);
  enc->add_option("--annot-dir", encode.annot_dir, "directory of gt_<id>.txt files")->required();
  enc->add_option("--out-dir", encode.out_dir, "output directory")->required();
  enc->add_option("--image-height", encode.image_height, "input image height (default 720)");
  enc->add_option("--image-width", encode.image_width, "input image width (default 1280)");
  enc->add_option("--image-dir", encode.image_dir, "take image sizes from <id>.ppm/.pgm here");

  DecodeArgs decode_args;
  auto* dec = app.add_subcommand("decode", "turn pixel/link probability maps into oriented boxes");
  add_common(dec, common, true, false);
  dec->add_option("--pixel", decode_args.pixel, "pixel probability tensor (H x W or H x W x 2)");
  dec->add_option("--link", decode_args.link, "link probability tensor (H x W x 8 or H x W x 8 x 2)");
  dec->add_option("--out", decode_args.out, "detection file to write");
  dec->add_option("--input-dir", decode_args.input_dir, "batch mode: <id>.pixel.plnk + <id>.link.plnk");
  dec->add_option("--out-dir", decode_args.out_dir, "batch mode: writes res_<id>.txt");
  dec->add_option("--overlay", decode_args.overlay, "write a netpbm image with the boxes drawn");
  dec->add_option("--image", decode_args.image, "background image for --overlay");

  FuseArgs fuse;
  auto* fus = app.add_subcommand("fuse", "average prediction maps from several test scales");
  add_common(fus, common, false, false);
  fus->add_option("--pair", fuse.pairs, "PIXEL LINK tensor pair, one per scale")->required();
  fus->add_option("--out-pixel", fuse.out_pixel, "fused pixel map")->required();
  fus->add_option("--out-link", fuse.out_link, "fused link map")->required();

  LossArgs loss_args;
  auto* los = app.add_subcommand("loss", "evaluate the training loss for given logits and labels");
  add_common(los, common, false, true);
  los->add_option("--pixel-logits", loss_args.pixel_logits, "H x W x 2 logits")->required();
  los->add_option("--link-logits", loss_args.link_logits, "H x W x 8 x 2 logits")->required();
  los->add_option("--labels", loss_args.labels_prefix, "prefix of encode-gt outputs, e.g. out/img_1")->required();
  los->add_option("--weights-out", loss_args.weights_out, "write the final pixel weight matrix");

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "precision / recall / F-score against IC15-style ground truth");
  add_common(ev, common, false, false);
  ev->add_option("--gt-dir", eval_args.gt_dir, "gt_<id>.txt files")->required();
  ev->add_option("--det-dir", eval_args.det_dir, "res_<id>.txt files")->required();
  ev->add_option("--iou", eval_args.iou, "match threshold (default 0.5)");
  ev->add_option("--dontcare-tau", eval_args.dontcare_tau, "do-not-care coverage limit (default 0.5)");
  ev->add_flag("--per-image", eval_args.per_image, "print one line per image");

  AugmentArgs aug;
  auto* au = app.add_subcommand("augment", "rotate / crop / resize image and annotation pairs");
  add_common(au, common, false, false);
  au->add_option("--image", aug.image, "single input image (P5/P6)");
  au->add_option("--annot", aug.annot, "annotations for --image");
  au->add_option("--image-dir", aug.image_dir, "batch mode: <id>.ppm/.pgm");
  au->add_option("--annot-dir", aug.annot_dir, "batch mode: gt_<id>.txt");
  au->add_option("--out-dir", aug.out_dir, "output directory")->required();
  au->add_option("--count", aug.count, "samples per input (default 1)");
  au->add_option("--out-size", aug.out_size, "output side length (default 512)");
  au->add_option("--rotate-prob", aug.rotate_prob, "rotation probability (default 0.2)");

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "percentile thresholds over annotated boxes");
  add_common(st, common, false, false);
  st->add_option("--annot-dir", stats.annot_dir, "gt_<id>.txt files")->required();
  st->add_option("--feature", stats.feature, "short-side or area")->check(CLI::IsMember({"short-side", "area"}));
  st->add_option("--keep", stats.keep, "fraction of instances kept (default 0.99)");
  st->add_option("--scale", stats.scale, "scale applied to coordinates first (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc) return run_encode_gt(common, encode);
    if (*dec) return run_decode(common, decode_args);
    if (*fus) return run_fuse(common, fuse);
    if (*los) return run_loss(common, loss_args);
    if (*ev) return run_eval(common, eval_args);
    if (*au) return run_augment(common, aug);
    if (*st) return run_stats(common, stats);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
