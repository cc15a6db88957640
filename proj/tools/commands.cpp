#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "pixellink/augment.hpp"
#include "pixellink/decoder.hpp"
#include "pixellink/eval.hpp"
#include "pixellink/fusion.hpp"
#include "pixellink/gt_encoder.hpp"
#include "pixellink/loss.hpp"
#include "pixellink/tensor_io.hpp"

namespace pixellink::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPixelSuffix = ".pixel.plnk";

std::optional<fs::path> find_image(const fs::path& dir, const std::string& id) {
  for (const char* ext : {".ppm", ".pgm"}) {
    auto p = dir / (id + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

std::string strip_suffix(const std::string& name, const std::string& suffix) {
  return name.substr(0, name.size() - suffix.size());
}

}  // namespace

int run_encode_gt(const Common& common, const EncodeGtArgs& args) {
  const auto cfg = resolve_config(common.overrides, common.config);
  const auto scale = static_cast<std::size_t>(scale_of(cfg.resolution));
  const auto files = list_files(args.annot_dir, ".txt");
  ensure_dir(args.out_dir);

  std::vector<std::string> summary(files.size());
  parallel_for(files.size(), resolve_jobs(common.jobs), [&](std::size_t i) {
    const auto id = eval::image_id(files[i]);
    std::size_t h = args.image_height, w = args.image_width;
    if (args.image_dir) {
      const auto img_path = find_image(*args.image_dir, id);
      if (!img_path) throw Error(ErrorCode::MissingPair, "no image for " + files[i].string());
      const auto img = io::load_netpbm(*img_path);
      h = img.height;
      w = img.width;
    }
    const std::size_t mh = ceil_div(h, scale), mw = ceil_div(w, scale);
    const auto annots = gt::scale_annotations(gt::load_annotations(files[i]), 1.0 / static_cast<double>(scale));
    const auto labels = gt::encode_labels(annots, mh, mw);
    const auto weights = gt::instance_weights(labels);

    const auto base = args.out_dir / id;
    io::save_tensor(labels.pixel_tensor(), fs::path(base.string() + kPixelSuffix));
    io::save_tensor(labels.link_tensor(), fs::path(base.string() + ".link.plnk"));
    io::save_tensor(labels.ignore_tensor(), fs::path(base.string() + ".ignore.plnk"));
    io::save_tensor(weights.weights.cast<float>(), fs::path(base.string() + ".weight.plnk"));
    summary[i] = id + ": " + std::to_string(mh) + "x" + std::to_string(mw) +
                 " instances=" + std::to_string(weights.stats.count) +
                 " positives=" + format_number(weights.stats.total_area);
  });
  for (const auto& line : summary) std::cout << line << '\n';
  return 0;
}

int run_decode(const Common& common, const DecodeArgs& args) {
  const auto cfg = resolve_config(common.overrides, common.config);

  struct Job {
    fs::path pixel, link, out;
  };
  std::vector<Job> jobs;
  if (args.input_dir) {
    if (!args.out_dir) throw Error(ErrorCode::InvalidArgument, "--input-dir requires --out-dir");
    ensure_dir(*args.out_dir);
    for (const auto& p : list_files(*args.input_dir, kPixelSuffix)) {
      const auto id = strip_suffix(p.filename().string(), kPixelSuffix);
      jobs.push_back({p, *args.input_dir / (id + ".link.plnk"), *args.out_dir / ("res_" + id + ".txt")});
    }
  } else {
    if (!args.pixel || !args.link || !args.out) {
      throw Error(ErrorCode::InvalidArgument, "need --pixel, --link and --out (or --input-dir/--out-dir)");
    }
    jobs.push_back({*args.pixel, *args.link, *args.out});
  }
  if (args.overlay && jobs.size() != 1) throw Error(ErrorCode::InvalidArgument, "--overlay needs single-image mode");

  std::vector<std::string> summary(jobs.size());
  parallel_for(jobs.size(), resolve_jobs(common.jobs), [&](std::size_t i) {
    const auto pixel = io::load_tensor(jobs[i].pixel);
    const auto link = io::load_tensor(jobs[i].link);
    const auto dets = decode::decode(pixel, link, cfg.decode);
    write_text_atomic(jobs[i].out, format_boxes(dets.boxes));
    summary[i] = jobs[i].out.filename().string() + ": boxes=" + std::to_string(dets.boxes.size()) +
                 " dropped=" + std::to_string(dets.dropped);

    if (args.overlay) {
      ImageBuffer canvas;
      if (args.image) {
        canvas = io::load_netpbm(*args.image);
      } else {
        const auto s = cfg.decode.scale_back;
        canvas = ImageBuffer(static_cast<std::size_t>(std::lround(pixel.dim(0) * s)),
                             static_cast<std::size_t>(std::lround(pixel.dim(1) * s)), 3);
      }
      for (const auto& b : dets.boxes) draw_box(canvas, b);
      io::save_netpbm(canvas, *args.overlay);
    }
  });
  for (const auto& line : summary) std::cout << line << '\n';
  return 0;
}

int run_fuse(const Common&, const FuseArgs& args) {
  std::vector<fusion::PredictionMaps> maps;
  for (const auto& [pixel, link] : args.pairs) maps.push_back({io::load_tensor(pixel), io::load_tensor(link)});
  const auto fused = fusion::fuse_multiscale(maps);
  io::save_tensor(fused.pixel, args.out_pixel);
  io::save_tensor(fused.link, args.out_link);
  std::cout << "fused " << maps.size() << " scales into " << fused.pixel.dim(0) << "x" << fused.pixel.dim(1) << '\n';
  return 0;
}

int run_loss(const Common& common, const LossArgs& args) {
  const auto cfg = resolve_config(common.overrides, common.config);
  const auto pixel_logits = io::load_tensor(args.pixel_logits).cast<double>();
  const auto link_logits = io::load_tensor(args.link_logits).cast<double>();
  const auto pixel = io::load_tensor(args.labels_prefix + kPixelSuffix);
  const auto link = io::load_tensor(args.labels_prefix + ".link.plnk");
  const auto ignore = io::load_tensor(args.labels_prefix + ".ignore.plnk");
  const auto weight = io::load_tensor(args.labels_prefix + ".weight.plnk").cast<double>();
  if (pixel.ndim() != 2 || link.dims() != std::vector<std::size_t>{pixel.dim(0), pixel.dim(1), gt::kNumLinks} ||
      ignore.dims() != pixel.dims()) {
    throw Error(ErrorCode::ShapeMismatch, "label tensors under " + args.labels_prefix + " disagree in shape");
  }

  gt::LabelMaps labels(pixel.dim(0), pixel.dim(1));
  for (std::size_t i = 0; i < pixel.size(); ++i) {
    labels.pixel_label[i] = pixel[i] >= 0.5f ? 1 : 0;
    labels.ignore_mask[i] = ignore[i] >= 0.5f ? 1 : 0;
  }
  for (std::size_t i = 0; i < link.size(); ++i) labels.link_label[i] = link[i] >= 0.5f ? 1 : 0;
  // Instances are the link-connected groups of positive pixels.
  decode::BinaryMaps binary{labels.height, labels.width, {}, labels.link_label};
  binary.pixel.resize(pixel.size());
  for (std::size_t i = 0; i < pixel.size(); ++i) binary.pixel[i] = labels.positive(i) ? 1 : 0;
  labels.instance_id = decode::link_components(binary).labels;

  const auto result = loss::total_loss(pixel_logits, link_logits, labels, weight, cfg.loss);
  if (args.weights_out) io::save_tensor(result.weights.cast<float>(), *args.weights_out);
  std::cout << "total=" << format_number(result.total) << " pixel=" << format_number(result.pixel)
            << " link_pos=" << format_number(result.link_pos) << " link_neg=" << format_number(result.link_neg)
            << '\n';
  return 0;
}

int run_eval(const Common&, const EvalArgs& args) {
  const auto result = eval::evaluate_dataset(args.gt_dir, args.det_dir, {args.iou, args.dontcare_tau});
  char buf[128];
  if (args.per_image) {
    for (const auto& img : result.images) {
      std::snprintf(buf, sizeof buf, "%s: P=%.6f, R=%.6f, F=%.6f (matches=%zu gt=%zu det=%zu)", img.id.c_str(),
                    img.metrics.precision, img.metrics.recall, img.metrics.fscore, img.metrics.matches,
                    img.metrics.num_gt, img.metrics.num_det);
      std::cout << buf << '\n';
    }
  }
  std::snprintf(buf, sizeof buf, "P=%.6f, R=%.6f, F=%.6f", result.total.precision, result.total.recall,
                result.total.fscore);
  std::cout << buf << '\n';
  return 0;
}

int run_augment(const Common& common, const AugmentArgs& args) {
  const auto cfg = resolve_config(common.overrides, common.config);
  augment::AugmentConfig aug;
  aug.out_size = args.out_size;
  aug.rotate_prob = args.rotate_prob;
  aug.validate();

  struct Pair {
    std::string id;
    fs::path image, annot;
  };
  std::vector<Pair> pairs;
  if (args.annot_dir) {
    if (!args.image_dir) throw Error(ErrorCode::InvalidArgument, "--annot-dir requires --image-dir");
    for (const auto& a : list_files(*args.annot_dir, ".txt")) {
      const auto id = eval::image_id(a);
      const auto img = find_image(*args.image_dir, id);
      if (!img) throw Error(ErrorCode::MissingPair, "no image for " + a.string());
      pairs.push_back({id, *img, a});
    }
  } else {
    if (!args.image || !args.annot) throw Error(ErrorCode::InvalidArgument, "need --image and --annot");
    pairs.push_back({args.image->stem().string(), *args.image, *args.annot});
  }
  ensure_dir(args.out_dir);

  parallel_for(pairs.size(), resolve_jobs(common.jobs), [&](std::size_t i) {
    const augment::Sample src{io::load_netpbm(pairs[i].image), gt::load_annotations(pairs[i].annot)};
    augment::RngStream rng(cfg.seed + i);
    for (std::size_t c = 0; c < args.count; ++c) {
      const auto out = augment::augment_sample(src, rng, aug);
      const auto stem = pairs[i].id + "_aug" + std::to_string(c);
      io::save_netpbm(out.image, args.out_dir / (stem + (out.image.channels == 1 ? ".pgm" : ".ppm")));
      write_text_atomic(args.out_dir / ("gt_" + stem + ".txt"), gt::format_annotations(out.annots));
    }
  });
  std::cout << "wrote " << pairs.size() * args.count << " samples\n";
  return 0;
}

int run_stats(const Common&, const StatsArgs& args) {
  if (args.feature != "short-side" && args.feature != "area") {
    throw Error(ErrorCode::InvalidArgument, "--feature must be short-side or area");
  }
  std::vector<double> values;
  for (const auto& f : list_files(args.annot_dir, ".txt")) {
    for (const auto& a : gt::load_annotations(f)) {
      if (a.dont_care) continue;
      const auto box = geom::min_area_rect(a.quad).scaled(args.scale);
      values.push_back(args.feature == "area" ? box.area() : box.short_side());
    }
  }
  const double t = decode::percentile_threshold(values, args.keep);
  std::cout << "feature=" << args.feature << " keep=" << format_number(args.keep) << " count=" << values.size()
            << " threshold=" << format_number(t) << '\n';
  return 0;
}

}  // namespace pixellink::cli
