#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pixellink/error.hpp"
#include "pixellink/geometry.hpp"
#include "pixellink/presets.hpp"
#include "pixellink/tensor.hpp"

namespace pixellink::cli {

/// Flat "key = value" file; '#' starts a comment. Later keys win.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Flag values given on the command line; unset fields fall back to the
/// config file, then to the preset.
struct Overrides {
  std::optional<std::string> preset;
  std::optional<std::string> resolution;
  std::optional<double> pixel_thresh;
  std::optional<double> link_thresh;
  std::optional<double> min_short_side;
  std::optional<double> min_area;
  std::optional<double> scale_back;
  std::optional<double> lambda;
  std::optional<double> neg_ratio;
  std::optional<std::uint64_t> seed;
};

PipelineConfig resolve_config(const Overrides& flags, const std::optional<std::filesystem::path>& config_file,
                              const std::string& default_preset = "ic15");

/// Exit status for a library error: 10 + numeric error code.
int exit_code_for(ErrorCode code);

/// Worker count from --jobs, else PIXELLINK_JOBS, else 1.
std::size_t resolve_jobs(std::optional<std::size_t> flag);

/// Runs fn(i) for i in [0, n) on `jobs` threads. If any call throws, the
/// exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Sorted regular files in `dir` whose name ends with `suffix`.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& suffix);

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// "x1,y1,...,x4,y4" per box, coordinates rounded to integers.
std::string format_boxes(const std::vector<geom::OrientedBox>& boxes);

void draw_box(ImageBuffer& img, const geom::OrientedBox& box);

/// Fixed-format number for text records: shortest form that round-trips.
std::string format_number(double v);

}  // namespace pixellink::cli
