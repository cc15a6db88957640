#include "cli_support.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pixellink/tensor_io.hpp"

namespace pixellink::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::ParseError, "config key '" + key + "': not a number: '" + v + "'");
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

PipelineConfig resolve_config(const Overrides& flags, const std::optional<std::filesystem::path>& config_file,
                              const std::string& default_preset) {
  std::map<std::string, std::string> file;
  if (config_file) file = read_config_file(*config_file);
  static const std::vector<std::string> known = {"preset",         "resolution", "pixel-thresh", "link-thresh",
                                                 "min-short-side", "min-area",   "scale-back",   "lambda",
                                                 "neg-ratio",      "seed"};
  for (const auto& [key, value] : file) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
    }
  }

  auto pick_str = [&](const std::optional<std::string>& flag, const char* key) -> std::optional<std::string> {
    if (flag) return flag;
    if (auto it = file.find(key); it != file.end()) return it->second;
    return std::nullopt;
  };
  auto pick_num = [&](const std::optional<double>& flag, const char* key) -> std::optional<double> {
    if (flag) return flag;
    if (auto it = file.find(key); it != file.end()) return to_double(key, it->second);
    return std::nullopt;
  };

  PipelineConfig cfg = preset(pick_str(flags.preset, "preset").value_or(default_preset));
  if (auto r = pick_str(flags.resolution, "resolution")) cfg.resolution = parse_resolution(*r);
  cfg.decode.scale_back = scale_of(cfg.resolution);
  if (auto v = pick_num(flags.pixel_thresh, "pixel-thresh")) cfg.decode.pixel_threshold = *v;
  if (auto v = pick_num(flags.link_thresh, "link-thresh")) cfg.decode.link_threshold = *v;
  if (auto v = pick_num(flags.min_short_side, "min-short-side")) cfg.decode.min_short_side = *v;
  if (auto v = pick_num(flags.min_area, "min-area")) cfg.decode.min_area = *v;
  if (auto v = pick_num(flags.scale_back, "scale-back")) cfg.decode.scale_back = *v;
  if (auto v = pick_num(flags.lambda, "lambda")) cfg.loss.lambda = *v;
  if (auto v = pick_num(flags.neg_ratio, "neg-ratio")) cfg.loss.neg_ratio = *v;
  if (flags.seed) {
    cfg.seed = *flags.seed;
  } else if (auto it = file.find("seed"); it != file.end()) {
    cfg.seed = std::stoull(it->second);
  }
  cfg.decode.validate();
  if (!(cfg.loss.lambda > 0) || !(cfg.loss.neg_ratio >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be > 0 and neg-ratio >= 0");
  }
  return cfg;
}

int exit_code_for(ErrorCode code) { return 10 + static_cast<int>(code); }

std::size_t resolve_jobs(std::optional<std::size_t> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("PIXELLINK_JOBS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return 1;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& suffix) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > suffix.size() && name.ends_with(suffix)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  io::write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string format_boxes(const std::vector<geom::OrientedBox>& boxes) {
  std::ostringstream os;
  for (const auto& b : boxes) {
    const auto vs = b.vertices();
    for (std::size_t i = 0; i < 4; ++i) {
      os << std::lround(vs[i].x) << ',' << std::lround(vs[i].y) << (i == 3 ? '\n' : ',');
    }
  }
  return os.str();
}

void draw_box(ImageBuffer& img, const geom::OrientedBox& box) {
  auto plot = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= static_cast<long>(img.width) || y >= static_cast<long>(img.height)) return;
    const auto ux = static_cast<std::size_t>(x), uy = static_cast<std::size_t>(y);
    if (img.channels == 3) {
      img.at(uy, ux, 0) = 255;
      img.at(uy, ux, 1) = 0;
      img.at(uy, ux, 2) = 0;
    } else {
      img.at(uy, ux) = 255;
    }
  };
  const auto vs = box.vertices();
  for (std::size_t i = 0; i < 4; ++i) {
    long x0 = std::lround(vs[i].x), y0 = std::lround(vs[i].y);
    const long x1 = std::lround(vs[(i + 1) % 4].x), y1 = std::lround(vs[(i + 1) % 4].y);
    const long dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    for (long err = dx + dy;;) {
      plot(x0, y0);
      if (x0 == x1 && y0 == y1) break;
      const long e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace pixellink::cli
