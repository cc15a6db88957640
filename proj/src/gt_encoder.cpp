#include "pixellink/gt_encoder.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pixellink/tensor_io.hpp"

namespace pixellink::gt {

namespace {

constexpr std::string_view kDontCare = "###";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_coord(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": bad coordinate '" + std::string(field) + "'");
  }
  return v;
}

Tensor bytes_to_tensor(const std::vector<std::uint8_t>& v, std::vector<std::size_t> dims) {
  return Tensor(std::move(dims), std::vector<float>(v.begin(), v.end()));
}

}  // namespace

std::vector<Annotation> parse_annotations(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Annotation> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    line = trim(line);
    if (line.empty()) continue;

    Annotation a;
    std::array<double, 8> c{};
    for (std::size_t i = 0; i < 8; ++i) {
      const auto comma = line.find(',');
      if (comma == std::string_view::npos && i < 7) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 8 coordinates, got " +
                                               std::to_string(i + 1));
      }
      c[i] = parse_coord(line.substr(0, comma), line_no);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    for (std::size_t i = 0; i < 4; ++i) a.quad[i] = {c[2 * i], c[2 * i + 1]};
    a.transcription = std::string(trim(line));
    a.dont_care = a.transcription == kDontCare;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return parse_annotations(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_annotations(const std::vector<Annotation>& annots) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& a : annots) {
    for (const auto& p : a.quad) os << p.x << ',' << p.y << ',';
    os << (a.excluded() ? std::string(kDontCare) : a.transcription) << '\n';
  }
  return os.str();
}

std::vector<Annotation> scale_annotations(const std::vector<Annotation>& annots, double factor) {
  if (!(factor > 0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  auto out = annots;
  for (auto& a : out) {
    for (auto& p : a.quad) p = p * factor;
  }
  return out;
}

LabelMaps::LabelMaps(std::size_t h, std::size_t w)
    : height(h),
      width(w),
      pixel_label(h * w, 0),
      instance_id(h * w, 0),
      ignore_mask(h * w, 0),
      link_label(h * w * kNumLinks, 0) {}

Tensor LabelMaps::pixel_tensor() const { return bytes_to_tensor(pixel_label, {height, width}); }
Tensor LabelMaps::link_tensor() const { return bytes_to_tensor(link_label, {height, width, kNumLinks}); }
Tensor LabelMaps::ignore_tensor() const { return bytes_to_tensor(ignore_mask, {height, width}); }
Tensor LabelMaps::instance_tensor() const {
  return Tensor({height, width}, std::vector<float>(instance_id.begin(), instance_id.end()));
}

void compute_link_labels(LabelMaps& labels) {
  const auto h = static_cast<long>(labels.height);
  const auto w = static_cast<long>(labels.width);
  std::fill(labels.link_label.begin(), labels.link_label.end(), 0);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const auto i = labels.index(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
      if (!labels.positive(i)) continue;
      for (std::size_t k = 0; k < kNumLinks; ++k) {
        const long nx = x + kNeighborOffsets[k][0];
        const long ny = y + kNeighborOffsets[k][1];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto j = labels.index(static_cast<std::size_t>(ny), static_cast<std::size_t>(nx));
        if (labels.positive(j) && labels.instance_id[j] == labels.instance_id[i]) {
          labels.link_label[i * kNumLinks + k] = 1;
        }
      }
    }
  }
}

LabelMaps encode_labels(const std::vector<Annotation>& annots, std::size_t height, std::size_t width) {
  LabelMaps labels(height, width);
  std::vector<std::uint16_t> cover(height * width, 0);

  for (std::size_t a = 0; a < annots.size(); ++a) {
    Tensor mask;
    try {
      mask = geom::rasterize_polygon(
          geom::Polygon(std::vector<geom::Point>(annots[a].quad.begin(), annots[a].quad.end())), height, width);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Degenerate) throw;
      continue;  // collapsed quad covers no pixel centers
    }
    const auto id = static_cast<std::int32_t>(a + 1);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i] == 0.0f) continue;
      if (cover[i] < UINT16_MAX) ++cover[i];
      if (annots[a].excluded()) {
        labels.ignore_mask[i] = 1;
      } else {
        labels.instance_id[i] = id;
      }
    }
  }

  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover[i] == 1 && labels.ignore_mask[i] == 0 && labels.instance_id[i] > 0) {
      labels.pixel_label[i] = 1;
    } else {
      labels.instance_id[i] = 0;
    }
  }
  compute_link_labels(labels);
  return labels;
}

InstanceWeights instance_weights(const LabelMaps& labels) {
  InstanceWeights out{TensorD({labels.height, labels.width}, 0.0), {}};
  auto& st = out.stats;

  std::int32_t max_id = 0;
  for (auto id : labels.instance_id) max_id = std::max(max_id, id);
  st.areas.assign(static_cast<std::size_t>(max_id), 0.0);
  for (std::size_t i = 0; i < labels.pixel_label.size(); ++i) {
    if (labels.positive(i) && labels.instance_id[i] > 0) st.areas[labels.instance_id[i] - 1] += 1.0;
  }
  for (double s : st.areas) {
    if (s > 0) {
      ++st.count;
      st.total_area += s;
    }
  }
  if (st.count == 0) return out;
  st.budget = st.total_area / static_cast<double>(st.count);

  for (std::size_t i = 0; i < labels.pixel_label.size(); ++i) {
    if (labels.positive(i) && labels.instance_id[i] > 0) {
      out.weights[i] = st.budget / st.areas[labels.instance_id[i] - 1];
    }
  }
  return out;
}

}  // namespace pixellink::gt
