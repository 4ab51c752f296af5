#include "pstereo/io.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pstereo/kv.hpp"

static_assert(std::endian::native == std::endian::little,
              "PFM writer assumes a little-endian host");

namespace pstereo {

// ---------------------------------------------------------------------------
// key = value files

const std::string* KvFile::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KvFile parse_kv_text(const std::string& text, const std::string& origin) {
  KvFile kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (kv.has(key)) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    kv.entries.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KvFile load_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoErrorKind::missing_file, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str(), path);
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("key '" + key + "': cannot parse '" + text +
                      "' as a number");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw ConfigError("key '" + key + "': cannot parse '" + text +
                      "' as an integer");
  return v;
}

}  // namespace

double kv_double(const KvFile& kv, const std::string& key) {
  const std::string* v = kv.find(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  return parse_double(key, *v);
}

double kv_double_or(const KvFile& kv, const std::string& key,
                    double fallback) {
  const std::string* v = kv.find(key);
  return v ? parse_double(key, *v) : fallback;
}

long long kv_int(const KvFile& kv, const std::string& key) {
  const std::string* v = kv.find(key);
  if (!v) throw ConfigError("missing key '" + key + "'");
  return parse_int(key, *v);
}

long long kv_int_or(const KvFile& kv, const std::string& key,
                    long long fallback) {
  const std::string* v = kv.find(key);
  return v ? parse_int(key, *v) : fallback;
}

std::string kv_string_or(const KvFile& kv, const std::string& key,
                         const std::string& fallback) {
  const std::string* v = kv.find(key);
  return v ? *v : fallback;
}

// ---------------------------------------------------------------------------
// image loading

namespace {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::missing_file, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

// Binary PGM (P5) / PPM (P6), 8-bit only.
Raster decode_pnm(const std::string& path,
                  const std::vector<std::uint8_t>& bytes) {
  auto fail = [&](const std::string& why) -> Raster {
    throw IoError(IoErrorKind::decode_failure, path + ": " + why);
  };
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      const char ch = char(bytes[pos]);
      if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  };

  const std::string magic = next_token();
  const int channels = magic == "P5" ? 1 : magic == "P6" ? 3 : 0;
  if (channels == 0) return fail("not a binary PGM/PPM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    return fail("malformed header");
  }
  if (w <= 0 || h <= 0) return fail("bad dimensions");
  if (maxval <= 0 || maxval > 255) return fail("only 8-bit samples supported");
  ++pos;  // single whitespace after maxval
  const std::size_t need = std::size_t(w) * h * channels;
  if (bytes.size() < pos + need) return fail("truncated pixel data");

  Raster r;
  r.width = w;
  r.height = h;
  r.channels = channels;
  r.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
  return r;
}

Raster decode_png(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError(IoErrorKind::missing_file, "cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(f);
    throw IoError(IoErrorKind::decode_failure, path + ": libpng init failed");
  }

  Raster r;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(f);
    throw IoError(IoErrorKind::decode_failure, path + ": PNG decode failed");
  }

  png_init_io(png, f);
  png_read_info(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_strip_16(png);
  png_read_update_info(png, info);
  if (png_get_channels(png, info) == 2) {  // gray+alpha -> RGBA
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
  }

  r.width = int(png_get_image_width(png, info));
  r.height = int(png_get_image_height(png, info));
  r.channels = int(png_get_channels(png, info));
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  r.pixels.resize(rowbytes * r.height);
  rows.resize(r.height);
  for (int y = 0; y < r.height; ++y)
    rows[std::size_t(y)] = r.pixels.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(f);
  return r;
}

}  // namespace

Raster load_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  if (bytes.size() >= 8 && !png_sig_cmp(bytes.data(), 0, 8))
    return decode_png(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '6'))
    return decode_pnm(path, bytes);
  throw IoError(IoErrorKind::decode_failure,
                path + ": unrecognized image format (PNG/PGM/PPM supported)");
}

std::pair<GrayImage, GrayImage> load_stereo_pair(
    const std::string& left_path, const std::string& right_path) {
  GrayImage left = to_grayscale(load_image(left_path));
  GrayImage right = to_grayscale(load_image(right_path));
  if (left.width != right.width || left.height != right.height) {
    throw IoError(IoErrorKind::dimension_mismatch,
                  left_path + " is " + std::to_string(left.width) + "x" +
                      std::to_string(left.height) + " but " + right_path +
                      " is " + std::to_string(right.width) + "x" +
                      std::to_string(right.height));
  }
  return {std::move(left), std::move(right)};
}

CalibrationFile load_calibration(const std::string& path) {
  const KvFile kv = load_kv_file(path);
  CalibrationFile cal;
  cal.focal_px = kv_double(kv, "focal_px");
  cal.baseline_mm = kv_double(kv, "baseline_mm");
  cal.width = int(kv_int(kv, "width"));
  cal.height = int(kv_int(kv, "height"));
  if (!(cal.focal_px > 0.0))
    throw ConfigError(path + ": focal_px must be positive");
  if (!(cal.baseline_mm > 0.0))
    throw ConfigError(path + ": baseline_mm must be positive");
  if (cal.width <= 0 || cal.height <= 0)
    throw ConfigError(path + ": width/height must be positive");
  return cal;
}

// ---------------------------------------------------------------------------
// PFM

void write_pfm(const ScalarField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoErrorKind::write_failure, "cannot write " + path);
  out << "Pf\n" << field.width << " " << field.height << "\n-1.0\n";
  std::vector<float> row(std::size_t(field.width));
  for (int y = field.height - 1; y >= 0; --y) {  // bottom-to-top storage
    for (int x = 0; x < field.width; ++x)
      row[std::size_t(x)] =
          field.valid_at(x, y) ? float(field.at(x, y)) : -1.0f;
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw IoError(IoErrorKind::write_failure, "write failed: " + path);
}

PfmImage read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::missing_file, "cannot open " + path);
  auto fail = [&](const std::string& why) -> PfmImage {
    throw IoError(IoErrorKind::decode_failure, path + ": " + why);
  };
  std::string magic;
  in >> magic;
  if (magic != "Pf") return fail("not a grayscale PFM");
  int w = 0, h = 0;
  double scale = 0.0;
  in >> w >> h >> scale;
  if (!in || w <= 0 || h <= 0) return fail("malformed header");
  if (!(scale < 0.0)) return fail("big-endian PFM unsupported");
  in.get();  // the single whitespace byte before the data block

  PfmImage img;
  img.width = w;
  img.height = h;
  img.values.resize(std::size_t(w) * h);
  std::vector<float> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            std::streamsize(row.size() * sizeof(float)));
    if (!in) return fail("truncated pixel data");
    std::memcpy(img.values.data() + std::size_t(y) * w, row.data(),
                row.size() * sizeof(float));
  }
  return img;
}

// ---------------------------------------------------------------------------
// metrics CSV

namespace {

constexpr char kCsvHeader[] =
    "frame,mean_err,median_err,valid_px,runtime_ms,coverage_rate";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_csv_double(const std::string& cell, const std::string& path) {
  if (cell == "nan" || cell == "-nan")
    return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw IoError(IoErrorKind::decode_failure,
                  path + ": bad numeric cell '" + cell + "'");
  }
}

}  // namespace

std::string metrics_csv_header() { return kCsvHeader; }

std::string format_metrics_row(const FrameMetrics& m) {
  std::string row = m.frame;
  row += ',';
  row += format_double(m.mean_err);
  row += ',';
  row += format_double(m.median_err);
  row += ',';
  row += std::to_string(m.valid_px);
  row += ',';
  row += format_double(m.runtime_ms);
  row += ',';
  row += format_double(m.coverage_rate);
  return row;
}

void write_metrics_csv(const std::vector<FrameMetrics>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoErrorKind::write_failure, "cannot write " + path);
  out << kCsvHeader << "\n";
  for (const FrameMetrics& m : rows) out << format_metrics_row(m) << "\n";
  if (!out) throw IoError(IoErrorKind::write_failure, "write failed: " + path);
}

std::vector<FrameMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::missing_file, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw IoError(IoErrorKind::decode_failure,
                  path + ": missing metrics header");
  }
  std::vector<FrameMetrics> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cells.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (cells.size() != 6) {
      throw IoError(IoErrorKind::decode_failure,
                    path + ": expected 6 cells, got " +
                        std::to_string(cells.size()));
    }
    FrameMetrics m;
    m.frame = cells[0];
    m.mean_err = parse_csv_double(cells[1], path);
    m.median_err = parse_csv_double(cells[2], path);
    try {
      m.valid_px = parse_int("valid_px", cells[3]);
    } catch (const ConfigError& e) {
      throw IoError(IoErrorKind::decode_failure, path + ": " + e.what());
    }
    m.runtime_ms = parse_csv_double(cells[4], path);
    m.coverage_rate = parse_csv_double(cells[5], path);
    m.has_errors = !std::isnan(m.mean_err);
    rows.push_back(std::move(m));
  }
  return rows;
}

}  // namespace pstereo
