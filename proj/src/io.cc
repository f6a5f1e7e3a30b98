#include "hsisr/io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "hsisr/error.h"

namespace hsisr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const void* data, std::size_t bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

std::size_t key_offset(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : pos;
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) |
        (v >> 24);
  }
  return v;
}

RasterHeader parse_header(const fs::path& file) {
  const std::string text = read_file(file);
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(file.string(), e.byte, "invalid JSON header");
  }
  if (!j.is_object()) throw FormatError(file.string(), 0, "header is not an object");

  const std::string name = file.string();
  auto require_int = [&](const std::string& key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw FormatError(name, key_offset(text, key),
                        "missing or non-integer \"" + key + "\"");
    }
    const auto v = j[key].get<std::int64_t>();
    if (v < 1 || v > std::numeric_limits<int>::max()) {
      throw FormatError(name, key_offset(text, key),
                        "\"" + key + "\" must be a positive integer");
    }
    return static_cast<int>(v);
  };

  RasterHeader h;
  h.height = require_int("height");
  h.width = require_int("width");
  if (j.contains("bands")) {
    h.channel_key = "bands";
  } else if (j.contains("channels")) {
    h.channel_key = "channels";
  } else {
    throw FormatError(name, 0, "header needs \"bands\" or \"channels\"");
  }
  h.channels = require_int(h.channel_key);

  if (!j.contains("dtype") || j["dtype"] != "f32") {
    throw FormatError(name, key_offset(text, "dtype"), "dtype must be \"f32\"");
  }
  if (!j.contains("layout") || j["layout"] != "bip") {
    throw FormatError(name, key_offset(text, "layout"), "layout must be \"bip\"");
  }
  if (j.contains("value_range")) {
    const auto& r = j["value_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
        !r[1].is_number()) {
      throw FormatError(name, key_offset(text, "value_range"),
                        "value_range must be [lo, hi]");
    }
    h.range_lo = r[0].get<double>();
    h.range_hi = r[1].get<double>();
    if (!std::isfinite(h.range_lo) || !std::isfinite(h.range_hi) ||
        h.range_lo > h.range_hi) {
      throw FormatError(name, key_offset(text, "value_range"),
                        "value_range must be finite with lo <= hi");
    }
  }
  return h;
}

std::vector<double> read_payload(const fs::path& file, const RasterHeader& h) {
  return read_f32_file(file,
                       static_cast<std::size_t>(h.height) * h.width * h.channels);
}

void write_raster(const fs::path& path, int height, int width, int channels,
                  std::span<const double> values, const std::string& channel_key,
                  double lo, double hi) {
  ordered_json j;
  j["height"] = height;
  j["width"] = width;
  j[channel_key] = channels;
  j["dtype"] = "f32";
  j["layout"] = "bip";
  j["value_range"] = {lo, hi};
  write_text_file(header_path(path), j.dump(2) + "\n");
  write_f32_file(payload_path(path), values);
}

}  // namespace

std::vector<double> read_f32_file(const fs::path& file, std::size_t count) {
  const std::string bytes = read_file(file);
  const std::size_t expected = count * sizeof(float);
  if (bytes.size() != expected) {
    throw FormatError(file.string(), std::min(bytes.size(), expected),
                      "payload holds " + std::to_string(bytes.size()) +
                          " bytes, header declares " + std::to_string(count) +
                          " float32 values (" + std::to_string(expected) +
                          " bytes)");
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t word;
    std::memcpy(&word, bytes.data() + i * sizeof(float), sizeof(word));
    const float f = std::bit_cast<float>(to_little_endian(word));
    if (!std::isfinite(f)) {
      throw FormatError(file.string(), i * sizeof(float), "non-finite value");
    }
    values[i] = static_cast<double>(f);
  }
  return values;
}

void write_f32_file(const fs::path& path, std::span<const double> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    words[i] = to_little_endian(
        std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
  }
  write_file(path, words.data(), words.size() * sizeof(float));
}

std::string read_text_file(const fs::path& path) { return read_file(path); }

void write_text_file(const fs::path& path, const std::string& text) {
  write_file(path, text.data(), text.size());
}

fs::path raster_stem(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".json" || ext == ".raw") {
    fs::path stem = path;
    stem.replace_extension();
    return stem;
  }
  return path;
}

fs::path header_path(const fs::path& path) {
  fs::path p = raster_stem(path);
  p += ".json";
  return p;
}

fs::path payload_path(const fs::path& path) {
  fs::path p = raster_stem(path);
  p += ".raw";
  return p;
}

RasterHeader read_raster_header(const fs::path& path) {
  return parse_header(header_path(path));
}

SpectralCube load_cube(const fs::path& path) {
  const RasterHeader h = read_raster_header(path);
  if (!(h.range_hi > h.range_lo)) {
    throw FormatError(header_path(path).string(), 0,
                      "cube value_range must satisfy lo < hi");
  }
  std::vector<double> values = read_payload(payload_path(path), h);
  if (h.range_lo != 0.0 || h.range_hi != 1.0) {
    const double span = h.range_hi - h.range_lo;
    for (double& v : values) v = (v - h.range_lo) / span;
  }
  return SpectralCube(h.height, h.width, h.channels, std::move(values));
}

void save_cube(const SpectralCube& cube, const fs::path& path) {
  write_raster(path, cube.height(), cube.width(), cube.channels(), cube.data(),
               "bands", 0.0, 1.0);
}

AbundanceMap load_abundance(const fs::path& path) {
  const RasterHeader h = read_raster_header(path);
  return AbundanceMap(h.height, h.width, h.channels,
                      read_payload(payload_path(path), h));
}

void save_abundance(const AbundanceMap& map, const fs::path& path) {
  const auto [lo, hi] = std::minmax_element(map.data().begin(), map.data().end());
  write_raster(path, map.height(), map.width(), map.channels(), map.data(),
               "channels", static_cast<double>(static_cast<float>(*lo)),
               static_cast<double>(static_cast<float>(*hi)));
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd load_matrix_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const std::string name = path.string();
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::size_t line_end = eol;
    if (line_end > pos && text[line_end - 1] == '\r') --line_end;
    if (line_end > pos) {
      std::vector<double> row;
      std::size_t field = pos;
      while (true) {
        std::size_t comma = text.find(',', field);
        if (comma == std::string::npos || comma > line_end) comma = line_end;
        std::size_t b = field;
        std::size_t e = comma;
        while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
        while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
        double value = 0.0;
        const auto res = std::from_chars(text.data() + b, text.data() + e, value);
        if (b == e || res.ec != std::errc() || res.ptr != text.data() + e) {
          throw FormatError(name, b, "expected a decimal number");
        }
        if (!std::isfinite(value)) throw FormatError(name, b, "non-finite value");
        row.push_back(value);
        if (comma == line_end) break;
        field = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw FormatError(name, pos,
                          "row has " + std::to_string(row.size()) +
                              " values, expected " +
                              std::to_string(rows.front().size()));
      }
      rows.push_back(std::move(row));
    }
    pos = eol + 1;
  }
  if (rows.empty()) throw FormatError(name, 0, "empty matrix file");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void save_matrix_csv(const Eigen::MatrixXd& matrix, const fs::path& path) {
  std::string text;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) text += ',';
      text += format_double(matrix(r, c));
    }
    text += '\n';
  }
  write_file(path, text.data(), text.size());
}

EndmemberMatrix load_endmembers(const fs::path& path) {
  return EndmemberMatrix(load_matrix_csv(path));
}

void save_endmembers(const EndmemberMatrix& endmembers, const fs::path& path) {
  save_matrix_csv(endmembers.spectra(), path);
}

}  // namespace hsisr
