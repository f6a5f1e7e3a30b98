#ifndef HSISR_IO_H_
#define HSISR_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsisr/endmembers.h"
#include "hsisr/raster.h"

namespace hsisr {

// Raster files come in pairs: <stem>.json holds
//   {"height","width","bands"|"channels","dtype":"f32","layout":"bip",
//    "value_range":[lo,hi]}
// and <stem>.raw holds little-endian float32 values, channel innermost.
// Every path argument below may name the stem, the .json or the .raw file.
struct RasterHeader {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::string channel_key = "channels";
  double range_lo = 0.0;
  double range_hi = 1.0;
};

std::filesystem::path raster_stem(const std::filesystem::path& path);
std::filesystem::path header_path(const std::filesystem::path& path);
std::filesystem::path payload_path(const std::filesystem::path& path);

RasterHeader read_raster_header(const std::filesystem::path& path);

// Cubes are rescaled to unit range on load: v' = (v - lo) / (hi - lo).
// save_cube writes value_range [0, 1], so a save/load cycle is the identity
// on float32-representable values.
SpectralCube load_cube(const std::filesystem::path& path);
void save_cube(const SpectralCube& cube, const std::filesystem::path& path);

// Abundances are stored as-is. value_range records the observed min/max and
// is informational only; least-squares abundances can leave [0, 1].
AbundanceMap load_abundance(const std::filesystem::path& path);
void save_abundance(const AbundanceMap& map, const std::filesystem::path& path);

// Comma-separated matrix, one row per line, no header.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const Eigen::MatrixXd& matrix,
                     const std::filesystem::path& path);

// Endmembers: M rows of L values.
EndmemberMatrix load_endmembers(const std::filesystem::path& path);
void save_endmembers(const EndmemberMatrix& endmembers,
                     const std::filesystem::path& path);

// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

// Little-endian float32 blobs. read_f32_file throws FormatError when the
// file does not hold exactly `count` finite values.
void write_f32_file(const std::filesystem::path& path,
                    std::span<const double> values);
std::vector<double> read_f32_file(const std::filesystem::path& path,
                                  std::size_t count);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hsisr

#endif  // HSISR_IO_H_
