#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pstereo/errors.hpp"
#include "pstereo/fields.hpp"
#include "pstereo/image.hpp"
#include "pstereo/metrics.hpp"

namespace pstereo {

// Decodes PNG (via libpng), binary PGM (P5) or binary PPM (P6), dispatching
// on the file's magic bytes. Throws IoError(missing_file/decode_failure).
Raster load_image(const std::string& path);

// Loads both images and converts to grayscale; sizes must match
// (IoError(dimension_mismatch) otherwise).
std::pair<GrayImage, GrayImage> load_stereo_pair(const std::string& left_path,
                                                 const std::string& right_path);

struct CalibrationFile {
  double focal_px = 0.0;
  double baseline_mm = 0.0;
  int width = 0;
  int height = 0;
};

// "key = value" text with focal_px, baseline_mm, width, height; '#' comments.
// Missing keys, unparsable or non-positive values throw ConfigError.
CalibrationFile load_calibration(const std::string& path);

// PFM, grayscale ("Pf"), scale -1.0 (little-endian), rows stored bottom to
// top. Invalid pixels are written as the sentinel value -1.
void write_pfm(const ScalarField& field, const std::string& path);

struct PfmImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, top to bottom (display order)
};

PfmImage read_pfm(const std::string& path);

// CSV with header frame,mean_err,median_err,valid_px,runtime_ms,coverage_rate.
// Numbers are written with shortest round-trip formatting, '.' decimal point
// regardless of locale; unavailable values are written as nan.
std::string metrics_csv_header();
std::string format_metrics_row(const FrameMetrics& row);
void write_metrics_csv(const std::vector<FrameMetrics>& rows,
                       const std::string& path);

std::vector<FrameMetrics> read_metrics_csv(const std::string& path);

}  // namespace pstereo
