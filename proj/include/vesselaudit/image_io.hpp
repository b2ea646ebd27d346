#pragma once

#include <filesystem>

#include "vesselaudit/raster.hpp"
#include "vesselaudit/stratify.hpp"

namespace vaudit {

// Reads a mask from PNG or PGM/PPM. Grayscale values above 127 map to
// foreground; RGB images must have identical channels per pixel.
BinaryMask load_mask(const std::filesystem::path& path);

// Reads an 8- or 16-bit grayscale PNG or PGM as values scaled by the
// sample maximum (255 or 65535).
ProbabilityMap load_probability_map(const std::filesystem::path& path);

// Writers emit 0/255 grayscale. Format chosen by extension (.png/.pgm).
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

// 16-bit grayscale, value = round(p * 65535).
void save_probability_map(const ProbabilityMap& prob, const std::filesystem::path& path);

// Paletted PNG: background black, thin red, medium green, thick blue.
void save_stratum_png(const StratumLabels& labels, const std::filesystem::path& path);

}  // namespace vaudit
