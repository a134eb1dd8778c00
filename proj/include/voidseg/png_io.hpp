#pragma once

#include <string>

#include "voidseg/image.hpp"

namespace voidseg {

// Loads an 8-bit single-channel PNG. Anything else (RGB, palette, 16-bit,
// gray+alpha) is rejected with a hint to convert first; lossless round-trip
// with save_image is guaranteed.
GrayImage load_image(const std::string& path);
void save_image(const GrayImage& img, const std::string& path);

// Masks are stored as {0, 255} PNGs and held in memory as {0, 1}.
// load_mask validates that the file contains only the two legal values.
BinaryMask load_mask(const std::string& path);
void save_mask(const BinaryMask& mask, const std::string& path);

}  // namespace voidseg
