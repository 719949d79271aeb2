#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mvqc/image.hpp"

namespace mvqc {

/// Decodes a PGM (P2/P5) or PPM (P3/P6) file held in memory. Color input is
/// reduced to gray with luma weights 0.299/0.587/0.114, rounded to nearest.
/// Throws ParseError naming the byte offset of the first problem.
GrayImage load_image(std::string_view bytes);

/// Reads and decodes an image file.
GrayImage read_image(const std::filesystem::path& path);

/// Binary PGM: "P5\n<w> <h>\n255\n" followed by the raw bytes.
std::string encode_pgm(const GrayImage& img);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Renders a mask as ink on paper: foreground 0, background 255.
GrayImage mask_to_gray(const BinaryImage& mask);

}  // namespace mvqc
