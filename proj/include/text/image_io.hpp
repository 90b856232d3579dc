#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "text/image.hpp"

namespace text {

/// Extensions accepted as page images (lower-case, with dot).
bool is_supported_image(const std::filesystem::path& path);

/// Decode an image file to 8-bit luminance. Color inputs are converted with
/// Y = 0.299 R + 0.587 G + 0.114 B, rounded to nearest. 16-bit inputs are
/// reduced to 8 bits first. Throws Error{UnreadableImage}.
Gray8Image read_gray8(const std::filesystem::path& path);

/// Write 8-bit PNG. Throws Error{IoFailure}.
void write_png(const std::filesystem::path& path, const Gray8Image& img);
std::vector<unsigned char> encode_png(const Gray8Image& img);

/// Quantize [0,1] luminance to 8 bits (clipped, rounded).
Gray8Image to_gray8(const GrayImage& img);
/// Same, inverted so that bright (ink) values render dark on white paper.
Gray8Image to_gray8_inverted(const GrayImage& img);
/// Ink = 0 (black), background = 255.
Gray8Image binary_to_gray8(const BinaryImage& img);
GrayImage to_unit(const Gray8Image& img);

}  // namespace text
