// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cxrt/grid.hpp"

namespace cxrt {

/// A decoded 8-bit grayscale raster plus any textual header entries found in the file.
struct DecodedImage {
  Gray8 pixels;
  std::map<std::string, std::string> header;
};

/// Decodes PNG (any bit depth / color type, reduced to 8-bit gray). Throws DataError.
DecodedImage decode_png(std::span<const std::uint8_t> bytes);
/// Decodes baseline/progressive JPEG to 8-bit gray. Throws DataError.
DecodedImage decode_jpeg(std::span<const std::uint8_t> bytes);

/// huffman: entropy-coded, fast. stored: deflate level 0, larger files, near memcpy speed.
enum class PngCompression { huffman, stored };

std::vector<std::uint8_t> encode_png(const Gray8& image,
                                     const std::map<std::string, std::string>& text = {},
                                     PngCompression mode = PngCompression::huffman);
std::vector<std::uint8_t> encode_png(const RgbImage& image, PngCompression mode = PngCompression::huffman);

/// Rounds v*255 after clamping to [0,1].
Gray8 to_gray8(const Image& image);
/// v/255.
Image from_gray8(const Gray8& image);

}  // namespace cxrt
