// SPDX-License-Identifier: Apache-2.0
#include "cxrt/image_io.hpp"

#include <png.h>
#include <zlib.h>
// jpeglib.h needs FILE and size_t declared first.
#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include "cxrt/error.hpp"

namespace cxrt {

namespace {

struct PngSource {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->offset + n > src->data.size()) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->data.data() + src->offset, n);
  src->offset += n;
}

void png_write_to_vector(png_structp png, png_bytep in, png_size_t n) {
  auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  sink->insert(sink->end(), in, in + n);
}

void png_flush_noop(png_structp) {}

void png_warning_silent(png_structp, png_const_charp) {}

std::vector<std::uint8_t> write_png(int rows, int cols, int color_type, const std::uint8_t* pixels,
                                    int channels, const std::map<std::string, std::string>& text,
                                    PngCompression mode) {
  std::vector<std::uint8_t> sink;
  sink.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(channels) +
               static_cast<std::size_t>(rows) * 2 + 4096);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
  if (png == nullptr) throw Error(ErrorKind::internal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(rows));
  std::vector<png_text> chunks;
  chunks.reserve(text.size());
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("PNG encode failed");
  }
  png_set_write_fn(png, &sink, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (mode == PngCompression::stored) {
    png_set_compression_level(png, 0);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  } else {
    png_set_compression_level(png, 1);
    png_set_compression_strategy(png, Z_HUFFMAN_ONLY);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
  }
  for (const auto& [key, value] : text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char*>(key.c_str());
    t.text = const_cast<char*>(value.c_str());
    t.text_length = value.size();
    chunks.push_back(t);
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  for (int r = 0; r < rows; ++r) {
    row_ptrs[static_cast<std::size_t>(r)] =
        const_cast<png_bytep>(pixels + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) * channels);
  }
  png_set_rows(png, info, row_ptrs.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return sink;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit_longjmp(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_output_silent(j_common_ptr) {}

}  // namespace

DecodedImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw DataError("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
  if (png == nullptr) throw Error(ErrorKind::internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngSource source{bytes, 0};
  std::vector<png_byte> buffer;
  std::vector<png_bytep> row_ptrs;
  DecodedImage out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("PNG decode failed");
  }
  png_set_read_fn(png, &source, png_read_from_span);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (bit_depth == 16) png_set_scale_16(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  if ((color_type & PNG_COLOR_MASK_COLOR) != 0) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  const auto rowbytes = png_get_rowbytes(png, info);
  if (png_get_channels(png, info) != 1 || rowbytes != width) png_error(png, "unexpected PNG layout");
  buffer.resize(static_cast<std::size_t>(rowbytes) * height);
  row_ptrs.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = buffer.data() + static_cast<std::size_t>(r) * rowbytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, info);

  png_textp text = nullptr;
  int num_text = 0;
  png_get_text(png, info, &text, &num_text);
  for (int i = 0; i < num_text; ++i) {
    out.header[text[i].key] = std::string(text[i].text, text[i].text_length);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  out.pixels = Gray8(static_cast<int>(height), static_cast<int>(width), std::move(buffer));
  return out;
}

DecodedImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 3 || bytes[0] != 0xFF || bytes[1] != 0xD8) throw DataError("not a JPEG stream");
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  std::vector<std::uint8_t> buffer;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit_longjmp;
  err.base.output_message = jpeg_output_silent;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DataError(std::string("JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);
  const auto width = cinfo.output_width;
  const auto height = cinfo.output_height;
  buffer.resize(static_cast<std::size_t>(width) * height);
  while (cinfo.output_scanline < height) {
    JSAMPROW row = buffer.data() + static_cast<std::size_t>(cinfo.output_scanline) * width;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  DecodedImage out;
  out.pixels = Gray8(static_cast<int>(height), static_cast<int>(width), std::move(buffer));
  return out;
}

std::vector<std::uint8_t> encode_png(const Gray8& image, const std::map<std::string, std::string>& text,
                                     PngCompression mode) {
  if (image.empty()) throw DataError("cannot encode empty image");
  return write_png(image.rows(), image.cols(), PNG_COLOR_TYPE_GRAY, image.values().data(), 1, text, mode);
}

std::vector<std::uint8_t> encode_png(const RgbImage& image, PngCompression mode) {
  if (image.rows <= 0 || image.cols <= 0) throw DataError("cannot encode empty image");
  return write_png(image.rows, image.cols, PNG_COLOR_TYPE_RGB, image.rgb.data(), 3, {}, mode);
}

Gray8 to_gray8(const Image& image) {
  Gray8 out(image.rows(), image.cols());
  auto src = image.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = src[i];
    dst[i] = !(v > 0.0) ? 0 : v >= 1.0 ? 255 : static_cast<std::uint8_t>(v * 255.0 + 0.5);
  }
  return out;
}

Image from_gray8(const Gray8& image) {
  Image out(image.rows(), image.cols());
  auto src = image.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / 255.0;
  return out;
}

}  // namespace cxrt
