// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ndiscan/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <string>

#include "ndiscan/errors.hpp"

namespace ndi {
namespace {

void write_png(const std::filesystem::path& path, int height, int width, std::uint32_t format,
               const std::uint8_t* data) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
  if (!png_image_write_to_file(&img, path.c_str(), 0, data, 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot write PNG " + path.string() + ": " + msg);
  }
}

std::vector<std::uint8_t> read_png(const std::filesystem::path& path, std::uint32_t format,
                                   int& height, int& width) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!std::ifstream(path, std::ios::binary)) throw IoError("cannot open " + path.string());
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw ValidationError("cannot read PNG " + path.string() + ": " + img.message);
  }
  img.format = format;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ValidationError("cannot decode PNG " + path.string() + ": " + msg);
  }
  height = static_cast<int>(img.height);
  width = static_cast<int>(img.width);
  return data;
}

}  // namespace

void export_png(const GrayImage& image, const std::filesystem::path& path) {
  if (image.height < 1 || image.width < 1 ||
      image.pixels.size() != static_cast<std::size_t>(image.height) * image.width) {
    throw ValidationError("cannot export an empty or inconsistent image to " + path.string());
  }
  write_png(path, image.height, image.width, PNG_FORMAT_GRAY, image.pixels.data());
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  GrayImage image;
  image.pixels = read_png(path, PNG_FORMAT_GRAY, image.height, image.width);
  return image;
}

void write_png_rgb(const RgbImage& image, const std::filesystem::path& path) {
  if (image.height < 1 || image.width < 1) {
    throw ValidationError("cannot write an empty image to " + path.string());
  }
  write_png(path, image.height, image.width, PNG_FORMAT_RGB, image.pixels.data());
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
  RgbImage image;
  image.pixels = read_png(path, PNG_FORMAT_RGB, image.height, image.width);
  return image;
}

}  // namespace ndi
