#pragma once
// Frame export: binary 16-bit portable graymap (P5, maxval 65535, big-endian
// sample order). Pixel values are shifted to full 16-bit scale; the original
// sensor bit depth travels in a header comment so reads invert exactly.

#include "fogbench/scene.hpp"

#include <filesystem>
#include <string>

namespace fogbench::io {

std::string to_pgm(const scene::FrameBuffer& frame);

void write_pgm(const std::filesystem::path& path, const scene::FrameBuffer& frame);

scene::FrameBuffer parse_pgm(const std::string& data, const std::string& origin = "<memory>");

scene::FrameBuffer read_pgm(const std::filesystem::path& path);

} // namespace fogbench::io
