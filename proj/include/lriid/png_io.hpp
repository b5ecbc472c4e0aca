#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace lriid {

// 8-bit RGB PNG from three [0,1] channels of size height*width.
void save_png_rgb(const std::filesystem::path& path, int height, int width,
                  const std::array<std::vector<double>, 3>& channels);

}  // namespace lriid
