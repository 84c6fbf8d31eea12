#pragma once

// 8-bit grayscale images (binary PGM) and the non-overlapping patch matrix.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "outsense/types.hpp"

namespace outsense {

struct GrayImage {
  Index height = 0;
  Index width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t& at(Index y, Index x) { return pixels[static_cast<std::size_t>(y * width + x)]; }
  std::uint8_t at(Index y, Index x) const {
    return pixels[static_cast<std::size_t>(y * width + x)];
  }

  static GrayImage filled(Index height, Index width, std::uint8_t value);
};

// Binary P5 with maxval 255. Comments after '#' in the header are skipped.
GrayImage parse_pgm(std::string_view bytes);
std::string encode_pgm(const GrayImage& image);
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

// Column j of `matrix` is patch (j / grid_cols, j % grid_cols) in row-major
// patch order, vectorized by stacking the patch's pixel columns: pixel
// (dy, dx) of the patch lands at row dx * patch + dy. Pixel values are
// mapped to [0, 1] by dividing by 255. Trailing partial patches are dropped.
struct PatchGrid {
  Index image_height = 0;
  Index image_width = 0;
  Index patch = 10;
  Index grid_rows = 0;
  Index grid_cols = 0;
  Matrix matrix;  // patch^2 x (grid_rows * grid_cols)

  Index patch_count() const { return grid_rows * grid_cols; }
};

PatchGrid patch_matrix(const GrayImage& image, Index patch = 10);

// Inverse of patch_matrix on the covered region: a
// (grid_rows * patch) x (grid_cols * patch) array of [0, 1] values.
Matrix unpatch(const PatchGrid& grid);

// Same, for an arbitrary patch matrix laid out like `grid`.
Matrix unpatch(const PatchGrid& grid, const Matrix& columns);

}  // namespace outsense
