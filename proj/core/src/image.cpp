#include "outsense/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "outsense/error.hpp"

namespace outsense {

GrayImage GrayImage::filled(Index height, Index width, std::uint8_t value) {
  require(height >= 0 && width >= 0, "image dimensions must be nonnegative");
  GrayImage img;
  img.height = height;
  img.width = width;
  img.pixels.assign(static_cast<std::size_t>(height * width), value);
  return img;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space_and_comments();
    long value = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw IoError("PGM header value too large");
      ++pos_;
      any = true;
    }
    if (!any) throw IoError("malformed PGM header");
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("malformed PGM header terminator");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw IoError("only binary PGM (P5) images are supported");
  }
  HeaderReader header(bytes);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (maxval != 255) throw IoError("PGM maxval must be 255");
  const std::size_t offset = header.raster_offset();
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - offset < count) throw IoError("PGM raster is truncated");

  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return img;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

void write_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image '" + path + "'");
  const std::string bytes = encode_pgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing image '" + path + "'");
}

PatchGrid patch_matrix(const GrayImage& image, Index patch) {
  require(patch >= 1, "patch size must be positive");
  require(image.height >= patch && image.width >= patch, "image is smaller than one patch");
  PatchGrid grid;
  grid.image_height = image.height;
  grid.image_width = image.width;
  grid.patch = patch;
  grid.grid_rows = image.height / patch;
  grid.grid_cols = image.width / patch;
  grid.matrix.resize(patch * patch, grid.patch_count());
  for (Index pr = 0; pr < grid.grid_rows; ++pr) {
    for (Index pc = 0; pc < grid.grid_cols; ++pc) {
      const Index col = pr * grid.grid_cols + pc;
      for (Index dx = 0; dx < patch; ++dx) {
        for (Index dy = 0; dy < patch; ++dy) {
          grid.matrix(dx * patch + dy, col) = image.at(pr * patch + dy, pc * patch + dx) / 255.0;
        }
      }
    }
  }
  return grid;
}

Matrix unpatch(const PatchGrid& grid) { return unpatch(grid, grid.matrix); }

Matrix unpatch(const PatchGrid& grid, const Matrix& columns) {
  const Index patch = grid.patch;
  require(columns.rows() == patch * patch && columns.cols() == grid.patch_count(),
          "patch matrix does not match the grid layout");
  Matrix out(grid.grid_rows * patch, grid.grid_cols * patch);
  for (Index pr = 0; pr < grid.grid_rows; ++pr) {
    for (Index pc = 0; pc < grid.grid_cols; ++pc) {
      const Index col = pr * grid.grid_cols + pc;
      for (Index dx = 0; dx < patch; ++dx) {
        for (Index dy = 0; dy < patch; ++dy) {
          out(pr * patch + dy, pc * patch + dx) = columns(dx * patch + dy, col);
        }
      }
    }
  }
  return out;
}

}  // namespace outsense
