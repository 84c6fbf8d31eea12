#include "outsense/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string_view>

#include "outsense/error.hpp"

namespace outsense {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_field(std::string_view field, const char* what) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw IoError(std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix file is empty");
  const std::size_t comma = line.find(',');
  if (comma == std::string::npos) throw IoError("matrix header must be 'rows,cols'");
  const auto rows = parse_field<Index>(std::string_view(line).substr(0, comma), "row count");
  const auto cols = parse_field<Index>(std::string_view(line).substr(comma + 1), "column count");
  if (rows < 0 || cols < 0) throw IoError("matrix dimensions must be nonnegative");

  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw IoError("matrix file has too few rows");
    std::string_view rest(line);
    for (Index j = 0; j < cols; ++j) {
      const std::size_t next = rest.find(',');
      if ((next == std::string_view::npos) != (j + 1 == cols)) {
        throw IoError("matrix row " + std::to_string(i) + " has the wrong number of values");
      }
      m(i, j) = parse_field<double>(rest.substr(0, next), "matrix value");
      if (next != std::string_view::npos) rest.remove_prefix(next + 1);
    }
  }
  return m;
}

void format_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  return parse_matrix_csv(in);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file '" + path + "'");
  format_matrix_csv(out, m);
  if (!out) throw IoError("failed writing matrix file '" + path + "'");
}

IndexList parse_index_list(const std::string& text) {
  IndexList out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const auto value = parse_field<Index>(token, "index");
    if (value < 0) throw IoError("indices must be nonnegative");
    out.push_back(value);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

std::string format_index_list(const IndexList& indices) {
  std::string out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(indices[i]);
  }
  return out;
}

IndexList read_index_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open index file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_index_list(text);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace outsense
