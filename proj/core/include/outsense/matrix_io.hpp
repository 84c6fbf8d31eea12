#pragma once

// Dense matrix and index-list files.
//
// Matrix CSV: the first line holds the dimensions "rows,cols"; each of the
// following `rows` lines holds one matrix row of comma-separated values.
// Values are written with %.17g so they read back exactly.

#include <iosfwd>
#include <string>

#include "outsense/types.hpp"

namespace outsense {

Matrix parse_matrix_csv(std::istream& in);
void format_matrix_csv(std::ostream& out, const Matrix& m);

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

// Comma- or whitespace-separated nonnegative integers.
IndexList parse_index_list(const std::string& text);
std::string format_index_list(const IndexList& indices);

IndexList read_index_list(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace outsense
