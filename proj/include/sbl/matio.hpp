#pragma once

#include <string>

#include "sbl/types.hpp"

namespace sbl {

// Binary layout: two little-endian uint32 dimensions (rows, cols) followed by
// rows*cols little-endian float64 values in column-major order. CSV files are
// plain comma-separated rows. Paths ending in .csv use the text form; anything
// else uses the binary form. Vectors accept either a single row or a single
// column on read.

Matrix read_matrix(const std::string& path);
Vector read_vector(const std::string& path);
void write_matrix(const std::string& path, const Matrix& m);
void write_vector(const std::string& path, const Vector& v);

Matrix read_matrix_binary(const std::string& path);
void write_matrix_binary(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace sbl
