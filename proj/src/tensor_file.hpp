// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_TENSOR_FILE_HPP_
#define TAPBEAM_TENSOR_FILE_HPP_

#include <complex>
#include <string>
#include <vector>

namespace tapbeam {

// Flat binary tensor file: one JSON header line
//   {"dtype": "...", "shape": [...], "order": "col"}
// terminated by '\n', followed by the raw little-endian payload. dtype is
// "float64" or "complex128" (interleaved re/im). Storage is column-major
// over the listed shape so F x T matrices round-trip Eigen layouts directly.
struct TensorFile {
  std::string dtype;
  std::vector<int64_t> shape;
  std::vector<double> data;  // complex128 stores 2 doubles per element

  int64_t element_count() const {
    int64_t n = 1;
    for (int64_t s : shape) n *= s;
    return n;
  }
};

TensorFile read_tensor(const std::string &path);
void write_tensor(const std::string &path, const TensorFile &tensor);

// Convenience for complex F x T matrices (column-major).
void write_complex_matrix(const std::string &path,
                          const std::vector<std::complex<double>> &values,
                          int64_t rows, int64_t cols);

}  // namespace tapbeam

#endif  // TAPBEAM_TENSOR_FILE_HPP_
