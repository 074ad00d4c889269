// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pgm.hpp"

#include <cmath>
#include <fstream>

#include "common.hpp"

namespace tapbeam {

void write_pgm(const std::string &path, const Eigen::MatrixXd &gray) {
  require(gray.rows() > 0 && gray.cols() > 0, ErrorKind::Data,
          "empty image");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Data, "cannot write image file: " + path);
  out << "P5\n" << gray.cols() << " " << gray.rows() << "\n255\n";
  std::string bytes;
  bytes.reserve(static_cast<size_t>(gray.size()));
  for (Eigen::Index r = 0; r < gray.rows(); ++r) {
    for (Eigen::Index c = 0; c < gray.cols(); ++c) {
      double v = std::round(gray(r, c));
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorKind::Data, "short write on image file: " + path);
}

}  // namespace tapbeam
