// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_PGM_HPP_
#define TAPBEAM_PGM_HPP_

#include <Eigen/Dense>
#include <string>

namespace tapbeam {

// 8-bit binary PGM (P5). Values are clamped to [0, 255].
void write_pgm(const std::string &path, const Eigen::MatrixXd &gray);

}  // namespace tapbeam

#endif  // TAPBEAM_PGM_HPP_
