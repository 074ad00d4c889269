// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tensor_file.hpp"

#include <fstream>

#include <json.hpp>

#include "common.hpp"

namespace tapbeam {

using nlohmann::json;

TensorFile read_tensor(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Data, "cannot open tensor file: " + path);
  std::string header;
  std::getline(in, header);
  require(in.good(), ErrorKind::Data, "tensor file missing header: " + path);

  TensorFile t;
  try {
    json j = json::parse(header);
    t.dtype = j.at("dtype").get<std::string>();
    t.shape = j.at("shape").get<std::vector<int64_t>>();
  } catch (const json::exception &e) {
    throw Error(ErrorKind::Data,
                "bad tensor header in " + path + ": " + e.what());
  }
  require(t.dtype == "float64" || t.dtype == "complex128", ErrorKind::Data,
          "unsupported tensor dtype '" + t.dtype + "' in " + path);
  for (int64_t s : t.shape)
    require(s > 0, ErrorKind::Data, "non-positive tensor dimension in " + path);

  int64_t doubles = t.element_count() * (t.dtype == "complex128" ? 2 : 1);
  t.data.resize(static_cast<size_t>(doubles));
  in.read(reinterpret_cast<char *>(t.data.data()),
          static_cast<std::streamsize>(doubles * 8));
  require(in.gcount() == static_cast<std::streamsize>(doubles * 8),
          ErrorKind::Data, "tensor payload truncated: " + path);
  return t;
}

void write_tensor(const std::string &path, const TensorFile &tensor) {
  int64_t doubles =
      tensor.element_count() * (tensor.dtype == "complex128" ? 2 : 1);
  require(static_cast<int64_t>(tensor.data.size()) == doubles, ErrorKind::Data,
          "tensor payload size does not match shape");
  json j;
  j["dtype"] = tensor.dtype;
  j["shape"] = tensor.shape;
  j["order"] = "col";
  std::string header = j.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Data, "cannot write tensor file: " + path);
  out << header << '\n';
  out.write(reinterpret_cast<const char *>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.data.size() * 8));
  require(out.good(), ErrorKind::Data, "short write on tensor file: " + path);
}

void write_complex_matrix(const std::string &path,
                          const std::vector<std::complex<double>> &values,
                          int64_t rows, int64_t cols) {
  require(static_cast<int64_t>(values.size()) == rows * cols, ErrorKind::Data,
          "complex matrix size mismatch");
  TensorFile t;
  t.dtype = "complex128";
  t.shape = {rows, cols};
  t.data.resize(values.size() * 2);
  for (size_t i = 0; i < values.size(); ++i) {
    t.data[2 * i] = values[i].real();
    t.data[2 * i + 1] = values[i].imag();
  }
  write_tensor(path, t);
}

}  // namespace tapbeam
