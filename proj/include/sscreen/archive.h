//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_ARCHIVE_H_
#define SSCREEN_ARCHIVE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace sscreen {

/// Versioned binary container: magic, format version, a JSON text header and
/// named little-endian tensors (f64 or u64) with shapes.
///
///   "SSCRARC1" | u32 version | u64 header_len | header bytes
///   | u32 n_tensors | { u32 name_len | name | u8 dtype | u32 ndim
///   | u64 dims[ndim] | payload }*
class Archive {
public:
  static constexpr std::uint32_t kFormatVersion = 1;

  nlohmann::json header = nlohmann::json::object();

  void put(const std::string &name, std::vector<double> values,
           std::vector<std::uint64_t> shape = {});
  void put(const std::string &name, const Eigen::MatrixXd &m);
  void put_u64(const std::string &name, std::vector<std::uint64_t> values);

  bool has(const std::string &name) const;
  const std::vector<double> &f64(const std::string &name) const;
  const std::vector<std::uint64_t> &u64(const std::string &name) const;
  Eigen::MatrixXd matrix(const std::string &name) const;

  void write(std::ostream &os) const;
  /// Throws std::runtime_error on a bad magic, version or truncated input.
  static Archive read(std::istream &is);

  void save(const std::string &path) const;
  static Archive load(const std::string &path);

private:
  struct Tensor {
    bool is_f64 = true;
    std::vector<std::uint64_t> shape;
    std::vector<double> f64;
    std::vector<std::uint64_t> u64;
  };
  const Tensor &get(const std::string &name) const;

  std::map<std::string, Tensor> tensors_;
};

}  // namespace sscreen

#endif  // SSCREEN_ARCHIVE_H_
