//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/archive.h"

#include <bit>
#include <fstream>
#include <stdexcept>

namespace sscreen {
namespace {
constexpr char kMagic[8] = { 'S', 'S', 'C', 'R', 'A', 'R', 'C', '1' };
constexpr std::uint64_t kMaxElements = std::uint64_t { 1 } << 32;

template <typename T>
void put_le(std::ostream &os, T value) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  os.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream &is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(buf), sizeof(T))) {
    throw std::runtime_error("archive truncated");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(buf[i]) << (8 * i);
  }
  return value;
}

std::string get_bytes(std::istream &is, std::uint64_t n) {
  if (n > kMaxElements) {
    throw std::runtime_error("archive field too large");
  }
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n))) {
    throw std::runtime_error("archive truncated");
  }
  return s;
}
}  // namespace

void Archive::put(const std::string &name, std::vector<double> values,
                  std::vector<std::uint64_t> shape) {
  if (shape.empty()) {
    shape = { values.size() };
  }
  Tensor t;
  t.shape = std::move(shape);
  t.f64 = std::move(values);
  tensors_[name] = std::move(t);
}

void Archive::put(const std::string &name, const Eigen::MatrixXd &m) {
  // Row-major payload.
  std::vector<double> values;
  values.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      values.push_back(m(r, c));
    }
  }
  put(name, std::move(values),
      { static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()) });
}

void Archive::put_u64(const std::string &name, std::vector<std::uint64_t> values) {
  Tensor t;
  t.is_f64 = false;
  t.shape = { values.size() };
  t.u64 = std::move(values);
  tensors_[name] = std::move(t);
}

bool Archive::has(const std::string &name) const {
  return tensors_.count(name) != 0;
}

const Archive::Tensor &Archive::get(const std::string &name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw std::runtime_error("archive has no tensor '" + name + "'");
  }
  return it->second;
}

const std::vector<double> &Archive::f64(const std::string &name) const {
  const Tensor &t = get(name);
  if (!t.is_f64) {
    throw std::runtime_error("tensor '" + name + "' is not f64");
  }
  return t.f64;
}

const std::vector<std::uint64_t> &Archive::u64(const std::string &name) const {
  const Tensor &t = get(name);
  if (t.is_f64) {
    throw std::runtime_error("tensor '" + name + "' is not u64");
  }
  return t.u64;
}

Eigen::MatrixXd Archive::matrix(const std::string &name) const {
  const Tensor &t = get(name);
  if (!t.is_f64 || t.shape.size() != 2) {
    throw std::runtime_error("tensor '" + name + "' is not a matrix");
  }
  Eigen::MatrixXd m(t.shape[0], t.shape[1]);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = t.f64[k++];
    }
  }
  return m;
}

void Archive::write(std::ostream &os) const {
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kFormatVersion);
  const std::string text = header.dump();
  put_le<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto &[name, t]: tensors_) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint8_t>(os, t.is_f64 ? 0 : 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.shape.size()));
    for (const std::uint64_t d: t.shape) {
      put_le<std::uint64_t>(os, d);
    }
    put_le<std::uint64_t>(os, t.is_f64 ? t.f64.size() : t.u64.size());
    if (t.is_f64) {
      for (const double v: t.f64) {
        put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
      }
    } else {
      for (const std::uint64_t v: t.u64) {
        put_le<std::uint64_t>(os, v);
      }
    }
  }
  if (!os) {
    throw std::runtime_error("failed to write archive");
  }
}

Archive Archive::read(std::istream &is) {
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic))
      || !std::equal(magic, magic + sizeof(magic), kMagic)) {
    throw std::runtime_error("not a smiles-screen archive");
  }
  const auto version = get_le<std::uint32_t>(is);
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported archive version "
                             + std::to_string(version));
  }
  Archive ar;
  ar.header = nlohmann::json::parse(get_bytes(is, get_le<std::uint64_t>(is)));
  const auto n = get_le<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string name = get_bytes(is, get_le<std::uint32_t>(is));
    Tensor t;
    t.is_f64 = get_le<std::uint8_t>(is) == 0;
    const auto ndim = get_le<std::uint32_t>(is);
    for (std::uint32_t d = 0; d < ndim; ++d) {
      t.shape.push_back(get_le<std::uint64_t>(is));
    }
    const auto count = get_le<std::uint64_t>(is);
    if (count > kMaxElements) {
      throw std::runtime_error("archive tensor too large");
    }
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto raw = get_le<std::uint64_t>(is);
      if (t.is_f64) {
        t.f64.push_back(std::bit_cast<double>(raw));
      } else {
        t.u64.push_back(raw);
      }
    }
    ar.tensors_[name] = std::move(t);
  }
  return ar;
}

void Archive::save(const std::string &path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write(os);
}

Archive Archive::load(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open " + path);
  }
  return read(is);
}

}  // namespace sscreen
