#include "smartbag/nn/model_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <iterator>

namespace smartbag::nn {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'B', 'A', 'G', 'M'};

using Kind = ModelFormatError::Kind;

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  template <typename Derived>
  void row_major(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f32(m(r, c));
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ModelFormatError(Kind::Truncated, "model file: truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> export_model(const ModelParams& model, const ModelSpec& spec,
                                       const data::ClassVocabulary& vocabulary) {
  model.validate();
  spec.validate();
  if (model.spec() != spec) throw std::invalid_argument("export_model: spec does not match parameters");
  if (vocabulary.size() != spec.output_width())
    throw std::invalid_argument("export_model: vocabulary size does not match output width");
  if (spec.layer_sizes.size() > 255 || vocabulary.size() > 255)
    throw std::invalid_argument("export_model: too many layers or classes for the format");

  Writer w;
  w.bytes(kMagic);
  w.u8(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(spec.layer_sizes.size()));
  for (auto s : spec.layer_sizes) {
    if (s > UINT32_MAX) throw std::invalid_argument("export_model: layer too wide");
    w.u32(static_cast<std::uint32_t>(s));
  }
  w.u8(static_cast<std::uint8_t>(vocabulary.size()));
  for (const auto& name : vocabulary.names()) {
    if (name.size() > 255) throw std::invalid_argument("export_model: class name too long");
    w.u8(static_cast<std::uint8_t>(name.size()));
    w.bytes({reinterpret_cast<const std::uint8_t*>(name.data()), name.size()});
  }
  w.row_major(model.normalizer.mean.transpose());
  w.row_major(model.normalizer.stddev.transpose());
  for (const auto& layer : model.layers) {
    w.row_major(layer.weights);
    w.row_major(layer.bias.transpose());
  }
  w.u32(crc32_of(w.buffer()));
  return std::move(w.buffer());
}

PackagedModel import_model(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(magic_len), kMagic.begin()))
    throw ModelFormatError(Kind::BadMagic, "model file: bad magic");

  Reader r(bytes);
  r.take(kMagic.size());
  if (auto version = r.u8(); version != kModelFormatVersion)
    throw ModelFormatError(Kind::UnsupportedVersion,
                           "model file: unsupported version " + std::to_string(version));

  ModelSpec spec;
  const std::size_t layer_count = r.u8();
  for (std::size_t i = 0; i < layer_count; ++i) spec.layer_sizes.push_back(r.u32());
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Kind::ShapeMismatch, std::string("model file: ") + e.what());
  }

  const std::size_t class_count = r.u8();
  if (class_count != spec.output_width())
    throw ModelFormatError(Kind::ShapeMismatch, "model file: class count does not match output width");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < class_count; ++i) {
    auto raw = r.take(r.u8());
    names.emplace_back(raw.begin(), raw.end());
  }

  // Everything after the names has a length fixed by the spec.
  std::size_t floats = 2 * spec.input_width();
  for (std::size_t l = 0; l < spec.depth(); ++l)
    floats += spec.layer_sizes[l + 1] * (spec.layer_sizes[l] + 1);
  const std::size_t expected = r.position() + 4 * floats + 4;
  if (bytes.size() < expected) throw ModelFormatError(Kind::Truncated, "model file: truncated");
  if (bytes.size() > expected)
    throw ModelFormatError(Kind::ShapeMismatch, "model file: trailing bytes after checksum");

  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.subspan(body.size()));
  if (tail.u32() != crc32_of(body))
    throw ModelFormatError(Kind::ChecksumMismatch, "model file: checksum mismatch");

  PackagedModel out;
  try {
    out.vocabulary = data::ClassVocabulary(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Kind::ShapeMismatch, std::string("model file: ") + e.what());
  }

  const auto in = static_cast<Eigen::Index>(spec.input_width());
  auto read_row_major = [&r](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.f32();
    return m;
  };
  out.params.normalizer.mean = read_row_major(1, in).transpose();
  out.params.normalizer.stddev = read_row_major(1, in).transpose();
  out.params.layers = zero_layers<double>(spec);
  for (auto& layer : out.params.layers) {
    layer.weights = read_row_major(layer.weights.rows(), layer.weights.cols());
    layer.bias = read_row_major(1, layer.bias.size()).transpose();
  }
  try {
    out.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Kind::ShapeMismatch, std::string("model file: ") + e.what());
  }
  return out;
}

void save_model_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write model file " + path);
}

PackagedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return import_model(bytes);
}

}  // namespace smartbag::nn
