#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartbag/nn/model.hpp"

namespace smartbag::nn {

// BAGM model file, version 1. All integers and floats little-endian:
//   "BAGM" | u8 version | u8 L | L x u32 layer size | u8 K | K x (u8 len, utf-8 name)
//   | f32 normalizer mean[in] | f32 normalizer stddev[in]
//   | per layer: f32 weights (row-major), f32 bias | u32 CRC-32 of all preceding bytes
inline constexpr std::uint8_t kModelFormatVersion = 1;

struct PackagedModel {
  ModelParams params;
  data::ClassVocabulary vocabulary;

  ModelSpec spec() const { return params.spec(); }
};

class ModelFormatError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, UnsupportedVersion, Truncated, ShapeMismatch, ChecksumMismatch };

  ModelFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parameters are stored as f32, so import(export(m)) is m rounded to single precision.
std::vector<std::uint8_t> export_model(const ModelParams& model, const ModelSpec& spec,
                                       const data::ClassVocabulary& vocabulary);
PackagedModel import_model(std::span<const std::uint8_t> bytes);

void save_model_file(const std::string& path, std::span<const std::uint8_t> bytes);
PackagedModel load_model_file(const std::string& path);

}  // namespace smartbag::nn
