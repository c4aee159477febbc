#pragma once

#include "skge/kg.hpp"
#include "skge/models.hpp"

#include <string>
#include <string_view>

namespace skge {

// Model file layout (all integers little-endian):
//   8 bytes   magic "SKGE0001"
//   4 bytes   u32 header length L
//   L bytes   UTF-8 JSON {"algorithm","d","n","m","transe_norm","seed"}
//   n*d       float32 entity matrix, row-major
//   m*w       float32 relation parameters, w = d (vectors) or d*d (matrices,
//             row-major, concatenated per relation)
inline constexpr std::string_view kModelMagic = "SKGE0001";

std::string encode_model(const EmbeddingModel& model);
/// Throws ModelFormatError (BadMagic, UnsupportedVersion, BadHeader, SizeMismatch).
EmbeddingModel decode_model(std::string_view bytes);

/// Atomic write (temporary file + rename).
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

/// One label per line; line number is the id.
std::string encode_vocab(const Vocab& vocab);
Vocab decode_vocab(std::string_view text);

/// Sidecar paths next to a model file: "<model>.entities.txt" and
/// "<model>.relations.txt".
std::string entities_sidecar(const std::string& model_path);
std::string relations_sidecar(const std::string& model_path);

}  // namespace skge
