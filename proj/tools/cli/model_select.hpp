#pragma once

#include <charconv>
#include <string>

#include "fsnet/error.hpp"
#include "fsnet/model_file.hpp"

namespace fsnet::cli {

/// Conv layer by name or index; empty picks the first conv layer.
inline const ModelLayer& select_conv_layer(const Model& model, const std::string& key) {
  if (key.empty()) {
    for (const auto& layer : model.layers)
      if (layer.kind == LayerKind::Conv) return layer;
    throw Error(ErrorCode::ShapeMismatch, "model has no conv layer");
  }
  for (const auto& layer : model.layers)
    if (layer.name == key && layer.kind == LayerKind::Conv) return layer;
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
  if (ec == std::errc{} && ptr == key.data() + key.size() && index < model.layers.size() &&
      model.layers[index].kind == LayerKind::Conv) {
    return model.layers[index];
  }
  throw Error(ErrorCode::ShapeMismatch, "no conv layer '" + key + "' in model");
}

}  // namespace fsnet::cli
