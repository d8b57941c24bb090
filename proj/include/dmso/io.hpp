#pragma once

#include <string>

#include "dmso/model.hpp"

namespace dmso {

// JSON document: spaces header, then per-model kernels with every
// probability written as a 17-significant-digit decimal string, so that
// parse_class(serialize_class(c)) == c bit for bit.
std::string serialize_class(const ModelClass& cls);
ModelClass parse_class(const std::string& text);

ModelClass load_class(const std::string& path);
void save_class(const std::string& path, const ModelClass& cls);

// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::string& path, const std::string& content);

std::string format_double(double x);

}  // namespace dmso
