#pragma once

#include "vspan/spanset.hpp"
#include "vspan/zhu.hpp"

#include <json.hpp>

#include <string>

namespace vspan {

/// Deterministic report primitives: ordered keys, rationals as "p/q"
/// strings, no timestamps. Identical inputs give byte-identical output.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Model descriptor: central charge, kind, windows, graded dimensions.
Json model_json(const Context& ctx);

/// Expression as a list of [coefficient, word] string pairs in canonical
/// term order.
Json expression_json(const Context& ctx, const Expression& e);

/// Per-weight span verification table.
Json span_json(const std::vector<int>& dims, const std::vector<int>& ranks);

/// CSV with header weight,dim,cn_codim. Rows 0..dims.size()-1.
std::string csv_dims(const std::vector<int>& dims, const std::vector<int>& codims);

void write_file(const std::string& path, const std::string& content);

} // namespace vspan
