// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

namespace ndi {

// Parse errors become ValidationError, open/read failures IoError; both name
// the path.
nlohmann::json read_json_file(const std::filesystem::path& path);

// Two-space indented, newline-terminated.
void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace ndi
