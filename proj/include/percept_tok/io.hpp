// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace percept::io {

std::string read_file(const std::string& path);
/// Writes to "<path>.tmp" then renames over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

std::vector<std::string> read_lines(const std::string& path);

}  // namespace percept::io
