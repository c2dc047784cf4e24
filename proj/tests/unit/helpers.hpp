// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "doctest.h"
#include "percept_tok/error.hpp"

#define CHECK_ERROR(expr, error_code)                                  \
  do {                                                                 \
    bool thrown_ = false;                                              \
    try {                                                              \
      (void)(expr);                                                    \
    } catch (const percept::Error& e_) {                               \
      thrown_ = true;                                                  \
      CHECK_MESSAGE(e_.code() == (error_code), e_.name(), ": ", e_.what()); \
    }                                                                  \
    CHECK_MESSAGE(thrown_, "expected ", #error_code);                  \
  } while (0)

namespace testutil {

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("percept_tok_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
