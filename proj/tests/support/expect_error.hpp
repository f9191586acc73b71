// Copyright 2026 The DiscoBox Engine Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DISCOBOX_TESTS_SUPPORT_EXPECT_ERROR_HPP_
#define DISCOBOX_TESTS_SUPPORT_EXPECT_ERROR_HPP_

#include <gtest/gtest.h>

#include "core/error.hpp"

// Asserts that stmt throws discobox::Error carrying the given code.
#define EXPECT_DBX_ERROR(stmt, expected_code)                                   \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << #stmt " did not throw";                                  \
    } catch (const ::discobox::Error& e) {                                      \
      EXPECT_EQ(::discobox::ErrorCodeName(e.code()),                            \
                ::discobox::ErrorCodeName(expected_code))                       \
          << e.what();                                                          \
    }                                                                           \
  } while (0)

#endif  // DISCOBOX_TESTS_SUPPORT_EXPECT_ERROR_HPP_
