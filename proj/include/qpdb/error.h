// Copyright 2026 The qpdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpdb {

/// Coarse classification of failures, stable enough to print in
/// machine-readable error lines from the CLI.
enum class ErrorKind {
    invalid_argument,
    not_normalized,
    not_unitary,
    not_orthonormal,
    dimension_mismatch,
    unsupported,
    not_stabilizer,
    invalid_tableau,
    constraint_violation,
    parse_error,
    protocol_error,
    channel_error,
    io_error,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message) : std::runtime_error(message), kind_(kind) {
    }

    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

}  // namespace qpdb
