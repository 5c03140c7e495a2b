// Copyright 2026 The Cheshire Authors
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
#include <utility>
#include <variant>

namespace cheshire {

/// Failure categories surfaced as values rather than exceptions, so batch
/// runs can keep going after e.g. a null post-selection.
enum class ErrorCode {
    InvalidArgument,
    UnnormalizedState,
    OrthogonalSelection,
    NoValidHistory,
    ImpossibleOutcome,
    DuplicateAxis,
    NullPostSelection,
    InsufficientData,
};

inline const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
            return "InvalidArgument";
        case ErrorCode::UnnormalizedState:
            return "UnnormalizedState";
        case ErrorCode::OrthogonalSelection:
            return "OrthogonalSelection";
        case ErrorCode::NoValidHistory:
            return "NoValidHistory";
        case ErrorCode::ImpossibleOutcome:
            return "ImpossibleOutcome";
        case ErrorCode::DuplicateAxis:
            return "DuplicateAxis";
        case ErrorCode::NullPostSelection:
            return "NullPostSelection";
        case ErrorCode::InsufficientData:
            return "InsufficientData";
    }
    return "Unknown";
}

struct Error {
    ErrorCode code;
    std::string message;

    std::string describe() const {
        return std::string(error_code_name(code)) + ": " + message;
    }
};

class BadResultAccess : public std::runtime_error {
   public:
    explicit BadResultAccess(const Error &e) : std::runtime_error(e.describe()), error_(e) {
    }
    const Error &error() const noexcept {
        return error_;
    }

   private:
    Error error_;
};

/// Value-or-error return type (a small stand-in for std::expected, which is C++23).
template <typename T>
class Result {
   public:
    Result(T value) : data_(std::move(value)) {
    }
    Result(Error error) : data_(std::move(error)) {
    }

    bool has_value() const noexcept {
        return std::holds_alternative<T>(data_);
    }
    explicit operator bool() const noexcept {
        return has_value();
    }

    const T &value() const & {
        check();
        return std::get<T>(data_);
    }
    T &value() & {
        check();
        return std::get<T>(data_);
    }
    T &&value() && {
        check();
        return std::get<T>(std::move(data_));
    }

    const T &operator*() const & {
        return value();
    }
    T &operator*() & {
        return value();
    }
    const T *operator->() const {
        return &value();
    }
    T *operator->() {
        return &value();
    }

    const Error &error() const {
        return std::get<Error>(data_);
    }

   private:
    void check() const {
        if (!has_value()) {
            throw BadResultAccess(std::get<Error>(data_));
        }
    }

    std::variant<T, Error> data_;
};

inline Error make_error(ErrorCode code, std::string message) {
    return Error{code, std::move(message)};
}

}  // namespace cheshire
