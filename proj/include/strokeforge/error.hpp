// Copyright 2026 The StrokeForge Authors
//
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

#pragma once

#include <stdexcept>
#include <string>

namespace strokeforge {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    Input,    ///< bad file, bad argument, violated precondition
    Numeric,  ///< the math went somewhere it should not (nonpositive radius, singular solve)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throwInput(const std::string& what) {
    throw Error(ErrorKind::Input, what);
}

[[noreturn]] inline void throwNumeric(const std::string& what) {
    throw Error(ErrorKind::Numeric, what);
}

}  // namespace strokeforge
