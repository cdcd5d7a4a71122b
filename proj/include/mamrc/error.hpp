// Copyright 2026 The mamrc Authors.
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

#ifndef MAMRC_ERROR_HPP_
#define MAMRC_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mamrc {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data could not be parsed. `offset` is the byte offset into the
// offending buffer, `line` the 1-based line for line-oriented formats (0 when
// not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line = 0)
      : Error(what), offset_(offset), line_(line) {}

  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t offset_;
  std::size_t line_;
};

// A value violates a documented precondition of an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The model endpoint could not be reached or did not answer in time.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The model endpoint answered with something that is not a legal response.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string payload = {})
      : Error(what), payload_(std::move(payload)) {}

  const std::string& payload() const { return payload_; }

 private:
  std::string payload_;
};

}  // namespace mamrc

#endif  // MAMRC_ERROR_HPP_
