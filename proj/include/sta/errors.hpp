// Copyright 2026 The STA Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sta {

// Base of every error raised for bad input data (as opposed to bad usage).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be parsed. `line()` is 1-based; 0 means "whole file".
class LoadError : public DataError {
 public:
  LoadError(const std::string& what, std::size_t line = 0)
      : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CorpusError : public DataError {
 public:
  using DataError::DataError;
};

// Mathematical precondition violated (zero vector, single-class corpus...).
class DomainError : public DataError {
 public:
  using DataError::DataError;
};

class OovError : public DataError {
 public:
  explicit OovError(const std::string& word)
      : DataError("out-of-vocabulary word: " + word), word_(word) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

class UnrepresentableLabelError : public DataError {
 public:
  explicit UnrepresentableLabelError(const std::string& label)
      : DataError("label '" + label +
                  "' has no in-vocabulary token; supply a label description"),
        label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// Invalid configuration value or unknown identifier. Maps to a usage error.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sta
