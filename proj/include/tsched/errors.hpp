#pragma once

#include <stdexcept>
#include <string>

namespace tsched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths disagree with the coverage-map size K.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// next() was called before any input was retained.
class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TargetError : public Error {
 public:
  using Error::Error;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};

class SnapshotVersionError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

class SnapshotChecksumError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

}  // namespace tsched
