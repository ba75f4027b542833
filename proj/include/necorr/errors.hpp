#pragma once

#include <stdexcept>
#include <string>

namespace necorr {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input files, schema violations, bad parameters. CLI exit code 2.
class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(what) {}
};

/// Generation-backend failures (remote or scripted). CLI exit code 3.
class BackendError : public Error {
public:
  explicit BackendError(const std::string& what) : Error(what) {}
};

/// Wire-level failure of the http backend or remote tagger: timeout,
/// non-2xx status, malformed response body.
class TransportError : public BackendError {
public:
  explicit TransportError(const std::string& what) : BackendError(what) {}
};

/// Reply lacked the expected answer tags.
class RationaleParseError : public Error {
public:
  explicit RationaleParseError(const std::string& what) : Error(what) {}
};

/// Reply named an option letter that is not on the MCQ.
class InvalidOptionError : public Error {
public:
  explicit InvalidOptionError(const std::string& what) : Error(what) {}
};

}  // namespace necorr
