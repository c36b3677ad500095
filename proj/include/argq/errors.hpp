#ifndef ARGQ_ERRORS_HPP
#define ARGQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace argq {

// Base of every error the core throws. The C API maps each subclass to a
// stable status code (see argq.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration key, unreadable lexicon/embedding file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Corpus schema or validation failure.
class DataError : public Error {
 public:
  using Error::Error;
};

// Serialized models do not belong to the pipeline they are loaded with.
class FingerprintError : public Error {
 public:
  using Error::Error;
};

// Remote spell-check service failure (service mode only).
class ServiceError : public Error {
 public:
  using Error::Error;
};

}  // namespace argq

#endif  // ARGQ_ERRORS_HPP
