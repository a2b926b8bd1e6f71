#pragma once

#include <stdexcept>
#include <string>

namespace scengame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix sizes disagree with the game dimensions.
class DimensionError : public Error {
 public:
  DimensionError(std::string block, const std::string& what)
      : Error(what), block_(std::move(block)) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

// A user callback produced NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The centralized reference solver refuses instances above its row budget.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace scengame
