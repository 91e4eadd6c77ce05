#pragma once

#include <stdexcept>
#include <string>

namespace moralframe {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input violates a format or a domain rule (CLI exit code 1, HTTP 400).
class ValidationError : public Error {
public:
  using Error::Error;
};

// File system trouble (CLI exit code 2).
class IoError : public Error {
public:
  using Error::Error;
};

// Remote endpoint trouble (CLI exit code 2). Carries the request id.
class NetworkError : public Error {
public:
  NetworkError(const std::string& what, std::string request_id)
      : Error(what + " [request " + request_id + "]"), request_id_(std::move(request_id)) {}
  const std::string& request_id() const noexcept { return request_id_; }

private:
  std::string request_id_;
};

class TransportError : public NetworkError {
public:
  using NetworkError::NetworkError;
};

class StatusError : public NetworkError {
public:
  StatusError(const std::string& what, std::string request_id, int status)
      : NetworkError(what, std::move(request_id)), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

class TimeoutError : public NetworkError {
public:
  using NetworkError::NetworkError;
};

// A model kind that has no importance method.
class NotExplainableError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

} // namespace moralframe
