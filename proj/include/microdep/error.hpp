#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace microdep {

/// Non-fatal diagnostics collected while analyzing a project.
using Warnings = std::vector<std::string>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No docker-compose file could be located.
class NotFound : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

/// The compose file parsed but declares no services.
class EmptyModel : public Error {
public:
  using Error::Error;
};

/// An edge names a service the compose model does not declare.
class UnknownService : public Error {
public:
  using Error::Error;
};

class InvalidName : public Error {
public:
  using Error::Error;
};

class ManifestError : public Error {
public:
  using Error::Error;
};

class FetchError : public Error {
public:
  using Error::Error;
};

} // namespace microdep
