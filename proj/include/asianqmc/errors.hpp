#pragma once

#include <stdexcept>
#include <string>

namespace asianqmc {

// Base class for every error raised by the library. Callers that only need to
// report a failure can catch this; the subclasses name the contract violated.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedDimension : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class InvalidGrid : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class FactorizationError : public Error { public: using Error::Error; };
class MissingPilot : public Error { public: using Error::Error; };
class DegenerateWeight : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class OracleFailure : public Error { public: using Error::Error; };

}  // namespace asianqmc
