#pragma once

#include <stdexcept>
#include <string>

namespace bolimes {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// CSV ingestion failure. Row numbers are 1-based over data rows (the header
/// row is not counted); the offending column is reported by name.
class CsvError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The weighted ridge system is rank-deficient and no penalty regularizes it.
class SingularSystem : public Error {
public:
    using Error::Error;
};

}  // namespace bolimes
