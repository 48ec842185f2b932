#pragma once

#include <stdexcept>
#include <string>

namespace ale {

// Base for every failure raised by the library. The CLI maps NumericError to
// exit code 3 and everything else to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: unknown grade symbol, missing column, bad row.
class ParseError : public Error {
public:
    using Error::Error;
};

// Inconsistent or infeasible configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Violated evaluation protocol: empty test term, T too small, empty set.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Unknown entity identifier.
class LookupError : public Error {
public:
    using Error::Error;
};

// Non-finite values and training divergence.
class NumericError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public NumericError {
public:
    DivergenceError(int epoch, std::size_t record, const std::string& what)
        : NumericError("training diverged at epoch " + std::to_string(epoch) + ", record " +
                       std::to_string(record) + ": " + what),
          epoch_(epoch), record_(record) {}

    int epoch() const noexcept { return epoch_; }
    std::size_t record() const noexcept { return record_; }

private:
    int epoch_;
    std::size_t record_;
};

}  // namespace ale
