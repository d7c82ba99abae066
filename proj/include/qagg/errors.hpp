#pragma once

#include <stdexcept>
#include <string>

namespace qagg {

// Malformed or unusable input data (CSV parse failures, bad targets, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training or evaluation produced non-finite or otherwise unusable numbers.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qagg
