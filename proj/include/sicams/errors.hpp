#ifndef SICAMS_ERRORS_HPP
#define SICAMS_ERRORS_HPP

#include <iostream>
#include <stdexcept>
#include <string>

namespace sicams {

// Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (singular covariance, non-convergence). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void log_warning(const std::string& msg) {
    std::cerr << "[warning] " << msg << "\n";
}

}  // namespace sicams

#endif
