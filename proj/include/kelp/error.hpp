#pragma once

#include <stdexcept>
#include <string>

namespace kelp {

// Exit-code convention: 1 usage/config, 2 I/O, 3 internal invariant violation.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string msg) : Error(std::move(msg), 1) {}
};

class IoError : public Error {
public:
    explicit IoError(std::string msg) : Error(std::move(msg), 2) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(std::string msg) : Error(std::move(msg), 3) {}
};

} // namespace kelp
