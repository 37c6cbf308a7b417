#pragma once

#include <stdexcept>
#include <string>

namespace sketchbench {

enum class ErrorKind {
    invalid_argument,
    parse,
    io,
    shape,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

} // namespace sketchbench
