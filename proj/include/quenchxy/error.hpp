#pragma once

#include <stdexcept>
#include <string>

namespace quenchxy {

enum class ErrorKind {
    Size,
    Topology,
    Partition,
    UnsupportedDimension,
    Coverage,
    DegenerateInput,
    Shape,
    Domain,
    Range,
    Precision,
    Numeric,
    Unsupported,
    Data,
    Parse,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace quenchxy
