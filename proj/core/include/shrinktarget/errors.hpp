#pragma once

#include <stdexcept>
#include <string>

namespace shrinktarget {

enum class ErrorKind {
    domain,      // invalid argument values
    dimension,   // mismatched dimensions
    degenerate,  // inputs for which a quantity is undefined (zero error, zero vector)
    config,      // malformed configuration
    precision,   // a certified comparison could not be decided
    resource,    // a budget or scan limit was exceeded
    internal
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit status used by the command line tool.
int exit_code(ErrorKind kind) noexcept;

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool ok, ErrorKind kind, const std::string& what)
{
    if (!ok)
        fail(kind, what);
}

}  // namespace shrinktarget
