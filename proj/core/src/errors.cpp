#include "shrinktarget/errors.hpp"

namespace shrinktarget {

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind)
{
}

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::degenerate: return "degenerate-input";
    case ErrorKind::config: return "config";
    case ErrorKind::precision: return "precision";
    case ErrorKind::resource: return "resource";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::domain:
    case ErrorKind::dimension:
    case ErrorKind::degenerate:
    case ErrorKind::config: return 2;
    case ErrorKind::precision: return 3;
    case ErrorKind::resource: return 4;
    case ErrorKind::internal: return 5;
    }
    return 5;
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

}  // namespace shrinktarget
