#include "ding/error.hpp"

namespace ding {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid parameter";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::NumericInput: return "non-finite input";
        case ErrorKind::Numeric: return "numeric failure";
        case ErrorKind::Capability: return "capability error";
        case ErrorKind::Ordering: return "ordering error";
        case ErrorKind::Shape: return "shape error";
        case ErrorKind::Config: return "config error";
        case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace ding
