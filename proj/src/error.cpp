#include "mofuse/error.hpp"

namespace mofuse {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Data: return "data";
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Version: return "version";
    }
    return "unknown";
}

}  // namespace mofuse
