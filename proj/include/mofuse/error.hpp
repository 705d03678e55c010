#ifndef MOFUSE_ERROR_HPP
#define MOFUSE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mofuse {

/**
 * Broad failure categories. The CLI maps each one to an exit code.
 */
enum class ErrorKind {
    Config,
    Data,
    Dimension,
    Numeric,
    Version
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& message) : Error(ErrorKind::Config, message) {}
};

struct DataError : Error {
    explicit DataError(const std::string& message) : Error(ErrorKind::Data, message) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& message) : Error(ErrorKind::Dimension, message) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& message) : Error(ErrorKind::Numeric, message) {}
};

struct VersionError : Error {
    explicit VersionError(const std::string& message) : Error(ErrorKind::Version, message) {}
};

}  // namespace mofuse

#endif
