#pragma once

#include <stdexcept>
#include <string>

namespace hri {

// Invalid or unresolvable configuration. `path` is a JSON-pointer-like field
// path when the error originates in a scenario file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string path = {})
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Domain-level impossibility, e.g. an empty action set.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Every hypothesis with prior mass assigns zero likelihood to the evidence.
class InconsistentEvidence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Run log or protocol message with an unexpected schema version or shape.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hri
