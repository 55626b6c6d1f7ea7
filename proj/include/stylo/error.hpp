#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stylo {

enum class ErrorKind {
    Validation,       // bad input or configuration
    Load,             // missing / unreadable input file
    Format,           // malformed file or wire payload
    UndefinedMetric,  // metric undefined for the input (zero vector)
    DegenerateData,   // data has no spread to analyse
    Provider,         // embedding provider failed
    Io,               // output could not be written
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the toolkit. The pipeline tags errors with the
// stage that raised them; the CLI maps Validation to exit code 2.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string stage = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

    Error with_stage(std::string stage) const;

private:
    ErrorKind kind_;
    std::string stage_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace stylo
