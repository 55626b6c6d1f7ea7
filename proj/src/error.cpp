#include "stylo/error.hpp"

namespace stylo {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::Load: return "load error";
        case ErrorKind::Format: return "format error";
        case ErrorKind::UndefinedMetric: return "undefined metric";
        case ErrorKind::DegenerateData: return "degenerate data";
        case ErrorKind::Provider: return "provider error";
        case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

namespace {

std::string compose(ErrorKind kind, const std::string& detail, const std::string& stage) {
    std::string out;
    if (!stage.empty()) out += "[" + stage + "] ";
    out += to_string(kind);
    out += ": ";
    out += detail;
    return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string stage)
    : std::runtime_error(compose(kind, message, stage)),
      kind_(kind),
      stage_(std::move(stage)),
      detail_(message) {}

Error Error::with_stage(std::string stage) const { return Error(kind_, detail_, std::move(stage)); }

}  // namespace stylo
