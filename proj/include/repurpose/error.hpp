#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repurpose {

enum class ErrorKind {
    InvalidRange,
    InvalidInput,
    UnmappableColor,
    EmptyMask,
    DegenerateExtent,
    EmptyMesh,
    DegenerateMesh,
    MalformedMesh,
    UnsupportedGlb,
    ImageCodec,
    BackendUnavailable,
    NothingSegmented,
    DegenerateTarget,
    TimeWentBackwards,
    InvalidCapture,
    InvalidTransition,
    NotFound,
    InvalidRating,
    ProvenanceViolation,
    ValidationFailed,
    IntegrityError,
    ParseError,
    EmptySelection,
    Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so that
/// callers (the pipeline, the HTTP facade) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace repurpose
