#include "repurpose/error.hpp"

namespace repurpose {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::UnmappableColor: return "UnmappableColor";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DegenerateExtent: return "DegenerateExtent";
    case ErrorKind::EmptyMesh: return "EmptyMesh";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::MalformedMesh: return "MalformedMesh";
    case ErrorKind::UnsupportedGlb: return "UnsupportedGlb";
    case ErrorKind::ImageCodec: return "ImageCodec";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::NothingSegmented: return "NothingSegmented";
    case ErrorKind::DegenerateTarget: return "DegenerateTarget";
    case ErrorKind::TimeWentBackwards: return "TimeWentBackwards";
    case ErrorKind::InvalidCapture: return "InvalidCapture";
    case ErrorKind::InvalidTransition: return "InvalidTransition";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidRating: return "InvalidRating";
    case ErrorKind::ProvenanceViolation: return "ProvenanceViolation";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::IntegrityError: return "IntegrityError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace repurpose
