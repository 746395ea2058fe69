#include "repurpose/genai/config.hpp"

#include "repurpose/error.hpp"

#include <cmath>

namespace repurpose::genai {

std::string_view to_string(ControlMode m) noexcept
{
    switch (m) {
    case ControlMode::Balanced: return "balanced";
    case ControlMode::PromptPriority: return "prompt_priority";
    case ControlMode::ControlPriority: return "control_priority";
    }
    return "balanced";
}

ControlMode parse_control_mode(std::string_view s)
{
    if (s == "balanced")
        return ControlMode::Balanced;
    if (s == "prompt_priority")
        return ControlMode::PromptPriority;
    if (s == "control_priority")
        return ControlMode::ControlPriority;
    throw Error(ErrorKind::InvalidInput, "unknown control mode '" + std::string(s) + "'");
}

void GenerationConfig::validate() const
{
    if (prompt.empty())
        throw Error(ErrorKind::InvalidInput, "prompt must not be empty");
    if (control_type != ControlType::Depth)
        throw Error(ErrorKind::InvalidInput, "only depth control is supported");
}

void BackendEndpoint::validate() const
{
    if (base_url.empty())
        throw Error(ErrorKind::InvalidInput, "backend base_url is empty");
    if (!(request_timeout_s > 0))
        throw Error(ErrorKind::InvalidInput, "request timeout must be positive");
    if (max_retries < 0)
        throw Error(ErrorKind::InvalidInput, "max_retries must be >= 0");
}

void StubConfig::validate() const
{
    if (!(residual_area_fraction >= 0 && residual_area_fraction < 0.5))
        throw Error(ErrorKind::InvalidInput, "residual_area_fraction must be in [0, 0.5)");
    if (grid_cols < 2 || grid_rows < 2)
        throw Error(ErrorKind::InvalidInput, "heightfield grid must be at least 2x2");
    if (!std::isfinite(height_scale))
        throw Error(ErrorKind::InvalidInput, "height_scale must be finite");
}

} // namespace repurpose::genai
