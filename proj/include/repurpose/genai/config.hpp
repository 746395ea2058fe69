#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace repurpose::genai {

/// How the remote model weighs the text prompt against the depth conditioning.
enum class ControlMode { Balanced, PromptPriority, ControlPriority };

/// Only depth conditioning is supported.
enum class ControlType { Depth };

std::string_view to_string(ControlMode m) noexcept;
/// Accepts "balanced", "prompt_priority", "control_priority". Throws InvalidInput.
ControlMode parse_control_mode(std::string_view s);

struct GenerationConfig {
    std::string prompt;
    std::uint64_t seed = 0;
    ControlMode control_mode = ControlMode::Balanced;
    ControlType control_type = ControlType::Depth;
    std::string checkpoint_id = "stable-diffusion-v1-5";
    bool use_native_depth_estimation = false;

    void validate() const;
};

struct BackendEndpoint {
    std::string base_url;
    std::optional<std::string> auth_token;
    double request_timeout_s = 120.0;
    int max_retries = 2;

    void validate() const;
};

/// Knobs of the deterministic local backends.
struct StubConfig {
    /// Paint a disconnected rectangle into generated images; reproduces the
    /// residual-background failure.
    bool inject_residual = false;
    /// Residual area as a fraction of the image area, in [0, 0.5).
    double residual_area_fraction = 0.02;
    /// Top-left corner of the residual rectangle, pixels.
    int residual_offset_x = 0;
    int residual_offset_y = 0;
    /// Heightfield cells across the opaque bounding box.
    int grid_cols = 32;
    int grid_rows = 32;
    /// Height of a fully white pixel, meters.
    double height_scale = 0.05;

    void validate() const;
};

} // namespace repurpose::genai
