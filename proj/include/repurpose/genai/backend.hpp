#pragma once

#include "repurpose/genai/config.hpp"
#include "repurpose/geometry/mesh.hpp"
#include "repurpose/imaging/image.hpp"

#include <memory>

namespace repurpose::genai {

struct Cutout {
    imaging::RgbaImage image; ///< alpha is 0 outside the mask
    imaging::SegmentationMask mask;
};

/// Builds a cutout whose mask is `alpha > 0`.
Cutout cutout_from_rgba(imaging::RgbaImage image);

// The three generative stages. Implementations must be safe to call from
// several threads at once; every call is independent and blocking.

class ImageGenerator {
public:
    virtual ~ImageGenerator() = default;
    /// Depth-conditioned text-to-image. Output has the conditioning's size.
    virtual imaging::RgbImage text_to_image(const imaging::GrayImage& conditioning, const GenerationConfig& cfg) = 0;
};

class BackgroundRemover {
public:
    virtual ~BackgroundRemover() = default;
    virtual Cutout remove_background(const imaging::RgbImage& image) = 0;
};

class MeshReconstructor {
public:
    virtual ~MeshReconstructor() = default;
    virtual geometry::TriMesh image_to_mesh(const imaging::RgbaImage& cutout) = 0;
};

struct BackendSet {
    std::shared_ptr<ImageGenerator> generator;
    std::shared_ptr<BackgroundRemover> remover;
    std::shared_ptr<MeshReconstructor> reconstructor;
};

} // namespace repurpose::genai
