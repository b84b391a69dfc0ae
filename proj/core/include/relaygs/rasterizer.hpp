#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relaygs/camera.hpp"
#include "relaygs/gaussian.hpp"
#include "relaygs/image.hpp"

namespace relaygs {

// How per-Gaussian binary masks enter the opacity during a render.
//   kOff     — masks ignored (first-frame rendering).
//   kApply   — hard 0/1 gate with straight-through gradients.
//   kRelaxed — smooth sigmoid gate; used by the finite-difference oracle,
//              which needs a mask path that is differentiable in the forward
//              value as well.
enum class MaskMode { kOff, kApply, kRelaxed };

struct RenderConfig {
    double near_plane = 0.05;
    double sigma_cutoff = 3.0;       // splat footprint radius in standard deviations
    double cov2d_floor = 0.3;        // added to the 2D covariance diagonal (px^2)
    double alpha_max = 0.999;
    double transmittance_min = 1e-4; // early termination threshold
    double mask_epsilon = 0.01;
    Eigen::Vector3d background = Eigen::Vector3d::Zero();
    MaskMode mask_mode = MaskMode::kOff;
};

// Attribute arrays for the Gaussians participating in one render, in render
// order. Deformable attributes live here (possibly produced by a motion
// field); colors and mask logits are read from the source cloud.
struct RenderInput {
    const GaussianCloud* cloud = nullptr;
    std::vector<int32_t> source_index;   // render row -> cloud row
    std::vector<double> positions;       // 3n
    std::vector<double> log_scales;      // 3n
    std::vector<double> rotations;       // 4n, possibly unnormalized
    std::vector<double> opacity_logits;  // n

    size_t size() const { return opacity_logits.size(); }
};

// Borrows all (or a subset of) rows of a cloud with identity deformation.
RenderInput make_render_input(const GaussianCloud& cloud);
RenderInput make_render_input(const GaussianCloud& cloud, const std::vector<int32_t>& rows);

// A Gaussian after perspective projection, with the intermediates the
// backward pass replays.
struct SplattedGaussian {
    int32_t input_index = -1;
    Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov2d = Eigen::Matrix2d::Identity();      // after the eigenvalue floor
    Eigen::Matrix2d cov2d_inv = Eigen::Matrix2d::Identity();
    double depth = 0.0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();           // clamped, view-dependent
    double alpha_base = 0.0;                                   // opacity * mask value
    double radius = 0.0;                                       // pixels
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;                        // inclusive pixel rect

    // retained for the backward pass
    Eigen::Vector3d color_pre = Eigen::Vector3d::Zero();
    Eigen::Vector3d cam_point = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, 2, 3> proj_lin = Eigen::Matrix<double, 2, 3>::Zero();  // J * W
    Eigen::Matrix3d sigma3d = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Eigen::Vector4d q_hat = Eigen::Vector4d(1, 0, 0, 0);
    Eigen::Vector3d scale = Eigen::Vector3d::Ones();
    Eigen::Vector3d view_dir = Eigen::Vector3d::UnitZ();
    double view_dist = 1.0;
    double opacity = 0.0;
    double mask_value = 1.0;
};

// Projects one Gaussian; nullopt when culled (behind the near plane or with a
// sigma_cutoff-sized footprint fully outside the image).
std::optional<SplattedGaussian> project_gaussian(const GaussianPrimitive& g, const Camera& camera,
                                                 const RenderConfig& config);

// Unnormalized 2D Gaussian falloff exp(-0.5 d^T cov2d^-1 d) at a pixel.
double gaussian_weight(const Eigen::Vector2d& pixel, const SplattedGaussian& splat);

// Front-to-back alpha compositing over depth-ordered (color, alpha) pairs.
Eigen::Vector3d composite_pixel(std::span<const std::pair<Eigen::Vector3d, double>> contributions,
                                const Eigen::Vector3d& background, double transmittance_min = 1e-4);

struct PixelContribution {
    int32_t splat;
    double weight;  // Gaussian falloff at the pixel
};

struct RenderOutput {
    Image image;      // after per-camera color tune and clamping
    Image image_pre;  // composited image before the color tune
    std::vector<double> transmittance;       // per pixel
    std::vector<SplattedGaussian> splats;    // depth-sorted
    std::vector<PixelContribution> contribs; // per-pixel lists, front-to-back
    std::vector<uint32_t> contrib_offset;    // size W*H+1
    RenderConfig config;
    int width = 0;
    int height = 0;
};

// Full forward pass: project -> global depth sort -> per-pixel compositing ->
// per-camera affine color tune. Deterministic for a fixed thread count.
RenderOutput render(const RenderInput& input, const Camera& camera, const RenderConfig& config);

// Gradients produced by the backward pass, parallel to the RenderInput rows.
struct RenderGrads {
    std::vector<double> d_positions;       // 3n
    std::vector<double> d_log_scales;      // 3n
    std::vector<double> d_rotations;       // 4n
    std::vector<double> d_opacity_logits;  // n
    std::vector<double> d_colors_dc;       // 3n
    std::vector<double> d_sh1;             // 9n
    std::vector<double> d_mask_logits;     // n
    Eigen::Vector3d d_gain = Eigen::Vector3d::Zero();
    Eigen::Vector3d d_bias = Eigen::Vector3d::Zero();
};

// Analytic reverse-mode pass. `d_image` is d(loss)/d(final image).
RenderGrads render_backward(const RenderOutput& out, const RenderInput& input, const Camera& camera,
                            const Image& d_image);

}  // namespace relaygs
