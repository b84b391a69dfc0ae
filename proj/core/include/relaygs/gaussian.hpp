#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace relaygs {

// Which population a Gaussian belongs to. Relay Gaussians additionally carry
// the index of the temporal segment they serve.
enum class GaussianGroup : int32_t {
    kBackground = 0,
    kForeground = 1,
    kRelay = 2,
};

// One Gaussian primitive, as a plain record. Storage inside GaussianCloud is
// struct-of-arrays; this view exists for construction and tests.
struct GaussianPrimitive {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
    Eigen::Vector4d rotation = Eigen::Vector4d(1, 0, 0, 0);  // quaternion (w, x, y, z)
    double opacity_logit = 0.0;
    Eigen::Vector3d color_dc = Eigen::Vector3d::Constant(0.5);
    // Degree-1 spherical harmonics: 3 directional coefficients per channel,
    // coefficient-major (coeff k, channel c) -> sh1[3k + c].
    Eigen::Matrix<double, 9, 1> sh1 = Eigen::Matrix<double, 9, 1>::Zero();
    double mask_logit = 0.0;
    Eigen::Vector3d gamma = Eigen::Vector3d::Zero();  // meaningful iff group != background
    GaussianGroup group = GaussianGroup::kBackground;
    int32_t segment_id = -1;  // >= 0 iff group == relay
};

// Struct-of-arrays container for a set of Gaussians. Attribute arrays are the
// flat storage the optimizer binds to directly.
class GaussianCloud {
public:
    std::vector<double> positions;       // 3N
    std::vector<double> log_scales;      // 3N
    std::vector<double> rotations;       // 4N, (w, x, y, z)
    std::vector<double> opacity_logits;  // N
    std::vector<double> colors_dc;       // 3N
    std::vector<double> sh1;             // 9N
    std::vector<double> mask_logits;     // N
    std::vector<double> gammas;          // 3N, zero for background rows
    std::vector<int32_t> groups;         // N
    std::vector<int32_t> segment_ids;    // N, -1 where not relay
    uint64_t generation = 0;             // bumped by every densify/prune pass

    size_t size() const { return opacity_logits.size(); }
    bool empty() const { return opacity_logits.empty(); }

    void push_back(const GaussianPrimitive& g);
    GaussianPrimitive record(size_t i) const;

    Eigen::Vector3d position(size_t i) const { return Eigen::Map<const Eigen::Vector3d>(&positions[3 * i]); }
    Eigen::Vector3d log_scale(size_t i) const { return Eigen::Map<const Eigen::Vector3d>(&log_scales[3 * i]); }
    Eigen::Vector4d rotation(size_t i) const { return Eigen::Map<const Eigen::Vector4d>(&rotations[4 * i]); }
    Eigen::Vector3d color_dc(size_t i) const { return Eigen::Map<const Eigen::Vector3d>(&colors_dc[3 * i]); }
    Eigen::Vector3d gamma(size_t i) const { return Eigen::Map<const Eigen::Vector3d>(&gammas[3 * i]); }
    GaussianGroup group(size_t i) const { return static_cast<GaussianGroup>(groups[i]); }

    // Keeps rows where keep[i] is true, preserving order. Returns old->new
    // index mapping (-1 for dropped rows).
    std::vector<int64_t> filter(const std::vector<bool>& keep);

    void append(const GaussianCloud& other);
    void clear();

    // Consistency checks (array lengths, gamma/group coupling, relay tags).
    void validate() const;
};

// Covariance factorization Sigma = R * S * S^T * R^T with S = diag(exp(log_scale))
// and R from the (renormalized) quaternion. Throws InvalidRotationError when
// the quaternion norm is (numerically) zero.
Eigen::Matrix3d covariance_from_params(const Eigen::Vector3d& log_scale, const Eigen::Vector4d& rotation);

// Rotation matrix of a unit quaternion (w, x, y, z).
Eigen::Matrix3d quat_to_rotation(const Eigen::Vector4d& q_unit);

// d(loss)/d(q_unit) given d(loss)/dR at q_unit.
Eigen::Vector4d quat_rotation_backward(const Eigen::Vector4d& q_unit, const Eigen::Matrix3d& dR);

// Normalization q_hat = q / |q| and its reverse-mode rule.
Eigen::Vector4d quat_normalize(const Eigen::Vector4d& q);
Eigen::Vector4d quat_normalize_backward(const Eigen::Vector4d& q_raw, const Eigen::Vector4d& d_q_hat);

}  // namespace relaygs
