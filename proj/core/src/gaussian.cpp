#include "relaygs/gaussian.hpp"

#include <cmath>

#include "relaygs/error.hpp"

namespace relaygs {

void GaussianCloud::push_back(const GaussianPrimitive& g) {
    positions.insert(positions.end(), g.position.data(), g.position.data() + 3);
    log_scales.insert(log_scales.end(), g.log_scale.data(), g.log_scale.data() + 3);
    rotations.insert(rotations.end(), g.rotation.data(), g.rotation.data() + 4);
    opacity_logits.push_back(g.opacity_logit);
    colors_dc.insert(colors_dc.end(), g.color_dc.data(), g.color_dc.data() + 3);
    sh1.insert(sh1.end(), g.sh1.data(), g.sh1.data() + 9);
    mask_logits.push_back(g.mask_logit);
    gammas.insert(gammas.end(), g.gamma.data(), g.gamma.data() + 3);
    groups.push_back(static_cast<int32_t>(g.group));
    segment_ids.push_back(g.segment_id);
}

GaussianPrimitive GaussianCloud::record(size_t i) const {
    GaussianPrimitive g;
    g.position = position(i);
    g.log_scale = log_scale(i);
    g.rotation = rotation(i);
    g.opacity_logit = opacity_logits[i];
    g.color_dc = color_dc(i);
    g.sh1 = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(&sh1[9 * i]);
    g.mask_logit = mask_logits[i];
    g.gamma = gamma(i);
    g.group = group(i);
    g.segment_id = segment_ids[i];
    return g;
}

std::vector<int64_t> GaussianCloud::filter(const std::vector<bool>& keep) {
    if (keep.size() != size()) throw InternalError("GaussianCloud::filter: mask size mismatch");
    std::vector<int64_t> map(size(), -1);
    size_t out = 0;
    for (size_t i = 0; i < size(); ++i) {
        if (!keep[i]) continue;
        map[i] = static_cast<int64_t>(out);
        if (out != i) {
            for (int k = 0; k < 3; ++k) positions[3 * out + k] = positions[3 * i + k];
            for (int k = 0; k < 3; ++k) log_scales[3 * out + k] = log_scales[3 * i + k];
            for (int k = 0; k < 4; ++k) rotations[4 * out + k] = rotations[4 * i + k];
            opacity_logits[out] = opacity_logits[i];
            for (int k = 0; k < 3; ++k) colors_dc[3 * out + k] = colors_dc[3 * i + k];
            for (int k = 0; k < 9; ++k) sh1[9 * out + k] = sh1[9 * i + k];
            mask_logits[out] = mask_logits[i];
            for (int k = 0; k < 3; ++k) gammas[3 * out + k] = gammas[3 * i + k];
            groups[out] = groups[i];
            segment_ids[out] = segment_ids[i];
        }
        ++out;
    }
    positions.resize(3 * out);
    log_scales.resize(3 * out);
    rotations.resize(4 * out);
    opacity_logits.resize(out);
    colors_dc.resize(3 * out);
    sh1.resize(9 * out);
    mask_logits.resize(out);
    gammas.resize(3 * out);
    groups.resize(out);
    segment_ids.resize(out);
    return map;
}

void GaussianCloud::append(const GaussianCloud& other) {
    positions.insert(positions.end(), other.positions.begin(), other.positions.end());
    log_scales.insert(log_scales.end(), other.log_scales.begin(), other.log_scales.end());
    rotations.insert(rotations.end(), other.rotations.begin(), other.rotations.end());
    opacity_logits.insert(opacity_logits.end(), other.opacity_logits.begin(), other.opacity_logits.end());
    colors_dc.insert(colors_dc.end(), other.colors_dc.begin(), other.colors_dc.end());
    sh1.insert(sh1.end(), other.sh1.begin(), other.sh1.end());
    mask_logits.insert(mask_logits.end(), other.mask_logits.begin(), other.mask_logits.end());
    gammas.insert(gammas.end(), other.gammas.begin(), other.gammas.end());
    groups.insert(groups.end(), other.groups.begin(), other.groups.end());
    segment_ids.insert(segment_ids.end(), other.segment_ids.begin(), other.segment_ids.end());
}

void GaussianCloud::clear() {
    positions.clear();
    log_scales.clear();
    rotations.clear();
    opacity_logits.clear();
    colors_dc.clear();
    sh1.clear();
    mask_logits.clear();
    gammas.clear();
    groups.clear();
    segment_ids.clear();
}

void GaussianCloud::validate() const {
    const size_t n = size();
    if (positions.size() != 3 * n || log_scales.size() != 3 * n || rotations.size() != 4 * n ||
        colors_dc.size() != 3 * n || sh1.size() != 9 * n || mask_logits.size() != n || gammas.size() != 3 * n ||
        groups.size() != n || segment_ids.size() != n) {
        throw InternalError("GaussianCloud: attribute array length mismatch");
    }
    for (size_t i = 0; i < n; ++i) {
        const auto g = static_cast<GaussianGroup>(groups[i]);
        if (g == GaussianGroup::kRelay && segment_ids[i] < 0)
            throw InternalError("GaussianCloud: relay Gaussian without segment tag");
        if (g != GaussianGroup::kRelay && segment_ids[i] >= 0)
            throw InternalError("GaussianCloud: segment tag on non-relay Gaussian");
    }
}

Eigen::Matrix3d quat_to_rotation(const Eigen::Vector4d& q) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Eigen::Vector4d quat_rotation_backward(const Eigen::Vector4d& q, const Eigen::Matrix3d& dR) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Vector4d dq;
    dq[0] = 2 * (-z * dR(0, 1) + y * dR(0, 2) + z * dR(1, 0) - x * dR(1, 2) - y * dR(2, 0) + x * dR(2, 1));
    dq[1] = 2 * (y * dR(0, 1) + z * dR(0, 2) + y * dR(1, 0) - 2 * x * dR(1, 1) - w * dR(1, 2) + z * dR(2, 0) +
                 w * dR(2, 1) - 2 * x * dR(2, 2));
    dq[2] = 2 * (-2 * y * dR(0, 0) + x * dR(0, 1) + w * dR(0, 2) + x * dR(1, 0) + z * dR(1, 2) - w * dR(2, 0) +
                 z * dR(2, 1) - 2 * y * dR(2, 2));
    dq[3] = 2 * (-2 * z * dR(0, 0) - w * dR(0, 1) + x * dR(0, 2) + w * dR(1, 0) - 2 * z * dR(1, 1) + y * dR(1, 2) +
                 x * dR(2, 0) + y * dR(2, 1));
    return dq;
}

Eigen::Vector4d quat_normalize(const Eigen::Vector4d& q) {
    const double n = q.norm();
    if (!(n > 1e-12)) throw InvalidRotationError("zero-norm quaternion");
    return q / n;
}

Eigen::Vector4d quat_normalize_backward(const Eigen::Vector4d& q_raw, const Eigen::Vector4d& d_q_hat) {
    const double n = q_raw.norm();
    const Eigen::Vector4d q_hat = q_raw / n;
    return (d_q_hat - q_hat * q_hat.dot(d_q_hat)) / n;
}

Eigen::Matrix3d covariance_from_params(const Eigen::Vector3d& log_scale, const Eigen::Vector4d& rotation) {
    const Eigen::Vector4d q = quat_normalize(rotation);
    const Eigen::Matrix3d r = quat_to_rotation(q);
    const Eigen::Vector3d s = log_scale.array().exp();
    const Eigen::Matrix3d m = r * s.asDiagonal();
    return m * m.transpose();
}

}  // namespace relaygs
