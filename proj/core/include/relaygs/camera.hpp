#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace relaygs {

// Calibrated pinhole camera with a fixed world-to-camera rigid transform and
// a learnable channel-wise affine color tune (gain, bias).
struct Camera {
    int32_t id = 0;
    int width = 0;
    int height = 0;
    double focal_x = 0.0;
    double focal_y = 0.0;
    double principal_x = 0.0;
    double principal_y = 0.0;
    Eigen::Matrix3d world_to_cam_rot = Eigen::Matrix3d::Identity();
    Eigen::Vector3d world_to_cam_trans = Eigen::Vector3d::Zero();
    Eigen::Vector3d color_gain = Eigen::Vector3d::Ones();
    Eigen::Vector3d color_bias = Eigen::Vector3d::Zero();

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
        return world_to_cam_rot * world + world_to_cam_trans;
    }

    Eigen::Vector3d center() const { return -world_to_cam_rot.transpose() * world_to_cam_trans; }

    // Throws ConfigError on non-positive focals or a non-orthonormal rotation.
    void validate() const;
};

// Camera at `eye` looking at `target` (camera z forward, y down convention).
Camera make_look_at_camera(int32_t id, const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                           const Eigen::Vector3d& up, double focal, int width, int height);

}  // namespace relaygs
