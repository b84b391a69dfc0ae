#include "relaygs/camera.hpp"

#include <cmath>

#include "relaygs/error.hpp"

namespace relaygs {

void Camera::validate() const {
    if (!(focal_x > 0.0) || !(focal_y > 0.0)) throw ConfigError("camera: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("camera: non-positive image size");
    const Eigen::Matrix3d should_be_identity = world_to_cam_rot * world_to_cam_rot.transpose();
    if ((should_be_identity - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9)
        throw ConfigError("camera: rotation is not orthonormal");
}

Camera make_look_at_camera(int32_t id, const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                           const Eigen::Vector3d& up, double focal, int width, int height) {
    Camera cam;
    cam.id = id;
    cam.width = width;
    cam.height = height;
    cam.focal_x = focal;
    cam.focal_y = focal;
    cam.principal_x = width / 2.0;
    cam.principal_y = height / 2.0;

    const Eigen::Vector3d forward = (target - eye).normalized();
    Eigen::Vector3d right = forward.cross(up).normalized();
    if (!right.allFinite() || right.norm() < 0.5) {
        // up parallel to the view direction; pick any perpendicular axis
        right = forward.cross(Eigen::Vector3d::UnitX()).normalized();
        if (right.norm() < 0.5) right = forward.cross(Eigen::Vector3d::UnitY()).normalized();
    }
    const Eigen::Vector3d down = forward.cross(right).normalized();

    cam.world_to_cam_rot.row(0) = right.transpose();
    cam.world_to_cam_rot.row(1) = down.transpose();
    cam.world_to_cam_rot.row(2) = forward.transpose();
    cam.world_to_cam_trans = -cam.world_to_cam_rot * eye;
    return cam;
}

}  // namespace relaygs
