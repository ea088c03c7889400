#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "datt/anchors.hpp"

namespace datt {

// Model frame: +x = diver's anatomical left (image right at frontal pose),
// +y = up, +z = out of the face toward the camera. Units: millimeters.
//
// Keypoint layout:
//   p1/p2/p3  top-left / top-center / top-right of the mask rim
//   p4/p5     left / right mid-rim
//   p6/p8     bottom-left / bottom-right rim
//   p7        nose bridge (mask bottom-center)
//   p9        snorkel / regulator
//   p10       chin
//
// p2, p7, p9, p10 sit on one 3D line inside the midline plane x = 0 (their
// projection is therefore collinear at every pose); (p1,p3), (p4,p5), (p6,p8)
// are exact mirror pairs across that plane.

struct ColorU8 {
    uint8_t r = 0, g = 0, b = 0;
};

struct Triangle {
    int a = 0, b = 0, c = 0;
    ColorU8 color;
};

struct TriMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Triangle> triangles;
};

struct HeadModelParams {
    double rim_half_w = 40.0;   // mask rim half width at p4/p5
    double rim_top = 40.0;      // y of p2
    double rim_bottom = -12.0;  // y of lower rim edge
    double midline_slope = -0.2;   // dz/dy of the inner keypoint line
    double midline_z0 = 1.0;       // z of the line at y = 0
    double chin_y = -55.0;
    double head_rx = 55.0, head_ry = 78.0, head_rz = 48.0;
    double head_cy = -5.0, head_cz = -45.0;
    double snorkel_radius = 9.0;
};

struct HeadModel3D {
    std::array<Eigen::Vector3d, 10> points3d;
    TriMesh mesh;
    HeadModelParams params;
};

struct HeadPose {
    double yaw_deg = 0;    // + = head turned to the diver's left
    double pitch_deg = 0;  // + = looking up
    double roll_deg = 0;
    Eigen::Vector3d translation{0, 0, 600};  // camera frame, mm, z > 0
};

struct CameraIntrinsics {
    double focal_px = 300;
    double cx = 160, cy = 160;
    int width = 320, height = 320;
};

HeadModel3D make_head_model(const HeadModelParams& params);
HeadModel3D canonical_head_model();

// Rotation applied to model points before the camera-axis flip:
// Rz(roll) * Rx(pitch) * Ry(yaw).
Eigen::Matrix3d pose_rotation(const HeadPose& pose);

// Model axes -> camera axes (x right, y down, z forward): diag(1, -1, -1).
Eigen::Matrix3d model_to_camera_flip();

// Full model->camera rotation including the axis flip.
Eigen::Matrix3d camera_rotation(const HeadPose& pose);

// Extract yaw/pitch/roll (degrees) from a pose_rotation()-convention matrix.
void euler_from_rotation(const Eigen::Matrix3d& rot, double& yaw_deg, double& pitch_deg,
                         double& roll_deg);

Eigen::Vector3d to_camera(const Eigen::Vector3d& model_point, const HeadPose& pose);

Eigen::Vector2d project_point(const Eigen::Vector3d& camera_point, const CameraIntrinsics& cam);

// Pinhole projection of the 10 keypoints; throws NonPositiveDepth if any
// transformed point has z <= 0. Out-of-frame points are still returned.
Keypoints project_keypoints(const HeadModel3D& model, const HeadPose& pose,
                            const CameraIntrinsics& cam);

// Bounding box of the projected mesh vertices (an analytic stand-in for the
// rendered silhouette box), padded by `pad_fraction` per side.
BBox project_head_extent(const HeadModel3D& model, const HeadPose& pose,
                         const CameraIntrinsics& cam, double pad_fraction);

}  // namespace datt
