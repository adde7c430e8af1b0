#pragma once

#include <optional>

#include "partmc/core/image.h"
#include "partmc/core/math.h"

namespace partmc {

struct CameraDesc {
    Vec3 position{0, 0, 0};
    Vec3 lookat{0, 0, 1};
    Vec3 up{0, 1, 0};
    double fov = 40.0;  // vertical, degrees
    int width = 64;
    int height = 64;
};

/// Pinhole camera. Film coordinates are continuous pixel units with (0, 0) at
/// the top-left corner of the image; pixel (i, j) covers [i, i+1) x [j, j+1).
///
/// Areas on the film are measured on the virtual plane at unit distance, so
/// the importance W_e = 1 / (A cos^4) integrates to one over the film.
class Camera {
public:
    Camera() : Camera(CameraDesc{}) {}
    explicit Camera(const CameraDesc& desc);

    const CameraDesc& desc() const { return desc_; }
    int width() const { return desc_.width; }
    int height() const { return desc_.height; }
    const Vec3& position() const { return desc_.position; }
    const Vec3& forward() const { return forward_; }

    Ray generate_ray(Vec2 film) const;
    /// Film position of a world point, if it lands inside the image.
    std::optional<Vec2> project(const Vec3& point) const;

    bool on_film(Vec2 film) const {
        return film.x >= 0.0 && film.y >= 0.0 && film.x < desc_.width && film.y < desc_.height;
    }
    static PixelCoord pixel_of(Vec2 film) {
        return {static_cast<int>(std::floor(film.x)), static_cast<int>(std::floor(film.y))};
    }

    double film_area() const { return film_area_; }
    /// W_e for a unit direction leaving the camera; 0 behind the film plane.
    double importance(const Vec3& direction) const;
    /// |dA_film / dA(x)| for a surface point x with normal n seen directly from the camera.
    double film_jacobian(const Vec3& point, const Vec3& normal) const;

private:
    CameraDesc desc_;
    Vec3 forward_, right_, up_;
    double half_w_ = 0, half_h_ = 0;
    double film_area_ = 0;
};

}  // namespace partmc
