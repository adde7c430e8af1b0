#include "partmc/scene/camera.h"

#include <cmath>
#include <stdexcept>

namespace partmc {

Camera::Camera(const CameraDesc& desc) : desc_(desc) {
    if (desc.width <= 0 || desc.height <= 0)
        throw std::invalid_argument("camera resolution must be positive");
    if (!(desc.fov > 0.0 && desc.fov < 180.0))
        throw std::invalid_argument("camera fov must be in (0, 180) degrees");
    forward_ = normalize(desc.lookat - desc.position);
    right_ = normalize(cross(forward_, desc.up));
    up_ = cross(right_, forward_);
    half_h_ = std::tan(0.5 * desc.fov * kPi / 180.0);
    half_w_ = half_h_ * desc.width / desc.height;
    film_area_ = 4.0 * half_w_ * half_h_;
}

Ray Camera::generate_ray(Vec2 film) const {
    const double sx = (2.0 * film.x / desc_.width - 1.0) * half_w_;
    const double sy = (1.0 - 2.0 * film.y / desc_.height) * half_h_;
    return {desc_.position, normalize(forward_ + right_ * sx + up_ * sy)};
}

std::optional<Vec2> Camera::project(const Vec3& point) const {
    const Vec3 d = point - desc_.position;
    const double z = dot(d, forward_);
    if (z <= 0.0)
        return std::nullopt;
    const double sx = dot(d, right_) / z;
    const double sy = dot(d, up_) / z;
    const Vec2 film{(sx / half_w_ + 1.0) * 0.5 * desc_.width, (1.0 - sy / half_h_) * 0.5 * desc_.height};
    if (!on_film(film))
        return std::nullopt;
    return film;
}

double Camera::importance(const Vec3& direction) const {
    const double c = dot(direction, forward_);
    if (c <= 0.0)
        return 0.0;
    return 1.0 / (film_area_ * c * c * c * c);
}

double Camera::film_jacobian(const Vec3& point, const Vec3& normal) const {
    const Vec3 d = point - desc_.position;
    const double dist2 = length_squared(d);
    const Vec3 w = d / std::sqrt(dist2);
    const double cos0 = dot(w, forward_);
    if (cos0 <= 0.0)
        return 0.0;
    return std::abs(dot(w, normal)) / (dist2 * cos0 * cos0 * cos0);
}

}  // namespace partmc
