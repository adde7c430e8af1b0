#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "partmc/scene/shape.h"

namespace partmc {

struct ShapeHit {
    double t = 0.0;
    Vec3 normal;
    int index = -1;  // into the shape list the BVH was built over
};

/// Binary bounding volume hierarchy, median split on the longest centroid axis.
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(std::span<const Shape> shapes);

    std::optional<ShapeHit> intersect(std::span<const Shape> shapes, const Ray& ray, double t_min, double t_max) const;
    bool any_hit(std::span<const Shape> shapes, const Ray& ray, double t_min, double t_max) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Bounds3 bounds;
        int32_t first = 0;  // leaf: first index into order_; interior: right child
        int32_t count = 0;  // 0 for interior nodes (left child is node+1)
    };

    int build(std::span<const Bounds3> bounds, int begin, int end);

    std::vector<Node> nodes_;
    std::vector<int> order_;
};

/// Brute-force reference used to validate the hierarchy.
std::optional<ShapeHit> intersect_linear(std::span<const Shape> shapes, const Ray& ray, double t_min, double t_max);

}  // namespace partmc
