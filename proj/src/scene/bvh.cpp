#include "partmc/scene/bvh.h"

#include <algorithm>
#include <array>
#include <numeric>

namespace partmc {

namespace {
constexpr int kLeafSize = 2;

Vec3 inverse_direction(const Vec3& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }
}  // namespace

Bvh::Bvh(std::span<const Shape> shapes) {
    if (shapes.empty())
        return;
    std::vector<Bounds3> bounds(shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i)
        bounds[i] = shapes[i].bounds();
    order_.resize(shapes.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * shapes.size());
    build(bounds, 0, static_cast<int>(shapes.size()));
}

int Bvh::build(std::span<const Bounds3> bounds, int begin, int end) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Bounds3 node_bounds, centroid_bounds;
    for (int i = begin; i < end; ++i) {
        node_bounds.extend(bounds[order_[i]]);
        centroid_bounds.extend(bounds[order_[i]].centroid());
    }
    nodes_[node_index].bounds = node_bounds;

    if (end - begin <= kLeafSize) {
        nodes_[node_index].first = begin;
        nodes_[node_index].count = end - begin;
        return node_index;
    }

    const int axis = centroid_bounds.longest_axis();
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return bounds[a].centroid()[axis] < bounds[b].centroid()[axis]; });
    build(bounds, begin, mid);
    const int right = build(bounds, mid, end);
    nodes_[node_index].first = right;
    nodes_[node_index].count = 0;
    return node_index;
}

std::optional<ShapeHit> Bvh::intersect(std::span<const Shape> shapes, const Ray& ray, double t_min,
                                       double t_max) const {
    if (nodes_.empty())
        return std::nullopt;
    const Vec3 inv_dir = inverse_direction(ray.direction);
    std::optional<ShapeHit> best;
    std::array<int, 64> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!node.bounds.hit(ray, inv_dir, t_min, t_max))
            continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                const int idx = order_[i];
                if (auto h = shapes[idx].intersect(ray, t_min, t_max)) {
                    t_max = h->t;
                    best = ShapeHit{h->t, h->normal, idx};
                }
            }
        } else {
            stack[top++] = node.first;
            stack[top++] = static_cast<int>(&node - nodes_.data()) + 1;
        }
    }
    return best;
}

bool Bvh::any_hit(std::span<const Shape> shapes, const Ray& ray, double t_min, double t_max) const {
    if (nodes_.empty())
        return false;
    const Vec3 inv_dir = inverse_direction(ray.direction);
    std::array<int, 64> stack;
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!node.bounds.hit(ray, inv_dir, t_min, t_max))
            continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i)
                if (shapes[order_[i]].intersect(ray, t_min, t_max))
                    return true;
        } else {
            stack[top++] = node.first;
            stack[top++] = static_cast<int>(&node - nodes_.data()) + 1;
        }
    }
    return false;
}

std::optional<ShapeHit> intersect_linear(std::span<const Shape> shapes, const Ray& ray, double t_min, double t_max) {
    std::optional<ShapeHit> best;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (auto h = shapes[i].intersect(ray, t_min, t_max)) {
            t_max = h->t;
            best = ShapeHit{h->t, h->normal, static_cast<int>(i)};
        }
    }
    return best;
}

}  // namespace partmc
