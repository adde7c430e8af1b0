#include "partmc/scene/scene_io.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace partmc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw SceneError("scene: " + field + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object())
        fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end())
        fail(where.empty() ? key : where + "." + key, "missing required field");
    return *it;
}

double number(const json& v, const std::string& field) {
    if (!v.is_number())
        fail(field, "expected a number");
    return v.get<double>();
}

Vec3 vec3(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3)
        fail(field, "expected an array of 3 numbers");
    return {number(v[0], field + "[0]"), number(v[1], field + "[1]"), number(v[2], field + "[2]")};
}

Rgb rgb(const json& v, const std::string& field) {
    const Vec3 c = vec3(v, field);
    return {c.x, c.y, c.z};
}

int positive_int(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        fail(field, "expected a positive integer");
    return v.get<int>();
}

Camera parse_camera(const json& cam, const SceneOverrides& ov) {
    CameraDesc d;
    d.position = vec3(require(cam, "position", "camera"), "camera.position");
    d.lookat = vec3(require(cam, "lookat", "camera"), "camera.lookat");
    d.up = vec3(require(cam, "up", "camera"), "camera.up");
    d.fov = number(require(cam, "fov", "camera"), "camera.fov");
    d.width = positive_int(require(cam, "width", "camera"), "camera.width");
    d.height = positive_int(require(cam, "height", "camera"), "camera.height");
    if (ov.width)
        d.width = *ov.width;
    if (ov.height)
        d.height = *ov.height;
    if (!(d.fov > 0.0 && d.fov < 180.0))
        fail("camera.fov", "must be in (0, 180) degrees");
    if (d.width <= 0 || d.height <= 0)
        fail("camera.width", "resolution must be positive");
    if (length_squared(d.lookat - d.position) == 0.0)
        fail("camera.lookat", "must differ from camera.position");
    if (length_squared(cross(d.lookat - d.position, d.up)) == 0.0)
        fail("camera.up", "must not be parallel to the view direction");
    return Camera(d);
}

Material parse_material(const json& m, const std::string& where) {
    Material mat;
    const json& name = require(m, "name", where);
    if (!name.is_string() || name.get<std::string>().empty())
        fail(where + ".name", "expected a non-empty string");
    mat.name = name.get<std::string>();
    const json& kind = require(m, "kind", where);
    const std::string k = kind.is_string() ? kind.get<std::string>() : "";
    if (k == "diffuse")
        mat.kind = MaterialKind::diffuse;
    else if (k == "mirror")
        mat.kind = MaterialKind::mirror;
    else if (k == "glass")
        mat.kind = MaterialKind::glass;
    else
        fail(where + ".kind", "expected one of diffuse, mirror, glass");
    mat.albedo = rgb(require(m, "albedo", where), where + ".albedo");
    for (int c = 0; c < 3; ++c)
        if (!(mat.albedo[c] >= 0.0 && mat.albedo[c] <= 1.0))
            fail(where + ".albedo", "channels must lie in [0, 1]");
    if (mat.kind == MaterialKind::glass) {
        mat.ior = number(require(m, "ior", where), where + ".ior");
        if (!(mat.ior > 1.0))
            fail(where + ".ior", "must be greater than 1");
    }
    return mat;
}

Shape parse_shape(const json& p, const std::string& where) {
    const json& type = require(p, "type", where);
    const std::string t = type.is_string() ? type.get<std::string>() : "";
    if (t == "sphere") {
        const Vec3 c = vec3(require(p, "center", where), where + ".center");
        const double r = number(require(p, "radius", where), where + ".radius");
        if (!(r > 0.0))
            fail(where + ".radius", "must be positive");
        return Shape::sphere(c, r);
    }
    if (t == "triangle") {
        const json& v = require(p, "vertices", where);
        if (!v.is_array() || v.size() != 3)
            fail(where + ".vertices", "expected 3 vertices");
        const Vec3 a = vec3(v[0], where + ".vertices[0]");
        const Vec3 b = vec3(v[1], where + ".vertices[1]");
        const Vec3 c = vec3(v[2], where + ".vertices[2]");
        if (length_squared(cross(b - a, c - a)) == 0.0)
            fail(where + ".vertices", "triangle is degenerate");
        return Shape::triangle(a, b, c);
    }
    if (t == "quad") {
        const Vec3 o = vec3(require(p, "origin", where), where + ".origin");
        const Vec3 e1 = vec3(require(p, "edge1", where), where + ".edge1");
        const Vec3 e2 = vec3(require(p, "edge2", where), where + ".edge2");
        if (length_squared(cross(e1, e2)) == 0.0)
            fail(where + ".edge2", "quad edges are parallel");
        return Shape::quad(o, e1, e2);
    }
    fail(where + ".type", "expected one of sphere, triangle, quad");
}

}  // namespace

Scene scene_from_json(const json& doc, const SceneOverrides& overrides) {
    if (!doc.is_object())
        fail("<root>", "expected an object");
    if (const auto it = doc.find("schema"); it != doc.end()) {
        if (!it->is_number_integer() || it->get<int>() != kSceneSchemaVersion)
            fail("schema", "unsupported version (expected " + std::to_string(kSceneSchemaVersion) + ")");
    }
    std::string name = "scene";
    if (const auto it = doc.find("name"); it != doc.end() && it->is_string())
        name = it->get<std::string>();

    Camera camera = parse_camera(require(doc, "camera", ""), overrides);

    const json& mats = require(doc, "materials", "");
    if (!mats.is_array() || mats.empty())
        fail("materials", "expected a non-empty array");
    std::vector<Material> materials;
    std::map<std::string, int> by_name;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const std::string where = "materials[" + std::to_string(i) + "]";
        Material m = parse_material(mats[i], where);
        if (by_name.count(m.name))
            fail(where + ".name", "duplicate material '" + m.name + "'");
        by_name[m.name] = static_cast<int>(materials.size());
        materials.push_back(std::move(m));
    }

    const json& prims = require(doc, "primitives", "");
    if (!prims.is_array())
        fail("primitives", "expected an array");
    std::vector<Primitive> primitives;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const std::string where = "primitives[" + std::to_string(i) + "]";
        Primitive prim;
        prim.shape = parse_shape(prims[i], where);
        const json& mref = require(prims[i], "material", where);
        if (!mref.is_string() || !by_name.count(mref.get<std::string>()))
            fail(where + ".material", "unknown material " + mref.dump());
        prim.material = by_name[mref.get<std::string>()];
        if (const auto it = prims[i].find("emission"); it != prims[i].end()) {
            prim.emission = rgb(*it, where + ".emission");
            if (!prim.emission.is_nonnegative())
                fail(where + ".emission", "must be nonnegative");
            prim.emission *= overrides.emission_scale;
        }
        primitives.push_back(prim);
    }
    return Scene(std::move(name), std::move(camera), std::move(materials), std::move(primitives));
}

Scene parse_scene(std::string_view text, const SceneOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line/column pair.
        const std::size_t end = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SceneError("scene: parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
    return scene_from_json(doc, overrides);
}

Scene load_scene(const std::filesystem::path& path, const SceneOverrides& overrides) {
    std::ifstream in(path);
    if (!in)
        throw SceneError("scene: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str(), overrides);
}

// ---------------------------------------------------------------------------
// Built-in scenes. All live in roughly the unit cube.

namespace {

json material(const std::string& name, const std::string& kind, Rgb albedo, double ior = 0.0) {
    json m = {{"name", name}, {"kind", kind}, {"albedo", {albedo.r, albedo.g, albedo.b}}};
    if (ior > 0.0)
        m["ior"] = ior;
    return m;
}

json quad(Vec3 o, Vec3 e1, Vec3 e2, const std::string& mat) {
    return {{"type", "quad"},
            {"origin", {o.x, o.y, o.z}},
            {"edge1", {e1.x, e1.y, e1.z}},
            {"edge2", {e2.x, e2.y, e2.z}},
            {"material", mat}};
}

json sphere(Vec3 c, double r, const std::string& mat) {
    return {{"type", "sphere"}, {"center", {c.x, c.y, c.z}}, {"radius", r}, {"material", mat}};
}

json emissive(json prim, Rgb le) {
    prim["emission"] = {le.r, le.g, le.b};
    return prim;
}

json camera(Vec3 pos, Vec3 at, double fov, int w, int h) {
    return {{"position", {pos.x, pos.y, pos.z}},
            {"lookat", {at.x, at.y, at.z}},
            {"up", {0.0, 1.0, 0.0}},
            {"fov", fov},
            {"width", w},
            {"height", h}};
}

// Open-front box [0,1]^3 seen from -z, with a downward-facing ceiling light.
json cornell_box(const std::string& name, double light_size, Rgb le) {
    json doc;
    doc["schema"] = kSceneSchemaVersion;
    doc["name"] = name;
    doc["camera"] = camera({0.5, 0.5, -1.35}, {0.5, 0.5, 0.5}, 40.0, 64, 64);
    doc["materials"] = {material("white", "diffuse", {0.75, 0.75, 0.75}),
                        material("red", "diffuse", {0.75, 0.2, 0.18}),
                        material("green", "diffuse", {0.18, 0.6, 0.2}),
                        material("black", "diffuse", {0.0, 0.0, 0.0})};
    const double lo = 0.5 - 0.5 * light_size;
    doc["primitives"] = {
        quad({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, "white"),    // floor
        quad({0, 1, 0}, {1, 0, 0}, {0, 0, 1}, "white"),    // ceiling
        quad({0, 0, 1}, {1, 0, 0}, {0, 1, 0}, "white"),    // back
        quad({0, 0, 0}, {0, 1, 0}, {0, 0, 1}, "red"),      // left
        quad({1, 0, 0}, {0, 0, 1}, {0, 1, 0}, "green"),    // right
        emissive(quad({lo, 0.998, lo}, {light_size, 0, 0}, {0, 0, light_size}, "black"), le),
    };
    return doc;
}

json cornell_basic() {
    json doc = cornell_box("cornell-basic", 0.3, {18.0, 15.0, 11.0});
    doc["primitives"].push_back(sphere({0.3, 0.2, 0.62}, 0.2, "white"));
    doc["primitives"].push_back(sphere({0.72, 0.15, 0.35}, 0.15, "white"));
    return doc;
}

json cornell_caustic() {
    json doc = cornell_box("cornell-caustic", 0.2, {40.0, 34.0, 26.0});
    doc["materials"].push_back(material("glass", "glass", {1.0, 1.0, 1.0}, 1.5));
    doc["materials"].push_back(material("mirror", "mirror", {0.95, 0.95, 0.95}));
    doc["primitives"].push_back(sphere({0.68, 0.2, 0.42}, 0.2, "glass"));
    doc["primitives"].push_back(sphere({0.28, 0.18, 0.66}, 0.18, "mirror"));
    return doc;
}

// Room lit indirectly: the only emitter sits inside an open-top shade and faces up.
json veach_lamp() {
    json doc;
    doc["schema"] = kSceneSchemaVersion;
    doc["name"] = "veach-lamp";
    doc["camera"] = camera({0.5, 0.55, -1.35}, {0.5, 0.4, 0.5}, 40.0, 64, 64);
    doc["materials"] = {material("white", "diffuse", {0.8, 0.8, 0.8}),
                        material("warm", "diffuse", {0.8, 0.6, 0.4}),
                        material("shade", "diffuse", {0.7, 0.7, 0.7}),
                        material("glass", "glass", {1.0, 1.0, 1.0}, 1.5),
                        material("black", "diffuse", {0.0, 0.0, 0.0})};
    const double s0 = 0.35, s1 = 0.65, h = 0.3;
    doc["primitives"] = {
        quad({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, "white"),
        quad({0, 1, 0}, {1, 0, 0}, {0, 0, 1}, "white"),
        quad({0, 0, 1}, {1, 0, 0}, {0, 1, 0}, "warm"),
        quad({0, 0, 0}, {0, 1, 0}, {0, 0, 1}, "white"),
        quad({1, 0, 0}, {0, 0, 1}, {0, 1, 0}, "white"),
        // shade walls around the lamp
        quad({s0, 0, s0}, {s1 - s0, 0, 0}, {0, h, 0}, "shade"),
        quad({s0, 0, s1}, {0, h, 0}, {s1 - s0, 0, 0}, "shade"),
        quad({s0, 0, s0}, {0, h, 0}, {0, 0, s1 - s0}, "shade"),
        quad({s1, 0, s0}, {0, 0, s1 - s0}, {0, h, 0}, "shade"),
        emissive(quad({0.42, 0.1, 0.42}, {0, 0, 0.16}, {0.16, 0, 0}, "black"), {60.0, 52.0, 40.0}),
        sphere({0.22, 0.12, 0.3}, 0.12, "glass"),
    };
    return doc;
}

// Closed cube: three inward-facing emitters of radiance 1 and three white walls.
// Every camera ray sees radiance exactly 1.
json furnace() {
    json doc;
    doc["schema"] = kSceneSchemaVersion;
    doc["name"] = "furnace";
    doc["camera"] = camera({0.5, 0.5, 0.3}, {0.55, 0.45, 1.0}, 70.0, 16, 16);
    doc["materials"] = {material("white", "diffuse", {1.0, 1.0, 1.0}), material("black", "diffuse", {0, 0, 0})};
    const Rgb one{1.0, 1.0, 1.0};
    doc["primitives"] = {
        emissive(quad({0, 0, 0}, {0, 1, 0}, {0, 0, 1}, "black"), one),  // x = 0, normal +x
        emissive(quad({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, "black"), one),  // y = 0, normal +y
        emissive(quad({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, "black"), one),  // z = 0, normal +z
        quad({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, "white"),
        quad({0, 1, 0}, {0, 0, 1}, {1, 0, 0}, "white"),
        quad({0, 0, 1}, {1, 0, 0}, {0, 1, 0}, "white"),
    };
    return doc;
}

// Ground plane under a downward light; the only light path is E D L.
json lit_plane() {
    json doc;
    doc["schema"] = kSceneSchemaVersion;
    doc["name"] = "lit-plane";
    doc["camera"] = camera({0.5, 1.2, -0.6}, {0.5, 0.0, 0.5}, 45.0, 16, 16);
    doc["materials"] = {material("white", "diffuse", {0.7, 0.7, 0.7}), material("black", "diffuse", {0, 0, 0})};
    doc["primitives"] = {
        quad({-0.5, 0, -0.5}, {0, 0, 2}, {2, 0, 0}, "white"),
        emissive(quad({0.35, 0.8, 0.35}, {0.3, 0, 0}, {0, 0, 0.3}, "black"), {12.0, 12.0, 12.0}),
    };
    return doc;
}

// lit-plane plus a floating occluder that casts a shadow.
json shadow_plane() {
    json doc = lit_plane();
    doc["name"] = "shadow-plane";
    doc["materials"].push_back(material("grey", "diffuse", {0.5, 0.5, 0.5}));
    doc["primitives"].push_back(quad({0.35, 0.4, 0.4}, {0.25, 0, 0}, {0, 0, 0.2}, "grey"));
    return doc;
}

using Builder = json (*)();
const std::map<std::string, Builder, std::less<>>& builders() {
    static const std::map<std::string, Builder, std::less<>> table = {
        {"cornell-basic", cornell_basic}, {"cornell-caustic", cornell_caustic}, {"veach-lamp", veach_lamp},
        {"furnace", furnace},             {"lit-plane", lit_plane},             {"shadow-plane", shadow_plane},
    };
    return table;
}

}  // namespace

std::vector<std::string> builtin_scene_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : builders())
        names.push_back(name);
    return names;
}

json builtin_scene_json(std::string_view name) {
    const auto it = builders().find(name);
    if (it == builders().end())
        throw SceneError("scene: unknown builtin '" + std::string(name) + "'");
    return it->second();
}

Scene builtin_scene(std::string_view name, const SceneOverrides& overrides) {
    return scene_from_json(builtin_scene_json(name), overrides);
}

Scene resolve_scene(std::string_view spec, const SceneOverrides& overrides) {
    constexpr std::string_view prefix = "builtin:";
    if (spec.starts_with(prefix))
        return builtin_scene(spec.substr(prefix.size()), overrides);
    return load_scene(std::filesystem::path(spec), overrides);
}

}  // namespace partmc
