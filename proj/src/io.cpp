#include "papm/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "papm/errors.hpp"

namespace papm {

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                          static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (!in) throw io_error("map file truncated in header");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

double get_f64_le(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw io_error("map file truncated in payload");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(u);
}

} // namespace

PointSet read_points(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("malformed point file: ") + e.what());
    }
    if (!j.is_object()) throw io_error("point file must be a JSON object");
    if (!j.contains("image_width") || !j["image_width"].is_number_integer())
        throw io_error("missing or non-integer field image_width");
    if (!j.contains("image_height") || !j["image_height"].is_number_integer())
        throw io_error("missing or non-integer field image_height");
    if (!j.contains("points") || !j["points"].is_array())
        throw io_error("missing or non-array field points");

    PointSet ps;
    ps.width = j["image_width"].get<int>();
    ps.height = j["image_height"].get<int>();
    const auto& arr = j["points"];
    ps.points.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw io_error("points[" + std::to_string(i) + "] is not an [x, y] number pair");
        ps.points.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    validate(ps);
    return ps;
}

PointSet read_points_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open point file: " + path);
    return read_points(f);
}

void write_points(const PointSet& ps, std::ostream& out) {
    nlohmann::json j;
    j["image_width"] = ps.width;
    j["image_height"] = ps.height;
    nlohmann::json arr = nlohmann::json::array();
    for (const Point& p : ps.points) arr.push_back({p.x, p.y});
    j["points"] = std::move(arr);
    out << j.dump(2) << '\n';
}

void write_points_file(const PointSet& ps, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open point file for writing: " + path);
    write_points(ps, f);
}

void write_map(const GridMap& map, std::ostream& out, MapFormat format) {
    if (format == MapFormat::text) {
        out << "PAPM 1 " << map.rows << ' ' << map.cols << '\n';
        std::ostringstream line;
        line.precision(std::numeric_limits<double>::max_digits10);
        for (int r = 0; r < map.rows; ++r) {
            line.str({});
            for (int c = 0; c < map.cols; ++c) {
                if (c) line << ' ';
                line << map.at(r, c);
            }
            out << line.str() << '\n';
        }
    } else {
        out.write("PAPM", 4);
        out.put('\x01');
        put_u32_le(out, static_cast<std::uint32_t>(map.rows));
        put_u32_le(out, static_cast<std::uint32_t>(map.cols));
        for (double v : map.values) put_f64_le(out, v);
    }
    if (!out) throw io_error("failed writing map");
}

GridMap read_map(std::istream& in) {
    std::array<char, 5> head{};
    in.read(head.data(), 5);
    if (!in || std::memcmp(head.data(), "PAPM", 4) != 0)
        throw io_error("bad magic: not a PAPM map file");

    GridMap map;
    if (head[4] == '\x01') {
        std::uint32_t h = get_u32_le(in);
        std::uint32_t w = get_u32_le(in);
        if (h == 0 || w == 0) throw io_error("map header has zero dimension");
        map = GridMap(static_cast<int>(h), static_cast<int>(w));
        for (double& v : map.values) v = get_f64_le(in);
    } else if (head[4] == ' ') {
        int version = 0, h = 0, w = 0;
        in >> version >> h >> w;
        if (!in || version != 1) throw io_error("bad text map header (expected version 1)");
        if (h <= 0 || w <= 0) throw io_error("map header has non-positive dimension");
        map = GridMap(h, w);
        for (std::size_t i = 0; i < map.size(); ++i) {
            if (!(in >> map.values[i]))
                throw io_error("map payload shorter than header dimensions " +
                               std::to_string(h) + "x" + std::to_string(w));
        }
    } else {
        throw io_error("bad magic: unknown PAPM map variant");
    }
    return map;
}

void write_map_file(const GridMap& map, const std::string& path, MapFormat format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open map file for writing: " + path);
    write_map(map, f, format);
}

GridMap read_map_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open map file: " + path);
    return read_map(f);
}

} // namespace papm
