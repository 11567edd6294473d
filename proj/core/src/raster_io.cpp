#include "chv/raster_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chv/errors.hpp"

namespace chv {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'C', 'H', 'V', '1'};

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f32le(std::string& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32le(out, bits);
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32le(const unsigned char* p) {
    const std::uint32_t bits = get_u32le(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

const char* dtype_name(Raster::Dtype d) { return d == Raster::Dtype::f32 ? "f32" : "c64"; }

Raster::Dtype dtype_from(const std::string& s) {
    if (s == "f32") return Raster::Dtype::f32;
    if (s == "c64") return Raster::Dtype::c64;
    throw IoError("raster: unsupported dtype '" + s + "'");
}

int floats_per_sample(Raster::Dtype d) { return d == Raster::Dtype::f32 ? 1 : 2; }

HologramKind hologram_kind_from(const std::string& s) {
    if (s == "hologram_raw") return HologramKind::raw;
    if (s == "hologram_background") return HologramKind::background;
    if (s == "hologram_subtracted") return HologramKind::subtracted;
    throw IoError("raster: kind '" + s + "' is not a hologram");
}

std::string hologram_kind_tag(HologramKind k) {
    switch (k) {
        case HologramKind::raw: return "hologram_raw";
        case HologramKind::background: return "hologram_background";
        case HologramKind::subtracted: return "hologram_subtracted";
    }
    return "hologram_subtracted";
}

} // namespace

void write_raster(const std::string& path, const Raster& r) {
    for (auto d : r.shape)
        if (d < 1) throw InvalidArgument("raster: shape entries must be >= 1");
    const std::int64_t expect =
        r.samples() * floats_per_sample(r.dtype);
    if (static_cast<std::int64_t>(r.payload.size()) != expect)
        throw InvalidArgument("raster: payload has " + std::to_string(r.payload.size()) +
                              " floats, shape requires " + std::to_string(expect));

    json header;
    header["dtype"] = dtype_name(r.dtype);
    header["kind"] = r.kind;
    header["shape"] = {r.shape[0], r.shape[1], r.shape[2], r.shape[3]};
    header["pitch_m"] = r.pitch_m;
    header["wavelength_m"] = r.wavelength_m;
    const std::string hdr = header.dump();

    std::string blob;
    blob.reserve(8 + hdr.size() + r.payload.size() * 4);
    blob.append(kMagic, 4);
    put_u32le(blob, static_cast<std::uint32_t>(hdr.size()));
    blob += hdr;
    for (float f : r.payload) put_f32le(blob, f);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("raster: cannot open for writing: " + path);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    out.close();
    if (out.fail()) throw IoError("raster: write failed: " + path);
}

Raster read_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("raster: cannot open: " + path);
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("raster: read failed: " + path);

    if (blob.size() < 8 || std::memcmp(blob.data(), kMagic, 4) != 0)
        throw IoError("raster: bad magic in " + path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    const std::uint32_t hdr_len = get_u32le(bytes + 4);
    if (blob.size() < 8 + static_cast<std::size_t>(hdr_len))
        throw IoError("raster: truncated header in " + path);

    json header;
    try {
        header = json::parse(blob.substr(8, hdr_len));
    } catch (const json::exception& e) {
        throw IoError("raster: unparsable header in " + path + ": " + e.what());
    }

    Raster r;
    try {
        r.dtype = dtype_from(header.at("dtype").get<std::string>());
        r.kind = header.at("kind").get<std::string>();
        const auto shape = header.at("shape");
        if (!shape.is_array() || shape.size() != 4)
            throw IoError("raster: shape must have 4 entries in " + path);
        for (int i = 0; i < 4; ++i) {
            r.shape[static_cast<std::size_t>(i)] = shape[static_cast<std::size_t>(i)].get<std::int64_t>();
            if (r.shape[static_cast<std::size_t>(i)] < 1)
                throw IoError("raster: non-positive shape entry in " + path);
        }
        r.pitch_m = header.value("pitch_m", 0.0);
        r.wavelength_m = header.value("wavelength_m", 0.0);
    } catch (const json::exception& e) {
        throw IoError("raster: bad header field in " + path + ": " + e.what());
    }

    const std::size_t expected_bytes =
        static_cast<std::size_t>(r.samples()) * floats_per_sample(r.dtype) * 4;
    const std::size_t actual_bytes = blob.size() - 8 - hdr_len;
    if (actual_bytes != expected_bytes)
        throw IoError("raster: corrupt payload in " + path + ": expected " +
                      std::to_string(expected_bytes) + " bytes, found " +
                      std::to_string(actual_bytes));

    r.payload.resize(expected_bytes / 4);
    const unsigned char* p = bytes + 8 + hdr_len;
    for (std::size_t i = 0; i < r.payload.size(); ++i) r.payload[i] = get_f32le(p + 4 * i);
    return r;
}

void write_raster(const std::string& path, const ComplexField& f, double wavelength) {
    Raster r;
    r.dtype = Raster::Dtype::c64;
    r.kind = "field";
    r.shape = {1, 1, f.ny, f.nx};
    r.pitch_m = f.pitch;
    r.wavelength_m = wavelength;
    r.payload.resize(f.data.size() * 2);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        r.payload[2 * i] = static_cast<float>(f.data[i].real());
        r.payload[2 * i + 1] = static_cast<float>(f.data[i].imag());
    }
    write_raster(path, r);
}

void write_raster(const std::string& path, const Hologram& h, double pitch, double wavelength) {
    Raster r;
    r.dtype = Raster::Dtype::f32;
    r.kind = hologram_kind_tag(h.kind);
    r.shape = {1, 1, h.ny, h.nx};
    r.pitch_m = pitch;
    r.wavelength_m = wavelength;
    r.payload.resize(h.data.size());
    for (std::size_t i = 0; i < h.data.size(); ++i) r.payload[i] = static_cast<float>(h.data[i]);
    write_raster(path, r);
}

void write_raster(const std::string& path, const Object4D& o, double pitch, double wavelength) {
    Raster r;
    r.dtype = Raster::Dtype::c64;
    r.kind = "object4d";
    r.shape = {o.T, o.nd, o.ny, o.nx};
    r.pitch_m = pitch;
    r.wavelength_m = wavelength;
    r.payload.resize(o.data.size() * 2);
    for (std::size_t i = 0; i < o.data.size(); ++i) {
        r.payload[2 * i] = static_cast<float>(o.data[i].real());
        r.payload[2 * i + 1] = static_cast<float>(o.data[i].imag());
    }
    write_raster(path, r);
}

ComplexField to_field(const Raster& r) {
    if (r.dtype != Raster::Dtype::c64) throw IoError("raster: field requires dtype c64");
    if (r.shape[0] != 1 || r.shape[1] != 1) throw IoError("raster: field must be 2D");
    ComplexField f(static_cast<int>(r.shape[3]), static_cast<int>(r.shape[2]),
                   r.pitch_m > 0.0 ? r.pitch_m : 1.0);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        f.data[i] = cdouble{r.payload[2 * i], r.payload[2 * i + 1]};
    return f;
}

Hologram to_hologram(const Raster& r) {
    if (r.dtype != Raster::Dtype::f32) throw IoError("raster: hologram requires dtype f32");
    if (r.shape[0] != 1 || r.shape[1] != 1) throw IoError("raster: hologram must be 2D");
    Hologram h(static_cast<int>(r.shape[3]), static_cast<int>(r.shape[2]),
               hologram_kind_from(r.kind));
    for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] = r.payload[i];
    return h;
}

Object4D to_object4d(const Raster& r) {
    if (r.dtype != Raster::Dtype::c64) throw IoError("raster: object4d requires dtype c64");
    Object4D o(static_cast<int>(r.shape[0]), static_cast<int>(r.shape[1]),
               static_cast<int>(r.shape[2]), static_cast<int>(r.shape[3]));
    for (std::size_t i = 0; i < o.data.size(); ++i)
        o.data[i] = cdouble{r.payload[2 * i], r.payload[2 * i + 1]};
    return o;
}

void write_mask_stack(const std::string& dir, const MaskStack& stack) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    nlohmann::json index;
    index["nx"] = stack.nx;
    index["ny"] = stack.ny;
    index["superpixel"] = stack.superpixel;
    index["seed"] = stack.seed;
    index["frame_count"] = stack.frame_count();
    std::vector<std::string> files;
    for (int t = 0; t < stack.frame_count(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.chv", t);
        Raster r;
        r.dtype = Raster::Dtype::f32;
        r.kind = "mask";
        r.shape = {1, 1, stack.ny, stack.nx};
        r.payload.resize(static_cast<std::size_t>(stack.nx) * stack.ny);
        const auto& f = stack.frames[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < f.size(); ++i) r.payload[i] = static_cast<float>(f[i]);
        write_raster((fs::path(dir) / name).string(), r);
        files.push_back(name);
    }
    index["frames"] = files;

    std::ofstream out(fs::path(dir) / "index.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("mask stack: cannot write index in " + dir);
    out << index.dump(2) << '\n';
    out.close();
    if (out.fail()) throw IoError("mask stack: index write failed in " + dir);
}

MaskStack read_mask_stack(const std::string& index_path) {
    namespace fs = std::filesystem;
    std::ifstream in(index_path, std::ios::binary);
    if (!in) throw IoError("mask stack: cannot open index " + index_path);
    nlohmann::json index;
    try {
        in >> index;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("mask stack: unparsable index " + index_path + ": " + e.what());
    }

    MaskStack stack;
    try {
        stack.nx = index.at("nx").get<int>();
        stack.ny = index.at("ny").get<int>();
        stack.superpixel = index.value("superpixel", 1);
        stack.seed = index.value("seed", std::uint64_t{0});
        const auto dir = fs::path(index_path).parent_path();
        for (const auto& name : index.at("frames")) {
            Raster r = read_raster((dir / name.get<std::string>()).string());
            if (r.dtype != Raster::Dtype::f32 || r.shape[2] != stack.ny || r.shape[3] != stack.nx)
                throw IoError("mask stack: frame shape mismatch in " + index_path);
            std::vector<std::uint8_t> frame(r.payload.size());
            for (std::size_t i = 0; i < frame.size(); ++i)
                frame[i] = r.payload[i] >= 0.5f ? 1 : 0;
            stack.frames.push_back(std::move(frame));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("mask stack: bad index field in " + index_path + ": " + e.what());
    }
    return stack;
}

} // namespace chv
