#include "sfg/io.hpp"

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include <png.h>

#include "json.hpp"
#include "sfg/errors.hpp"

namespace sfg::io {

using nlohmann::json;

namespace {

constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
           std::uint32_t(b[at + 3]) << 24;
}

} // namespace

std::vector<float> to_f32(const ScalarField& field) {
    std::vector<float> out;
    out.reserve(field.values().size());
    for (double v : field.values())
        out.push_back(static_cast<float>(v));
    return out;
}

std::vector<std::uint8_t> encode_field(const ScalarField& field) {
    if (field.height() > UINT32_MAX || field.width() > UINT32_MAX)
        throw InvalidArgument("field too large for SFF1");
    for (double v : field.values())
        if (!std::isfinite(v))
            throw InvalidArgument("SFF1 fields must be finite");
    std::vector<std::uint8_t> out(kFieldMagic.begin(), kFieldMagic.end());
    out.reserve(kHeaderBytes + 4 * field.values().size());
    put_u32(out, static_cast<std::uint32_t>(field.height()));
    put_u32(out, static_cast<std::uint32_t>(field.width()));
    for (float v : to_f32(field))
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

ScalarField decode_field(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes)
        throw FormatError("SFF1: file shorter than the 12-byte header");
    if (!std::equal(kFieldMagic.begin(), kFieldMagic.end(), bytes.begin()))
        throw FormatError("SFF1: bad magic");
    const std::uint64_t h = get_u32(bytes, 4);
    const std::uint64_t w = get_u32(bytes, 8);
    if (h == 0 || w == 0)
        throw FormatError("SFF1: zero-sized grid");
    const std::uint64_t expected = kHeaderBytes + 4 * h * w;
    if (bytes.size() != expected)
        throw FormatError("SFF1: payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected));
    ScalarField f(GridDims{std::size_t(h), std::size_t(w)});
    for (std::size_t i = 0; i < f.values().size(); ++i) {
        const float v = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
        if (!std::isfinite(v))
            throw FormatError("SFF1: non-finite value in payload");
        f.values()[i] = v;
    }
    return f;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FormatError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out)
        throw FormatError("short write to " + path.string());
}

void save_field(const std::filesystem::path& path, const ScalarField& field) { write_bytes(path, encode_field(field)); }

ScalarField load_field(const std::filesystem::path& path) { return decode_field(read_bytes(path)); }

// ---- click files -----------------------------------------------------------

namespace {

PointSet parse_points(const json& j, const char* key) {
    PointSet out;
    if (!j.contains(key))
        return out;
    const json& arr = j.at(key);
    if (!arr.is_array())
        throw FormatError(std::string("click file: '") + key + "' must be a list of [row, col]");
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw FormatError(std::string("click file: '") + key + "' entries must be [row, col]");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

json points_json(const PointSet& pts) {
    json arr = json::array();
    for (const auto& p : pts)
        arr.push_back({p.row, p.col});
    return arr;
}

void check_in_grid(const PointSet& pts, GridDims grid, const char* what) {
    for (const auto& p : pts)
        if (!grid.contains(snap(p)))
            throw FormatError(std::string("click file: ") + what + " lies outside the declared grid");
}

} // namespace

ClickFile parse_click_file(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("click file: ") + e.what());
    }
    if (!j.is_object())
        throw FormatError("click file: top level must be an object");
    if (!j.contains("extreme_points"))
        throw FormatError("click file: missing 'extreme_points'");
    ClickFile f;
    f.extreme_points = parse_points(j, "extreme_points");
    f.clicks.fpc = parse_points(j, "fpc");
    f.clicks.fnc = parse_points(j, "fnc");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_array() || g.size() != 2 || !g[0].is_number_unsigned() || !g[1].is_number_unsigned() ||
            g[0].get<std::size_t>() == 0 || g[1].get<std::size_t>() == 0)
            throw FormatError("click file: 'grid' must be [height, width] with positive integers");
        f.grid = GridDims{g[0].get<std::size_t>(), g[1].get<std::size_t>()};
        check_in_grid(f.extreme_points, *f.grid, "an extreme point");
        check_in_grid(f.clicks.fpc, *f.grid, "an FPC click");
        check_in_grid(f.clicks.fnc, *f.grid, "an FNC click");
    }
    if (j.contains("seed") && j.at("seed").is_number_unsigned())
        f.seed = j.at("seed").get<std::uint64_t>();
    return f;
}

std::string format_click_file(const ClickFile& file) {
    json j;
    j["extreme_points"] = points_json(file.extreme_points);
    j["fpc"] = points_json(file.clicks.fpc);
    j["fnc"] = points_json(file.clicks.fnc);
    if (file.grid)
        j["grid"] = {file.grid->height, file.grid->width};
    if (file.seed)
        j["seed"] = *file.seed;
    return j.dump(2) + "\n";
}

ClickFile load_click_file(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    return parse_click_file(std::string(bytes.begin(), bytes.end()));
}

void save_click_file(const std::filesystem::path& path, const ClickFile& file) {
    const std::string s = format_click_file(file);
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::vector<RobustnessConfig> load_robustness_configs(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw FormatError(std::string("configs file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("configs") || !j.at("configs").is_array())
        throw FormatError("configs file: expected {\"configs\": [...]}");
    std::vector<RobustnessConfig> out;
    for (const auto& c : j.at("configs")) {
        RobustnessConfig cfg;
        cfg.id = c.value("id", "cfg" + std::to_string(out.size()));
        cfg.extreme_points = parse_points(c, "extreme_points");
        if (cfg.extreme_points.size() != 4)
            throw FormatError("configs file: configuration '" + cfg.id + "' needs exactly 4 extreme points");
        out.push_back(std::move(cfg));
    }
    if (out.empty())
        throw FormatError("configs file: no configurations");
    return out;
}

// ---- PNG -------------------------------------------------------------------

namespace {

struct PngRaw {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::vector<std::uint8_t> data; // rows after png_set_packing, tightly packed
    std::size_t rowbytes = 0;
};

struct PngErrorSink {
    char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// C-style on purpose: nothing with a destructor lives between setjmp and longjmp.
bool read_png_raw(std::FILE* fp, PngRaw* out, PngErrorSink* sink) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, png_error_fn, png_warning_fn);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        std::free(rows);
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    out->width = png_get_image_width(png, info);
    out->height = png_get_image_height(png, info);
    out->bit_depth = png_get_bit_depth(png, info);
    out->color_type = png_get_color_type(png, info);
    if (out->bit_depth < 8)
        png_set_packing(png);
    png_read_update_info(png, info);
    out->rowbytes = png_get_rowbytes(png, info);
    out->data.resize(out->rowbytes * out->height);
    rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * out->height));
    for (std::uint32_t r = 0; r < out->height; ++r)
        rows[r] = out->data.data() + r * out->rowbytes;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    std::free(rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

PngRaw read_png(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp)
        throw FormatError("cannot open " + path.string());
    unsigned char sig[8] = {};
    const bool is_png = std::fread(sig, 1, 8, fp) == 8 && png_sig_cmp(sig, 0, 8) == 0;
    if (!is_png) {
        std::fclose(fp);
        throw FormatError(path.string() + ": not a PNG file");
    }
    std::rewind(fp);
    PngRaw raw;
    PngErrorSink sink;
    const bool ok = read_png_raw(fp, &raw, &sink);
    std::fclose(fp);
    if (!ok)
        throw FormatError(path.string() + ": unreadable PNG (" + sink.message + ")");
    return raw;
}

const char* color_type_name(int ct) {
    switch (ct) {
    case PNG_COLOR_TYPE_GRAY: return "grayscale";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    case PNG_COLOR_TYPE_RGB: return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
    }
    return "unknown";
}

bool write_png_raw(const std::uint8_t* data, std::uint32_t w, std::uint32_t h, int color_type, int channels,
                   std::vector<std::uint8_t>* out, PngErrorSink* sink) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, png_error_fn, png_warning_fn);
    if (!png)
        return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(
        png, out,
        [](png_structp p, png_bytep bytes, png_size_t n) {
            auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            v->insert(v->end(), bytes, bytes + n);
        },
        [](png_structp) {});
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t r = 0; r < h; ++r)
        png_write_row(png, const_cast<png_bytep>(data + std::size_t(r) * w * channels));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

std::vector<std::uint8_t> write_png(const std::uint8_t* data, GridDims dims, int color_type, int channels) {
    if (dims.empty() || dims.height > UINT32_MAX || dims.width > UINT32_MAX)
        throw InvalidArgument("PNG: invalid image dims");
    std::vector<std::uint8_t> out;
    PngErrorSink sink;
    if (!write_png_raw(data, std::uint32_t(dims.width), std::uint32_t(dims.height), color_type, channels, &out, &sink))
        throw FormatError(std::string("PNG encode failed: ") + sink.message);
    return out;
}

} // namespace

BinaryMask load_mask(const std::filesystem::path& path, std::optional<std::uint32_t> label) {
    const PngRaw raw = read_png(path);
    if (raw.color_type != PNG_COLOR_TYPE_GRAY && raw.color_type != PNG_COLOR_TYPE_PALETTE)
        throw FormatError(path.string() + ": unsupported color type " + color_type_name(raw.color_type) +
                          " (mask must be single-channel or palette)");
    if (raw.bit_depth > 16)
        throw FormatError(path.string() + ": unsupported bit depth " + std::to_string(raw.bit_depth));
    const GridDims dims{raw.height, raw.width};
    BinaryMask mask(dims);
    const bool wide = raw.bit_depth == 16;
    for (std::size_t r = 0; r < dims.height; ++r) {
        const std::uint8_t* row = raw.data.data() + r * raw.rowbytes;
        for (std::size_t c = 0; c < dims.width; ++c) {
            const std::uint32_t v = wide ? (std::uint32_t(row[2 * c]) << 8 | row[2 * c + 1]) : row[c];
            mask.set(r, c, label ? v == *label : v != 0);
        }
    }
    return mask;
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> gray(mask.bits().size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = mask.bits()[i] ? 255 : 0;
    write_bytes(path, write_png(gray.data(), mask.dims(), PNG_COLOR_TYPE_GRAY, 1));
}

RgbImage load_rgb(const std::filesystem::path& path) {
    const PngRaw raw = read_png(path);
    if (raw.bit_depth != 8)
        throw FormatError(path.string() + ": image must be 8-bit, got bit depth " + std::to_string(raw.bit_depth));
    RgbImage img{{raw.height, raw.width}, {}};
    img.rgb.resize(img.dims.cells() * 3);
    for (std::size_t r = 0; r < raw.height; ++r) {
        const std::uint8_t* row = raw.data.data() + r * raw.rowbytes;
        for (std::size_t c = 0; c < raw.width; ++c) {
            std::uint8_t* px = img.rgb.data() + 3 * (r * raw.width + c);
            switch (raw.color_type) {
            case PNG_COLOR_TYPE_GRAY: px[0] = px[1] = px[2] = row[c]; break;
            case PNG_COLOR_TYPE_GRAY_ALPHA: px[0] = px[1] = px[2] = row[2 * c]; break;
            case PNG_COLOR_TYPE_RGB: std::memcpy(px, row + 3 * c, 3); break;
            case PNG_COLOR_TYPE_RGB_ALPHA: std::memcpy(px, row + 4 * c, 3); break;
            default:
                throw FormatError(path.string() + ": unsupported color type " + color_type_name(raw.color_type) +
                                  " for an image");
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
    if (image.rgb.size() != image.dims.cells() * 3)
        throw InvalidArgument("RgbImage: buffer size does not match dims");
    return write_png(image.rgb.data(), image.dims, PNG_COLOR_TYPE_RGB, 3);
}

void save_rgb(const std::filesystem::path& path, const RgbImage& image) { write_bytes(path, encode_png(image)); }

// ---- rendering -------------------------------------------------------------

namespace {

constexpr std::array<Rgb, 256> kColormap{{
#include "colormap_table.inc"
}};

} // namespace

Rgb colormap(double value) {
    const double v = std::isfinite(value) ? std::clamp(value, 0.0, 1.0) : 0.0;
    return kColormap[static_cast<std::size_t>(std::lround(v * 255.0))];
}

RgbImage render_overlay(const ScalarField& field, const RgbImage* image) {
    if (image && image->dims != field.dims())
        throw InvalidArgument("render_overlay: image dims differ from field dims");
    RgbImage out{field.dims(), std::vector<std::uint8_t>(field.dims().cells() * 3)};
    for (std::size_t i = 0; i < field.values().size(); ++i) {
        const double v = std::isfinite(field.values()[i]) ? std::clamp(field.values()[i], 0.0, 1.0) : 0.0;
        const Rgb col = colormap(v);
        for (std::size_t k = 0; k < 3; ++k) {
            if (!image) {
                out.rgb[3 * i + k] = col[k];
                continue;
            }
            const double a = 0.5 * v;
            const double blended = double(image->rgb[3 * i + k]) * (1.0 - a) + double(col[k]) * a;
            out.rgb[3 * i + k] = static_cast<std::uint8_t>(std::lround(blended));
        }
    }
    return out;
}

// ---- CSV & reports ---------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_density_csv(std::ostream& out, std::span<const DensityRow> rows) {
    out << kDensityHeader << '\n';
    for (const auto& r : rows) {
        if (r.config_id.find_first_of(",\"\n") != std::string::npos)
            throw InvalidArgument("config id '" + r.config_id + "' cannot be written to CSV");
        out << r.config_id << ',' << r.draw << ',' << format_double(r.annotation_error_px) << ','
            << format_double(r.focal_perturbation_px) << '\n';
    }
}

std::vector<DensityRow> read_density_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kDensityHeader)
        throw FormatError("density CSV: unexpected header");
    std::vector<DensityRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string id, draw, ann, foc;
        if (!std::getline(ss, id, ',') || !std::getline(ss, draw, ',') || !std::getline(ss, ann, ',') ||
            !std::getline(ss, foc))
            throw FormatError("density CSV: malformed row '" + line + "'");
        try {
            rows.push_back({id, std::stoull(draw), std::stod(ann), std::stod(foc)});
        } catch (const std::exception&) {
            throw FormatError("density CSV: malformed row '" + line + "'");
        }
    }
    return rows;
}

std::string format_session_report(std::span<const SessionRecord> records, const ClicksAtIouSummary& summary,
                                  const std::string& extra_json) {
    json j;
    j["meta"] = json::parse(extra_json);
    json sessions = json::array();
    for (const auto& rec : records) {
        json s;
        s["object_id"] = rec.object_id;
        s["seed"] = rec.seed;
        s["max_clicks"] = rec.max_clicks;
        s["extreme_points"] = points_json(rec.extreme_points);
        s["outcome"] = to_string(rec.outcome);
        if (!rec.error.empty())
            s["error"] = rec.error;
        json steps = json::array();
        for (const auto& st : rec.steps) {
            json e{{"click_count", st.click_count}, {"click_kind", to_string(st.kind)}, {"iou", st.iou}};
            if (st.location)
                e["location"] = {st.location->row, st.location->col};
            steps.push_back(std::move(e));
        }
        s["steps"] = std::move(steps);
        sessions.push_back(std::move(s));
    }
    j["sessions"] = std::move(sessions);
    j["clicks_at_iou"] = {{"target", summary.target},
                          {"mean_clicks", summary.mean_clicks},
                          {"unreached", summary.unreached},
                          {"first_click", summary.first_click},
                          {"mean_iou_at_click", summary.mean_iou_at_click}};
    return j.dump(2) + "\n";
}

} // namespace sfg::io
