#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfg/encoder.hpp"
#include "sfg/geometry.hpp"
#include "sfg/robustness.hpp"
#include "sfg/session.hpp"

namespace sfg::io {

// SFF1 field file: "SFF1", u32 LE height, u32 LE width, height*width f32 LE row-major.
inline constexpr std::array<char, 4> kFieldMagic{'S', 'F', 'F', '1'};

/// The f32 payload exactly as written to an SFF1 file.
std::vector<float> to_f32(const ScalarField& field);

std::vector<std::uint8_t> encode_field(const ScalarField& field);
ScalarField decode_field(std::span<const std::uint8_t> bytes);

void save_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField load_field(const std::filesystem::path& path);

// JSON click file:
//   {"extreme_points": [[r, c], ...], "fpc": [[r, c], ...], "fnc": [...], "grid": [h, w]}
// fpc, fnc and grid are optional. Extra keys (e.g. "seed") are ignored on read.
struct ClickFile {
    PointSet extreme_points;
    ClickSet clicks;
    std::optional<GridDims> grid;
    std::optional<std::uint64_t> seed;
};

ClickFile parse_click_file(const std::string& text);
std::string format_click_file(const ClickFile& file);
ClickFile load_click_file(const std::filesystem::path& path);
void save_click_file(const std::filesystem::path& path, const ClickFile& file);

/// Robustness configurations: {"configs": [{"id": "...", "extreme_points": [[r, c] x4]}, ...]}.
std::vector<RobustnessConfig> load_robustness_configs(const std::filesystem::path& path);

/// 8/16-bit grayscale or palette PNG. Nonzero samples are foreground, or with label
/// only samples equal to label. Other formats raise FormatError naming the property.
BinaryMask load_mask(const std::filesystem::path& path, std::optional<std::uint32_t> label = std::nullopt);

/// 8-bit grayscale PNG, foreground 255.
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);

struct RgbImage {
    GridDims dims;
    std::vector<std::uint8_t> rgb; // 3 bytes per pixel, row-major

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

RgbImage load_rgb(const std::filesystem::path& path);
void save_rgb(const std::filesystem::path& path, const RgbImage& image);
std::vector<std::uint8_t> encode_png(const RgbImage& image);

using Rgb = std::array<std::uint8_t, 3>;

/// Colormap lookup: index round(clamp(v, 0, 1) * 255) of the bundled 256-entry table.
Rgb colormap(double value);

/// Without an image the field is drawn through the colormap. Over an image each pixel
/// is blended as image * (1 - a) + colormap(v) * a with a = 0.5 * v, so zero leaves
/// the image unchanged.
RgbImage render_overlay(const ScalarField& field, const RgbImage* image = nullptr);

inline constexpr const char* kDensityHeader = "config_id,draw,annotation_error_px,focal_perturbation_px";

void write_density_csv(std::ostream& out, std::span<const DensityRow> rows);
std::vector<DensityRow> read_density_csv(std::istream& in);

std::string format_session_report(std::span<const SessionRecord> records, const ClicksAtIouSummary& summary,
                                  const std::string& extra_json = "{}");

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace sfg::io
