#include "sfg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfg/click_sim.hpp"
#include "sfg/encoder.hpp"
#include "sfg/errors.hpp"
#include "sfg/io.hpp"
#include "sfg/robustness.hpp"
#include "sfg/session.hpp"

namespace sfg {
namespace {

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

GridDims parse_size(const std::string& s) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos)
        throw UsageError("--size must look like HxW, got '" + s + "'");
    try {
        std::size_t used_h = 0, used_w = 0;
        const auto h = std::stoull(s.substr(0, x), &used_h);
        const auto w = std::stoull(s.substr(x + 1), &used_w);
        if (used_h != x || used_w != s.size() - x - 1 || h == 0 || w == 0)
            throw UsageError("");
        return {std::size_t(h), std::size_t(w)};
    } catch (const std::exception&) {
        throw UsageError("--size must look like HxW with positive integers, got '" + s + "'");
    }
}

struct EncodeArgs {
    std::string points, size, out, png;
    SFGParams params;
};

struct ExtractArgs {
    std::string mask, out;
    std::optional<std::uint32_t> label;
    std::size_t num = 4;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

struct SessionArgs {
    std::string mask, report, segmenter = "threshold";
    std::optional<std::uint32_t> label;
    double level = 0.5;
    std::size_t max_clicks = 8;
    double target_iou = 0.85;
    std::uint64_t seed = 0;
    std::size_t start_k = 4;
    double noise = 0.0;
    std::size_t flip_blobs = 3;
    std::size_t flip_size = 100;
    SFGParams params;
};

struct RobustnessArgs {
    std::string configs, out;
    std::size_t draws = 10000;
    double magnitude = 10.0;
    std::uint64_t seed = 0;
};

struct RenderArgs {
    std::string field, image, out;
};

void add_sfg_params(CLI::App* cmd, SFGParams& p) {
    cmd->add_option("--beta", p.beta, "decay exponent")->capture_default_str();
    cmd->add_option("--sigma", p.sigma, "Gaussian sigma (px)")->capture_default_str();
    cmd->add_option("--margin", p.bbox_margin, "bounding-box margin (px)")->capture_default_str()->check(
        CLI::NonNegativeNumber);
}

int do_encode(const EncodeArgs& a, std::ostream& out) {
    const io::ClickFile cf = io::load_click_file(a.points);
    GridDims dims;
    if (!a.size.empty())
        dims = parse_size(a.size);
    else if (cf.grid)
        dims = *cf.grid;
    else
        throw UsageError("--size is required when the click file has no grid");
    const ScalarField psi = encode(cf.extreme_points, cf.clicks, a.params, dims);
    io::save_field(a.out, psi);
    if (!a.png.empty())
        io::save_rgb(a.png, io::render_overlay(psi));
    const auto [lo, hi] = std::minmax_element(psi.values().begin(), psi.values().end());
    out << "encoded " << dims.height << "x" << dims.width << " min=" << *lo << " max=" << *hi << "\n";
    return kExitOk;
}

int do_extract(const ExtractArgs& a, std::ostream& out) {
    const BinaryMask mask = io::load_mask(a.mask, a.label);
    Rng rng(a.seed);
    PointSet eps = extract_extreme_points(mask);
    if (a.num == 3)
        eps = select_three_points(eps, rng);
    eps = perturb_points(eps, a.noise, rng, mask.dims());
    io::ClickFile cf;
    cf.extreme_points = eps;
    cf.grid = mask.dims();
    cf.seed = a.seed;
    io::save_click_file(a.out, cf);
    out << "wrote " << eps.size() << " extreme points (seed " << a.seed << ")\n";
    return kExitOk;
}

int do_session(const SessionArgs& a, std::ostream& out) {
    const BinaryMask gt = io::load_mask(a.mask, a.label);
    if (gt.count() == 0)
        throw EmptyMask(a.mask + ": mask has no foreground");
    Rng seg_rng = Rng::substream(a.seed, 1);
    std::unique_ptr<Segmenter> seg = a.segmenter == "oracle" ? oracle_segmenter(a.flip_blobs, a.flip_size, seg_rng, gt)
                                                             : threshold_segmenter(a.level);
    SessionProtocol protocol{a.start_k, a.max_clicks, a.target_iou, a.noise};
    Rng rng = Rng::substream(a.seed, 0);
    const SessionRecord rec = run_session(gt, *seg, protocol, rng, a.params, a.mask);
    const std::vector<SessionRecord> records{rec};
    const ClicksAtIouSummary summary = clicks_at_iou(records, a.target_iou);

    nlohmann::json meta{{"seed", a.seed},       {"segmenter", a.segmenter}, {"start_k", a.start_k},
                        {"max_clicks", a.max_clicks}, {"target_iou", a.target_iou}, {"noise_px", a.noise},
                        {"beta", a.params.beta}, {"sigma", a.params.sigma}, {"margin", a.params.bbox_margin}};
    if (a.segmenter == "oracle") {
        meta["flip_blobs"] = a.flip_blobs;
        meta["flip_size"] = a.flip_size;
    } else {
        meta["level"] = a.level;
    }
    const std::string report = io::format_session_report(records, summary, meta.dump());
    io::write_bytes(a.report, std::span(reinterpret_cast<const std::uint8_t*>(report.data()), report.size()));
    out << "session " << to_string(rec.outcome) << ": " << rec.steps.size() << " steps, final iou "
        << rec.final_iou() << " (seed " << a.seed << ")\n";
    if (rec.outcome == SessionOutcome::Error) {
        out << "segmenter error: " << rec.error << "\n";
        return kExitData;
    }
    return kExitOk;
}

int do_robustness(const RobustnessArgs& a, std::ostream& out) {
    const auto configs = a.configs.empty() ? default_robustness_configs() : io::load_robustness_configs(a.configs);
    const auto reports = run_robustness_suite(configs, a.draws, a.magnitude, a.seed);
    std::vector<DensityRow> rows;
    for (const auto& r : reports) {
        const auto part = export_density(r);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::ofstream csv(a.out, std::ios::trunc);
    if (!csv)
        throw FormatError("cannot write " + a.out);
    io::write_density_csv(csv, rows);
    if (!csv)
        throw FormatError("short write to " + a.out);

    const RobustnessReport all = pool(reports);
    out << "seed " << a.seed << ", " << configs.size() << " configs x " << a.draws << " draws, magnitude "
        << a.magnitude << "\n";
    for (std::size_t k = 0; k < reports.size(); ++k)
        out << "  " << configs[k].id << ": annotation " << reports[k].mean_annotation_error << " px, focal "
            << reports[k].mean_focal_perturbation << " px, ratio " << reports[k].attenuation_ratio << "\n";
    out << "pooled: annotation " << all.mean_annotation_error << " px, focal " << all.mean_focal_perturbation
        << " px, ratio " << all.attenuation_ratio << "\n";
    return kExitOk;
}

int do_render(const RenderArgs& a, std::ostream& out) {
    const ScalarField field = io::load_field(a.field);
    std::optional<io::RgbImage> image;
    if (!a.image.empty())
        image = io::load_rgb(a.image);
    io::save_rgb(a.out, io::render_overlay(field, image ? &*image : nullptr));
    out << "rendered " << field.height() << "x" << field.width() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Soft-focus guidance maps from extreme points and corrective clicks", "sfg"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto* c_enc = app.add_subcommand("encode", "encode a click file into an SFF1 soft-focus map");
    c_enc->add_option("--points", enc.points, "click file (JSON)")->required();
    c_enc->add_option("--size", enc.size, "grid size HxW (defaults to the click file's grid)");
    add_sfg_params(c_enc, enc.params);
    c_enc->add_option("--out", enc.out, "output SFF1 file")->required();
    c_enc->add_option("--png", enc.png, "optional colormapped PNG preview");

    ExtractArgs ext;
    auto* c_ext = app.add_subcommand("extract-points", "extract (noisy) extreme points from a PNG mask");
    c_ext->add_option("--mask", ext.mask, "mask PNG")->required();
    c_ext->add_option("--label", ext.label, "palette/gray value selecting the object");
    c_ext->add_option("--num", ext.num, "3 or 4 points")->check(CLI::IsMember({3, 4}))->capture_default_str();
    c_ext->add_option("--noise", ext.noise, "uniform noise magnitude (px)")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_ext->add_option("--seed", ext.seed, "random seed")->capture_default_str();
    c_ext->add_option("--out", ext.out, "output click file")->required();

    SessionArgs ses;
    auto* c_ses = app.add_subcommand("simulate-session", "simulate an interactive annotation session");
    c_ses->add_option("--mask", ses.mask, "ground-truth mask PNG")->required();
    c_ses->add_option("--label", ses.label, "palette/gray value selecting the object");
    c_ses->add_option("--segmenter", ses.segmenter, "threshold or oracle")
        ->check(CLI::IsMember({"threshold", "oracle"}))
        ->capture_default_str();
    c_ses->add_option("--level", ses.level, "threshold segmenter level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_ses->add_option("--max-clicks", ses.max_clicks, "click budget")->capture_default_str();
    c_ses->add_option("--target-iou", ses.target_iou, "stop once IoU reaches this")->capture_default_str();
    c_ses->add_option("--seed", ses.seed, "random seed")->capture_default_str();
    c_ses->add_option("--start-k", ses.start_k, "initial extreme points (3 or 4)")
        ->check(CLI::IsMember({3, 4}))
        ->capture_default_str();
    c_ses->add_option("--noise", ses.noise, "extreme-point noise (px)")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_ses->add_option("--flip-blobs", ses.flip_blobs, "oracle segmenter degradation blobs")->capture_default_str();
    c_ses->add_option("--flip-size", ses.flip_size, "oracle segmenter blob area (px)")->capture_default_str();
    add_sfg_params(c_ses, ses.params);
    c_ses->add_option("--report", ses.report, "output JSON report")->required();

    RobustnessArgs rob;
    auto* c_rob = app.add_subcommand("robustness", "Monte-Carlo focal-point robustness to EP noise");
    c_rob->add_option("--configs", rob.configs, "JSON configurations (defaults to the built-in set)");
    c_rob->add_option("--draws", rob.draws, "draws per configuration")->check(CLI::PositiveNumber)->capture_default_str();
    c_rob->add_option("--magnitude", rob.magnitude, "noise magnitude (px)")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_rob->add_option("--seed", rob.seed, "random seed")->capture_default_str();
    c_rob->add_option("--out", rob.out, "output CSV")->required();

    RenderArgs ren;
    auto* c_ren = app.add_subcommand("render", "render an SFF1 field to PNG");
    c_ren->add_option("--field", ren.field, "SFF1 field")->required();
    c_ren->add_option("--image", ren.image, "optional 8-bit PNG to overlay on");
    c_ren->add_option("--out", ren.out, "output PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (c_enc->parsed())
            return do_encode(enc, out);
        if (c_ext->parsed())
            return do_extract(ext, out);
        if (c_ses->parsed())
            return do_session(ses, out);
        if (c_rob->parsed())
            return do_robustness(rob, out);
        if (c_ren->parsed())
            return do_render(ren, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace sfg
