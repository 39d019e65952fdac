#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfg/click_sim.hpp"
#include "sfg/encoder.hpp"
#include "sfg/geometry.hpp"
#include "sfg/rng.hpp"

namespace sfg {

/// |a & b| / |a | b|; 1.0 when both are empty. Throws InvalidArgument on dim mismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

// Everything a segmenter may look at for one round. image is unused by the reference
// segmenters but kept so a learned model can slot in behind the same interface.
struct SegmentRequest {
    const ScalarField& field;
    BoundingBox bbox;
    std::span<const CorrectiveClick> clicks;
    const std::vector<std::uint8_t>* image = nullptr;
};

class Segmenter {
  public:
    virtual ~Segmenter() = default;
    virtual BinaryMask segment(const SegmentRequest& request) const = 0;
};

/// {x : field(x) >= level} restricted to the bbox.
class ThresholdSegmenter final : public Segmenter {
  public:
    explicit ThresholdSegmenter(double level);
    BinaryMask segment(const SegmentRequest& request) const override;
    double level() const { return level_; }

  private:
    double level_;
};

/// Ground truth with square blobs toggled. Every corrective click heals the blob that
/// contains it (or the nearest one), so each click repairs exactly one degradation.
class OracleSegmenter final : public Segmenter {
  public:
    OracleSegmenter(BinaryMask gt, std::size_t flip_blobs, std::size_t flip_size, Rng& rng);
    BinaryMask segment(const SegmentRequest& request) const override;

    const std::vector<BoundingBox>& blobs() const { return blobs_; }

  private:
    std::size_t blob_for(Point click) const;

    BinaryMask gt_;
    std::vector<BoundingBox> blobs_;
};

std::unique_ptr<Segmenter> threshold_segmenter(double level);
std::unique_ptr<Segmenter> oracle_segmenter(std::size_t flip_blobs, std::size_t flip_size, Rng& rng,
                                            const BinaryMask& gt);

enum class ClickKind { EP, FPC, FNC };

struct SessionStep {
    std::size_t click_count = 0;
    ClickKind kind = ClickKind::EP;
    double iou = 0.0;
    std::optional<Point> location; // corrective click position; empty for the EP step
};

enum class SessionOutcome { TargetReached, BudgetExhausted, NoClickAvailable, Error };

struct SessionRecord {
    std::string object_id;
    std::uint64_t seed = 0;
    std::size_t max_clicks = 0;
    PointSet extreme_points; // after selection and noise
    std::vector<SessionStep> steps;
    SessionOutcome outcome = SessionOutcome::BudgetExhausted;
    std::string error; // segmenter failure message when outcome == Error

    double final_iou() const { return steps.empty() ? 0.0 : steps.back().iou; }
};

struct SessionProtocol {
    std::size_t start_k = 4; // 3 or 4 extreme points
    std::size_t max_clicks = 8;
    double target_iou = 0.85;
    double noise_px = 0.0;
};

/// Runs one annotation session: EPs from gt (dropping to three when start_k == 3),
/// noise, encode, segment, then corrective clicks (test-mode sampling, accumulated
/// into one ClickSet) until the target IoU or the click budget is reached.
SessionRecord run_session(const BinaryMask& gt, const Segmenter& segmenter, const SessionProtocol& protocol,
                          Rng& rng, const SFGParams& params = {}, std::string object_id = "object");

struct ClicksAtIouSummary {
    double target = 0.0;
    double mean_clicks = 0.0;   // unreached sessions are charged their click budget
    std::size_t unreached = 0;
    std::vector<std::size_t> clicks_per_session;
    std::vector<bool> reached;
    // Mean IoU over sessions at click counts first_click..last_click. A session that
    // stopped early contributes its last IoU to later counts.
    std::size_t first_click = 0;
    std::vector<double> mean_iou_at_click;
};

ClicksAtIouSummary clicks_at_iou(std::span<const SessionRecord> records, double target);

const char* to_string(ClickKind kind);
const char* to_string(SessionOutcome outcome);

} // namespace sfg
