#include "sfg/session.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfg/errors.hpp"

namespace sfg {

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.dims() != b.dims())
        throw InvalidArgument("iou: mask dims differ");
    std::size_t inter = 0, uni = 0;
    const auto& x = a.bits();
    const auto& y = b.bits();
    for (std::size_t i = 0; i < x.size(); ++i) {
        inter += (x[i] & y[i]);
        uni += (x[i] | y[i]);
    }
    if (uni == 0)
        return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

ThresholdSegmenter::ThresholdSegmenter(double level) : level_(level) {
    if (!(level > 0.0 && level < 1.0))
        throw InvalidArgument("threshold_segmenter: level must lie in (0, 1)");
}

BinaryMask ThresholdSegmenter::segment(const SegmentRequest& request) const {
    const ScalarField& f = request.field;
    BinaryMask out(f.dims());
    for (std::size_t r = 0; r < f.height(); ++r)
        for (std::size_t c = 0; c < f.width(); ++c)
            if (request.bbox.contains(std::int64_t(r), std::int64_t(c)) && f.at(r, c) >= level_)
                out.set(r, c);
    return out;
}

OracleSegmenter::OracleSegmenter(BinaryMask gt, std::size_t flip_blobs, std::size_t flip_size, Rng& rng)
    : gt_(std::move(gt)) {
    if (flip_blobs == 0)
        return;
    const auto side = std::max<std::int64_t>(1, std::llround(std::sqrt(double(flip_size))));
    const auto h = std::int64_t(gt_.height()), w = std::int64_t(gt_.width());
    if (side > h || side > w)
        throw InvalidArgument("oracle_segmenter: blob does not fit in the grid");

    // Prefer blobs that touch the object: first search around the object's box, then anywhere.
    BoundingBox region{0, 0, h - 1, w - 1};
    if (gt_.count() > 0) {
        BoundingBox obj{h, w, -1, -1};
        for (std::int64_t r = 0; r < h; ++r)
            for (std::int64_t c = 0; c < w; ++c)
                if (gt_.at(std::size_t(r), std::size_t(c)))
                    obj = {std::min(obj.min_row, r), std::min(obj.min_col, c), std::max(obj.max_row, r),
                           std::max(obj.max_col, c)};
        region = {std::max<std::int64_t>(0, obj.min_row - side), std::max<std::int64_t>(0, obj.min_col - side),
                  std::min(h - 1, obj.max_row + side), std::min(w - 1, obj.max_col + side)};
    }

    auto separated = [&](const BoundingBox& cand) {
        return std::none_of(blobs_.begin(), blobs_.end(), [&](const BoundingBox& b) {
            return cand.min_row <= b.max_row + 1 && cand.max_row >= b.min_row - 1 && cand.min_col <= b.max_col + 1 &&
                   cand.max_col >= b.min_col - 1;
        });
    };
    constexpr int kAttemptsPerRegion = 2000;
    for (int pass = 0; pass < 2 && blobs_.size() < flip_blobs; ++pass) {
        const BoundingBox area = pass == 0 ? region : BoundingBox{0, 0, h - 1, w - 1};
        const std::int64_t rows = std::max<std::int64_t>(1, area.max_row - area.min_row + 2 - side);
        const std::int64_t cols = std::max<std::int64_t>(1, area.max_col - area.min_col + 2 - side);
        for (int attempt = 0; attempt < kAttemptsPerRegion && blobs_.size() < flip_blobs; ++attempt) {
            const std::int64_t r0 = std::min(area.min_row + std::int64_t(rng.index(std::size_t(rows))), h - side);
            const std::int64_t c0 = std::min(area.min_col + std::int64_t(rng.index(std::size_t(cols))), w - side);
            const BoundingBox cand{r0, c0, r0 + side - 1, c0 + side - 1};
            if (separated(cand))
                blobs_.push_back(cand);
        }
    }
    if (blobs_.size() < flip_blobs)
        throw InvalidArgument("oracle_segmenter: could not place the requested degradation blobs");
}

std::size_t OracleSegmenter::blob_for(Point click) const {
    const Pixel px = snap(click);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blobs_.size(); ++i) {
        const BoundingBox& b = blobs_[i];
        if (b.contains(px))
            return i;
        const double dr = double(std::clamp(px.row, b.min_row, b.max_row) - px.row);
        const double dc = double(std::clamp(px.col, b.min_col, b.max_col) - px.col);
        const double d = dr * dr + dc * dc;
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

BinaryMask OracleSegmenter::segment(const SegmentRequest& request) const {
    if (request.field.dims() != gt_.dims())
        throw InvalidArgument("oracle_segmenter: field dims differ from ground truth");
    std::vector<bool> healed(blobs_.size(), false);
    if (!blobs_.empty())
        for (const auto& click : request.clicks)
            healed[blob_for(click.location)] = true;
    BinaryMask out = gt_;
    for (std::size_t i = 0; i < blobs_.size(); ++i) {
        if (healed[i])
            continue;
        const BoundingBox& b = blobs_[i];
        for (std::int64_t r = b.min_row; r <= b.max_row; ++r)
            for (std::int64_t c = b.min_col; c <= b.max_col; ++c)
                out.set(std::size_t(r), std::size_t(c), !gt_.at(std::size_t(r), std::size_t(c)));
    }
    return out;
}

std::unique_ptr<Segmenter> threshold_segmenter(double level) { return std::make_unique<ThresholdSegmenter>(level); }

std::unique_ptr<Segmenter> oracle_segmenter(std::size_t flip_blobs, std::size_t flip_size, Rng& rng,
                                            const BinaryMask& gt) {
    return std::make_unique<OracleSegmenter>(gt, flip_blobs, flip_size, rng);
}

SessionRecord run_session(const BinaryMask& gt, const Segmenter& segmenter, const SessionProtocol& protocol,
                          Rng& rng, const SFGParams& params, std::string object_id) {
    if (protocol.start_k != 3 && protocol.start_k != 4)
        throw InvalidArgument("run_session: start_k must be 3 or 4");
    if (protocol.max_clicks < protocol.start_k)
        throw InvalidArgument("run_session: max_clicks must be at least start_k");
    params.validate();

    SessionRecord rec;
    rec.object_id = std::move(object_id);
    rec.seed = rng.seed();
    rec.max_clicks = protocol.max_clicks;

    PointSet eps = extract_extreme_points(gt);
    if (protocol.start_k == 3)
        eps = select_three_points(eps, rng);
    if (protocol.noise_px > 0.0)
        eps = perturb_points(eps, protocol.noise_px, rng, gt.dims());
    rec.extreme_points = eps;

    ClickSet clicks;
    std::vector<CorrectiveClick> history;
    auto segment_round = [&]() {
        const ScalarField field = encode(eps, clicks, params, gt.dims());
        const BoundingBox bbox = bounding_box(eps, params.bbox_margin, gt.dims());
        BinaryMask pred = segmenter.segment({field, bbox, history});
        if (pred.dims() != gt.dims())
            throw InvalidArgument("segmenter returned a mask with the wrong dims");
        return pred;
    };

    try {
        BinaryMask pred = segment_round();
        std::size_t count = protocol.start_k;
        double score = iou(pred, gt);
        rec.steps.push_back({count, ClickKind::EP, score, std::nullopt});
        while (true) {
            if (score >= protocol.target_iou) {
                rec.outcome = SessionOutcome::TargetReached;
                break;
            }
            if (count >= protocol.max_clicks) {
                rec.outcome = SessionOutcome::BudgetExhausted;
                break;
            }
            const auto click = sample_corrective_click(pred, gt, SampleMode::Test, rng);
            if (!click) {
                rec.outcome = SessionOutcome::NoClickAvailable;
                break;
            }
            history.push_back(*click);
            (click->polarity == Polarity::FPC ? clicks.fpc : clicks.fnc).push_back(click->location);
            ++count;
            pred = segment_round();
            score = iou(pred, gt);
            rec.steps.push_back(
                {count, click->polarity == Polarity::FPC ? ClickKind::FPC : ClickKind::FNC, score, click->location});
        }
    } catch (const std::exception& e) {
        rec.outcome = SessionOutcome::Error;
        rec.error = e.what();
    }
    return rec;
}

ClicksAtIouSummary clicks_at_iou(std::span<const SessionRecord> records, double target) {
    if (records.empty())
        throw InvalidArgument("clicks_at_iou: no session records");
    ClicksAtIouSummary s;
    s.target = target;
    std::size_t first = std::numeric_limits<std::size_t>::max(), last = 0;
    double total = 0.0;
    for (const auto& rec : records) {
        std::optional<std::size_t> hit;
        for (const auto& st : rec.steps)
            if (st.iou >= target) {
                hit = st.click_count;
                break;
            }
        const std::size_t clicks = hit ? *hit : rec.max_clicks;
        s.clicks_per_session.push_back(clicks);
        s.reached.push_back(hit.has_value());
        if (!hit)
            ++s.unreached;
        total += double(clicks);
        if (!rec.steps.empty())
            first = std::min(first, rec.steps.front().click_count);
        last = std::max(last, rec.max_clicks);
    }
    s.mean_clicks = total / double(records.size());
    if (first == std::numeric_limits<std::size_t>::max())
        return s;
    s.first_click = first;
    for (std::size_t k = first; k <= last; ++k) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& rec : records) {
            const SessionStep* at = nullptr;
            for (const auto& st : rec.steps)
                if (st.click_count <= k)
                    at = &st;
            if (at) {
                sum += at->iou;
                ++n;
            }
        }
        s.mean_iou_at_click.push_back(n ? sum / double(n) : 0.0);
    }
    return s;
}

const char* to_string(ClickKind kind) {
    switch (kind) {
    case ClickKind::EP: return "EP";
    case ClickKind::FPC: return "FPC";
    case ClickKind::FNC: return "FNC";
    }
    return "?";
}

const char* to_string(SessionOutcome outcome) {
    switch (outcome) {
    case SessionOutcome::TargetReached: return "target_reached";
    case SessionOutcome::BudgetExhausted: return "budget_exhausted";
    case SessionOutcome::NoClickAvailable: return "no_click_available";
    case SessionOutcome::Error: return "error";
    }
    return "?";
}

} // namespace sfg
