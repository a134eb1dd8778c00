#include "voidseg/ball_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace voidseg {

std::string to_string(BallSource s) {
    switch (s) {
        case BallSource::detected: return "detected";
        case BallSource::interpolated: return "interpolated";
        case BallSource::refined: return "refined";
    }
    return "detected";
}

BallSource ball_source_from_string(const std::string& s) {
    if (s == "detected") return BallSource::detected;
    if (s == "interpolated") return BallSource::interpolated;
    if (s == "refined") return BallSource::refined;
    throw InputError("unknown ball source: " + s);
}

void ExtractionConfig::validate() const {
    if (slice_w < 1 || slice_h < 1 || crop_size < 1 || search_range < 0 || sca <= 0.0)
        throw InputError("ExtractionConfig: all geometry fields must be positive");
}

BinaryMask slice_and_threshold(const GrayImage& board, const ExtractionConfig& cfg) {
    cfg.validate();
    BinaryMask out(board.width, board.height);
    for (int sy = 0; sy < board.height; sy += cfg.slice_h) {
        for (int sx = 0; sx < board.width; sx += cfg.slice_w) {
            const int sw = std::min(cfg.slice_w, board.width - sx);
            const int sh = std::min(cfg.slice_h, board.height - sy);
            GrayImage slice(sw, sh);
            for (int y = 0; y < sh; ++y)
                for (int x = 0; x < sw; ++x) slice.at(x, y) = board.at(sx + x, sy + y);
            const OtsuResult otsu = otsu_threshold(slice);
            for (int y = 0; y < sh; ++y)
                for (int x = 0; x < sw; ++x) out.at(sx + x, sy + y) = otsu.mask.at(x, y);
        }
    }
    return out;
}

double radius_mode(const std::vector<BallDetection>& detections) {
    if (detections.empty()) return 0.0;
    std::map<long, int> counts;
    for (const auto& d : detections) counts[std::lround(d.r)]++;
    long best_r = 0;
    int best_n = -1;
    for (const auto& [r, n] : counts) {
        // ties toward the larger radius: >= with ascending map order
        if (n >= best_n) {
            best_n = n;
            best_r = r;
        }
    }
    return static_cast<double>(best_r);
}

std::vector<BallDetection> filter_by_radius_mode(const std::vector<BallDetection>& detections,
                                                 double sca, int* removed_count) {
    const double r_mode = radius_mode(detections);
    const double r_thr = r_mode / sca;
    std::vector<BallDetection> kept;
    kept.reserve(detections.size());
    for (const auto& d : detections)
        if (std::abs(r_mode - d.r) <= r_thr) kept.push_back(d);
    if (removed_count) *removed_count = static_cast<int>(detections.size() - kept.size());
    return kept;
}

std::vector<BallDetection> detect_balls(const BinaryMask& mask, const ExtractionConfig& cfg) {
    cfg.validate();
    const LabeledRegions lr = connected_components(mask, 8);
    std::vector<BallDetection> found;
    for (const auto& reg : lr.regions) {
        if (reg.area < cfg.min_region_area) continue;
        CircleFit fit;
        try {
            fit = fit_circle(lr, reg.label);
        } catch (const InputError&) {
            continue;  // degenerate blob, not a ball
        }
        if (fit.residual > cfg.max_fit_residual) continue;
        if (fit.r < 1.0) continue;
        BallDetection det;
        det.cx = fit.cx;
        det.cy = fit.cy;
        det.r = fit.r;
        det.source = BallSource::detected;
        found.push_back(det);
    }
    return filter_by_radius_mode(found, cfg.sca);
}

namespace {

// 1-D gap clustering of detections by the given coordinate. Returns cluster
// index per detection, clusters ordered by ascending coordinate.
std::vector<int> cluster_1d(const std::vector<BallDetection>& dets, bool by_y, double gap,
                            int* n_clusters) {
    std::vector<int> order(dets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    auto coord = [&](int i) { return by_y ? dets[i].cy : dets[i].cx; };
    std::sort(order.begin(), order.end(), [&](int a, int b) { return coord(a) < coord(b); });

    std::vector<int> cluster(dets.size(), 0);
    int cur = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && coord(order[k]) - coord(order[k - 1]) > gap) ++cur;
        cluster[order[k]] = cur;
    }
    *n_clusters = static_cast<int>(order.empty() ? 0 : cur + 1);
    return cluster;
}

std::optional<double> median_spacing(const std::vector<double>& spacings) {
    if (spacings.empty()) return std::nullopt;
    std::vector<double> s = spacings;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    if (n % 2 == 1) return s[n / 2];
    return 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

}  // namespace

BallGrid cluster_grid(const std::vector<BallDetection>& detections) {
    BallGrid grid;
    grid.balls = detections;
    grid.r_mode = radius_mode(detections);
    if (detections.empty()) return grid;

    const double gap = std::max(grid.r_mode, 1.0);
    std::vector<int> rows = cluster_1d(grid.balls, /*by_y=*/true, gap, &grid.n_rows);
    std::vector<int> cols = cluster_1d(grid.balls, /*by_y=*/false, gap, &grid.n_cols);
    for (std::size_t i = 0; i < grid.balls.size(); ++i) {
        grid.balls[i].row_id = rows[i];
        grid.balls[i].col_id = cols[i];
    }

    std::vector<double> horiz, vert;
    for (int r = 0; r < grid.n_rows; ++r) {
        std::vector<double> xs;
        for (const auto& b : grid.balls)
            if (b.row_id == r) xs.push_back(b.cx);
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 1; i < xs.size(); ++i) horiz.push_back(xs[i] - xs[i - 1]);
    }
    for (int c = 0; c < grid.n_cols; ++c) {
        std::vector<double> ys;
        for (const auto& b : grid.balls)
            if (b.col_id == c) ys.push_back(b.cy);
        std::sort(ys.begin(), ys.end());
        for (std::size_t i = 1; i < ys.size(); ++i) vert.push_back(ys[i] - ys[i - 1]);
    }
    grid.d_ref_horizontal = median_spacing(horiz);
    grid.d_ref_vertical = median_spacing(vert);
    return grid;
}

std::vector<BallDetection> interpolate_missing(const BallGrid& grid) {
    std::vector<BallDetection> inserted;
    const double dedup_dist = std::max(1.0, grid.r_mode * 0.5);

    auto already_present = [&](double cx, double cy) {
        for (const auto& b : grid.balls)
            if (std::hypot(b.cx - cx, b.cy - cy) < dedup_dist) return true;
        for (const auto& b : inserted)
            if (std::hypot(b.cx - cx, b.cy - cy) < dedup_dist) return true;
        return false;
    };

    auto scan_axis = [&](bool rows) {
        const std::optional<double> d_ref = rows ? grid.d_ref_horizontal : grid.d_ref_vertical;
        if (!d_ref || *d_ref <= 0.0) return;
        const int n_clusters = rows ? grid.n_rows : grid.n_cols;
        for (int c = 0; c < n_clusters; ++c) {
            std::vector<const BallDetection*> members;
            for (const auto& b : grid.balls)
                if ((rows ? b.row_id : b.col_id) == c) members.push_back(&b);
            std::sort(members.begin(), members.end(), [&](const BallDetection* a, const BallDetection* b) {
                return rows ? a->cx < b->cx : a->cy < b->cy;
            });
            for (std::size_t i = 1; i < members.size(); ++i) {
                const BallDetection* a = members[i - 1];
                const BallDetection* b = members[i];
                const double d = rows ? (b->cx - a->cx) : (b->cy - a->cy);
                const long k = std::lround(d / *d_ref);
                if (k < 2) continue;
                for (long j = 1; j < k; ++j) {
                    const double t = static_cast<double>(j) / static_cast<double>(k);
                    const double cx = a->cx + t * (b->cx - a->cx);
                    const double cy = a->cy + t * (b->cy - a->cy);
                    if (already_present(cx, cy)) continue;
                    BallDetection det;
                    det.cx = cx;
                    det.cy = cy;
                    det.r = grid.r_mode;
                    det.source = BallSource::interpolated;
                    inserted.push_back(det);
                }
            }
        }
    };
    scan_axis(true);
    scan_axis(false);
    return inserted;
}

namespace {

// Mean squared difference between two crop_size windows of the board, each
// clipped to the board; only jointly valid pixels are compared.
double window_msd(const GrayImage& board, int ax0, int ay0, int bx0, int by0, int size,
                  bool* clipped) {
    double acc = 0.0;
    long n = 0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const int ax = ax0 + x, ay = ay0 + y;
            const int bx = bx0 + x, by = by0 + y;
            const bool a_ok = board.in_bounds(ax, ay);
            const bool b_ok = board.in_bounds(bx, by);
            if (!a_ok || !b_ok) {
                *clipped = true;
                continue;
            }
            const double d = static_cast<double>(board.at(ax, ay)) - board.at(bx, by);
            acc += d * d;
            ++n;
        }
    }
    if (n == 0) return std::numeric_limits<double>::infinity();
    return acc / static_cast<double>(n);
}

}  // namespace

BallDetection refine_by_template(const GrayImage& board, const BallGrid& grid,
                                 const BallDetection& candidate, const ExtractionConfig& cfg) {
    cfg.validate();
    const BallDetection* nearest = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& b : grid.balls) {
        if (b.source != BallSource::detected) continue;
        const double d = std::hypot(b.cx - candidate.cx, b.cy - candidate.cy);
        if (d < best_d) {
            best_d = d;
            nearest = &b;
        }
    }
    if (!nearest) throw InputError("refine_by_template: no detected neighbour to use as template");

    const int half = cfg.crop_size / 2;
    const int tx0 = static_cast<int>(std::lround(nearest->cx)) - half;
    const int ty0 = static_cast<int>(std::lround(nearest->cy)) - half;
    const int cx0 = static_cast<int>(std::lround(candidate.cx)) - half;
    const int cy0 = static_cast<int>(std::lround(candidate.cy)) - half;

    const int SR = cfg.search_range;
    double best_err = std::numeric_limits<double>::infinity();
    int best_dx = 0, best_dy = 0;
    long best_mag = std::numeric_limits<long>::max();
    bool clipped = false;
    for (int dy = -SR; dy <= SR; ++dy) {
        for (int dx = -SR; dx <= SR; ++dx) {
            const double err =
                window_msd(board, tx0, ty0, cx0 + dx, cy0 + dy, cfg.crop_size, &clipped);
            const long mag = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
            if (err < best_err || (err == best_err && mag < best_mag)) {
                best_err = err;
                best_dx = dx;
                best_dy = dy;
                best_mag = mag;
            }
        }
    }

    BallDetection refined = candidate;
    refined.pre_refine_cx = candidate.cx;
    refined.pre_refine_cy = candidate.cy;
    refined.cx = candidate.cx + best_dx;
    refined.cy = candidate.cy + best_dy;
    refined.source = BallSource::refined;
    refined.search_clipped = clipped;
    return refined;
}

std::vector<BallCrop> extract_crops(const GrayImage& board, const BallGrid& grid,
                                    const ExtractionConfig& cfg) {
    cfg.validate();
    const int half = cfg.crop_size / 2;
    std::vector<BallCrop> crops;
    crops.reserve(grid.balls.size());
    for (const auto& det : grid.balls) {
        const int x0 = static_cast<int>(std::lround(det.cx)) - half;
        const int y0 = static_cast<int>(std::lround(det.cy)) - half;
        GrayImage crop(cfg.crop_size, cfg.crop_size, 0);
        for (int y = 0; y < cfg.crop_size; ++y) {
            for (int x = 0; x < cfg.crop_size; ++x) {
                const int bx = x0 + x, by = y0 + y;
                if (board.in_bounds(bx, by)) crop.at(x, y) = board.at(bx, by);
            }
        }
        crops.push_back({std::move(crop), det});
    }
    return crops;
}

BinaryMask crop_ball_mask(const BallDetection& det, int crop_size) {
    const double c = crop_size / 2;
    return disc_mask(crop_size, crop_size, c, c, det.r);
}

BallGrid extract_ball_grid(const GrayImage& board, const ExtractionConfig& cfg) {
    const BinaryMask mask = slice_and_threshold(board, cfg);
    const std::vector<BallDetection> detections = detect_balls(mask, cfg);
    BallGrid grid = cluster_grid(detections);
    if (grid.balls.size() >= 2) {
        const std::vector<BallDetection> missing = interpolate_missing(grid);
        for (const auto& cand : missing) {
            BallDetection refined = refine_by_template(board, grid, cand, cfg);
            grid.balls.push_back(refined);
        }
        if (!missing.empty()) {
            // re-cluster so the inserted balls get row/col ids
            BallGrid reclustered = cluster_grid(grid.balls);
            reclustered.r_mode = grid.r_mode;
            grid = std::move(reclustered);
        }
    }
    return grid;
}

}  // namespace voidseg
