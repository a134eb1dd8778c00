#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voidseg/imaging.hpp"

namespace voidseg {

enum class BallSource { detected, interpolated, refined };

std::string to_string(BallSource s);
BallSource ball_source_from_string(const std::string& s);

struct BallDetection {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
    BallSource source = BallSource::detected;
    int row_id = -1;
    int col_id = -1;
    // pre-refinement location, kept for audit on refined detections
    double pre_refine_cx = 0.0;
    double pre_refine_cy = 0.0;
    bool search_clipped = false;
};

struct ExtractionConfig {
    int slice_w = 400;  // slice columns
    int slice_h = 300;  // slice rows
    double sca = 5.0;
    int search_range = 5;  // SR
    int crop_size = 64;
    double max_fit_residual = 2.0;  // gate on RMS radial error of circle fits
    int min_region_area = 5;

    void validate() const;
};

// Per-slice Otsu on non-overlapping slice_h x slice_w tiles, reassembled in
// place. Edge tiles are thresholded on their actual extent.
BinaryMask slice_and_threshold(const GrayImage& board, const ExtractionConfig& cfg);

// Connected components -> circle fits -> radius-mode filter.
std::vector<BallDetection> detect_balls(const BinaryMask& mask, const ExtractionConfig& cfg);

// Mode of radii rounded to the nearest integer; ties broken toward the larger
// radius. Returns 0 for an empty list.
double radius_mode(const std::vector<BallDetection>& detections);

// Removes detections with |r_mode - r| > r_mode / sca. Returns the kept list;
// removed_count reports how many were dropped. Idempotent.
std::vector<BallDetection> filter_by_radius_mode(const std::vector<BallDetection>& detections,
                                                 double sca, int* removed_count = nullptr);

struct BallGrid {
    std::vector<BallDetection> balls;
    double r_mode = 0.0;
    std::optional<double> d_ref_horizontal;  // median in-row neighbour spacing
    std::optional<double> d_ref_vertical;    // median in-column neighbour spacing
    int n_rows = 0;
    int n_cols = 0;
};

// Gap-based 1-D clustering of cy into rows and cx into columns (new cluster
// when the sorted gap exceeds r_mode); assigns row_id/col_id on each ball.
BallGrid cluster_grid(const std::vector<BallDetection>& detections);

// For every within-cluster neighbour gap d with round(d / d_ref) = k >= 2,
// inserts k-1 evenly spaced detections with r = r_mode. Both axes are
// scanned; duplicate candidates (one gap seen from the row and the column
// pass) are merged.
std::vector<BallDetection> interpolate_missing(const BallGrid& grid);

// Template matching around an interpolated location: the nearest detected
// ball is the template, all (2*SR+1)^2 integer offsets are tried, and the
// offset with the minimum mean squared difference wins. Ties break to the
// smallest offset magnitude, then raster order.
BallDetection refine_by_template(const GrayImage& board, const BallGrid& grid,
                                 const BallDetection& candidate, const ExtractionConfig& cfg);

struct BallCrop {
    GrayImage image;
    BallDetection detection;
};

// crop_size x crop_size windows centred on round(cx), round(cy), zero-padded
// at board edges.
std::vector<BallCrop> extract_crops(const GrayImage& board, const BallGrid& grid,
                                    const ExtractionConfig& cfg);

// Full Algorithm-1 pipeline: slice+threshold, detect, radius filter, cluster,
// interpolate, refine. Returns the finalized grid.
BallGrid extract_ball_grid(const GrayImage& board, const ExtractionConfig& cfg);

// Disc mask of the ball inside its crop (ball centred at crop_size/2).
BinaryMask crop_ball_mask(const BallDetection& det, int crop_size);

}  // namespace voidseg
