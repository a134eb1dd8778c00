#pragma once

#include <optional>
#include <vector>

#include "voidseg/image.hpp"

namespace voidseg {

// ---------------------------------------------------------------------------
// Otsu thresholding
// ---------------------------------------------------------------------------

struct OtsuResult {
    int threshold = 0;
    BinaryMask mask;
};

// Threshold maximizing the between-class variance over the 256-bin histogram;
// ties resolved to the smallest threshold. Foreground is pixel > threshold
// (balls are brighter than the board background); pass dark_foreground=true
// for opposite-polarity sources. A constant image yields threshold == that
// constant and an empty foreground.
OtsuResult otsu_threshold(const GrayImage& img, bool dark_foreground = false);

// ---------------------------------------------------------------------------
// Gaussian blur / Laplacian of Gaussian
// ---------------------------------------------------------------------------

// Separable Gaussian convolution. Kernel radius = ceil(3*sigma); edges are
// handled by symmetric reflection (-1 -> 0, -2 -> 1, ...). sigma == 0 is the
// identity. Negative sigma is rejected.
FloatImage gaussian_blur(const FloatImage& img, double sigma);
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Gaussian smooth then 4-neighbour discrete Laplacian.
FloatImage log_response(const GrayImage& img, double sigma);

struct Contour {
    std::vector<Point> points;  // consecutive points are 8-neighbours
    bool closed = false;        // first/last 8-adjacent and length >= 4
};

struct ContourSet {
    std::vector<Contour> contours;
};

// Contours traced along LoG zero-crossings whose local response step exceeds
// min_strength (luminance units). sigma must be > 0.
ContourSet laplacian_of_gaussian(const GrayImage& img, double sigma, double min_strength = 1.0);

// Zero-crossing edge pixels of a response map (exposed for contour clipping
// and tests).
BinaryMask zero_crossings(const FloatImage& response, double min_strength);

// Chains traced from an edge mask (1-px-thinned internally).
ContourSet trace_contours(const BinaryMask& edges);

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

struct Region {
    int label = 0;  // 1-based
    int area = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    double centroid_x = 0.0, centroid_y = 0.0;
    int first_x = 0, first_y = 0;  // raster-order first pixel
};

struct LabeledRegions {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;  // 0 = background
    std::vector<Region> regions;       // regions[k] has label k+1

    std::int32_t label_at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Two-pass labeling; labels are contiguous 1..K in raster order of each
// region's first pixel.
LabeledRegions connected_components(const BinaryMask& mask, int connectivity = 8);

// Pixels of one region (row-major order).
std::vector<Point> region_pixels(const LabeledRegions& lr, int label);

// Region pixels with a 4-neighbour outside the region (or on the image edge).
std::vector<Point> region_boundary(const LabeledRegions& lr, int label);

// ---------------------------------------------------------------------------
// Circle fitting
// ---------------------------------------------------------------------------

struct CircleFit {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
    double residual = 0.0;  // RMS radial error of the fitted points
};

// Algebraic least-squares (Kasa) circle fit. Throws InputError when the
// points are degenerate (collinear or fewer than 3 distinct).
CircleFit fit_circle_points(const std::vector<Point>& pts);

// Fit to the boundary pixels of a labeled region; region area must be >= 5.
CircleFit fit_circle(const LabeledRegions& lr, int label);

// ---------------------------------------------------------------------------
// Disc helpers
// ---------------------------------------------------------------------------

// Paint value onto pixels with (x-cx)^2 + (y-cy)^2 < r^2.
void draw_disc(GrayImage& img, double cx, double cy, double r, std::uint8_t value);
void draw_disc(BinaryMask& mask, double cx, double cy, double r, std::uint8_t value = 1);

BinaryMask disc_mask(int width, int height, double cx, double cy, double r);

}  // namespace voidseg
