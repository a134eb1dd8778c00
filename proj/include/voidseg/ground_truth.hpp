#pragma once

#include <string>
#include <vector>

#include "voidseg/imaging.hpp"
#include "voidseg/synth.hpp"

namespace voidseg {

struct GroundTruthConfig {
    double log_sigma = 2.0;      // LoG sigma for void contours (unstated in the
                                 // source method; calibration knob)
    double log_min_strength = 1.0;
    int thr_min = 6;             // minimum I_void - I_BG for a valid void
    int ring_width = 3;          // I_BG ring width, px
};

struct VoidRegion {
    int label = 0;
    std::vector<Point> pixels;
    int area = 0;
    double i_void = 0.0;  // mean luminance inside
    double i_bg = 0.0;    // mean luminance of the surrounding ring
    bool valid = false;   // (i_void - i_bg) >= thr_min
};

enum class BallClass { void_ball, non_void };
enum class AnnotationSource { auto_log, manual_mask };

std::string to_string(BallClass c);
std::string to_string(AnnotationSource s);

struct BallLabel {
    std::string ball_id;
    BallClass cls = BallClass::non_void;
    std::vector<VoidRegion> regions;
    AnnotationSource source = AnnotationSource::auto_log;
    std::vector<Contour> open_contours;  // reported, never auto-closed
};

// LoG contours restricted to the inside of the ball disc; chains crossing the
// disc are clipped and re-classified (a clipped loop becomes open).
ContourSet contours_from_log(const GrayImage& crop, const BallDisc& disc,
                             const GroundTruthConfig& cfg);

// I_void = mean over the region; I_BG = mean over a ring_width-wide ring
// dilated around the region, intersected with the ball disc and excluding
// every void region. Falls back to the remaining ball pixels when the ring
// is empty.
void region_intensities(const GrayImage& crop, const BallDisc& disc,
                        const std::vector<Point>& region,
                        const std::vector<std::vector<Point>>& all_regions, int ring_width,
                        double* i_void, double* i_bg);

// Algorithm-2 classification from LoG contours: void iff any closed contour
// encloses a region passing the Thr_min validity test.
BallLabel classify_ball(const GrayImage& crop, const BallDisc& disc, const GroundTruthConfig& cfg);

// Classification from an externally supplied manual mask: connected
// components become the void regions; the validity test still applies.
BallLabel classify_ball_from_mask(const GrayImage& crop, const BallDisc& disc,
                                  const BinaryMask& mask, const GroundTruthConfig& cfg);

// Pixels enclosed by a closed contour (contour pixels included).
std::vector<Point> contour_interior(const Contour& contour, int width, int height);

// Imports {0,255} mask PNGs aligned with crops by filename. Orphan masks and
// size mismatches are errors.
std::vector<BallLabel> import_manual_masks(const std::string& crop_dir, const std::string& mask_dir,
                                           const BallDisc& disc, const GroundTruthConfig& cfg);

// Labels manifest (JSON lines).
void write_labels(const std::vector<BallLabel>& labels, const std::string& path);
std::vector<BallLabel> read_labels(const std::string& path);

}  // namespace voidseg
