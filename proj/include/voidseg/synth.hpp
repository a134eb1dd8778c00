#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voidseg/ball_extraction.hpp"
#include "voidseg/imaging.hpp"
#include "voidseg/rng.hpp"

namespace voidseg {

struct BallDisc {
    double cx = 32.0;
    double cy = 32.0;
    double r = 20.0;
};

struct SynthConfig {
    int vc_min = 1, vc_max = 4;        // void count
    int vr_min = 2, vr_max = 7;        // void radius, px
    int vi_min = 6, vi_max = 9;        // void intensity offset, luminance
    double vb_min = 2.0, vb_max = 3.0; // edge blur sigma, px
    double vn_min = 1.0, vn_max = 2.0; // noise variance, luminance^2
    int i_max = 20000;                 // samples to generate
    int height = 64, width = 64;
    std::uint64_t master_seed = 0;
    bool resample_empty = false;       // redraw samples whose voids were all rejected

    void validate() const;  // throws on min > max or non-positive ranges
    // true when vi_min < thr_min, i.e. generated voids may fail the validity test
    bool below_thr_min(int thr_min) const { return vi_min < thr_min; }
};

struct VoidParams {
    int radius = 0;       // VR
    int intensity = 0;    // VI
    double blur = 0.0;    // VB
    double noise_var = 0.0;  // VN
    double x = 0.0;       // VX
    double y = 0.0;       // VY
    bool kept = false;
};

struct SampleParams {
    int void_count = 0;  // VC
    std::vector<VoidParams> voids;
};

struct SynthSample {
    GrayImage image;
    BinaryMask mask;
    SampleParams params;
    int rejected_voids = 0;
    std::uint64_t seed = 0;
    int source_crop = -1;  // index into the crop pool
};

// Algorithm-3 parameter draws: VC uniform in [vc_min, vc_max], then VC
// independent draws for each of VR, VI (integers), VB, VN (reals), and the
// centre (VX, VY) uniform over [0, W) x [0, H).
SampleParams sample_params(const SynthConfig& cfg, SeededRng& rng);

// Augments a non-void crop with the sampled voids:
//   - a void is kept iff dist(void centre, ball centre) + VR <= r_ball,
//   - each kept void adds VI to pixels within VR of its centre,
//   - zero-mean Gaussian noise of variance VN is added inside the void,
//   - a band of half-width VB around each void boundary is replaced by the
//     image blurred with sigma VB,
//   - the mask is the union of the kept discs.
SynthSample render_voids(const GrayImage& crop, const BallDisc& disc, const SampleParams& params,
                         SeededRng& rng);

// One fully seeded sample: derives the per-index RNG, picks a crop uniformly
// with replacement, samples parameters and renders.
SynthSample generate_sample(const std::vector<GrayImage>& crops, const std::vector<BallDisc>& discs,
                            const SynthConfig& cfg, std::uint64_t sample_index);

struct SynthDataset {
    std::vector<SynthSample> samples;
};

// i_max samples; a pure function of (crop pool, cfg).
SynthDataset generate_dataset(const std::vector<GrayImage>& crops,
                              const std::vector<BallDisc>& discs, const SynthConfig& cfg);

// Writes images/<id>.png, masks/<id>.png and manifest.jsonl under out_dir.
void write_dataset(const SynthDataset& ds, const std::string& out_dir);

// ---------------------------------------------------------------------------
// Synthetic board generator (test harness for the extraction pipeline)
// ---------------------------------------------------------------------------

struct BoardSpec {
    int rows = 4;
    int cols = 5;
    double pitch = 100.0;
    double r_ball = 20.0;
    std::uint8_t background = 40;
    std::uint8_t ball_level = 200;
    std::uint8_t occlusion_level = 25;
    double jitter = 0.0;  // per-ball uniform jitter in [-jitter, +jitter]
    std::vector<std::pair<int, int>> occluded;  // (row, col) balls hidden by a dark rect
    std::uint64_t seed = 0;
};

struct SyntheticBoard {
    GrayImage image;
    std::vector<BallDetection> truth;          // exact centres/radii, all balls
    std::vector<std::size_t> occluded_indices; // indices into truth
};

// Uniform background with bright discs at grid points; occluded balls are
// covered by a dark rectangle but still present in the ground truth. Rejects
// overlapping discs (pitch < 2 * r_ball).
SyntheticBoard synthesize_board(const BoardSpec& spec);

}  // namespace voidseg
