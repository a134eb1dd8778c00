#include "voidseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "voidseg/png_io.hpp"

namespace voidseg {

namespace fs = std::filesystem;
using nlohmann::json;

void SynthConfig::validate() const {
    auto check = [](double lo, double hi, const char* name) {
        if (lo > hi) throw InputError(std::string("SynthConfig: ") + name + "_min > " + name + "_max");
        if (lo <= 0) throw InputError(std::string("SynthConfig: ") + name + " range must be positive");
    };
    check(vc_min, vc_max, "VC");
    check(vr_min, vr_max, "VR");
    check(vi_min, vi_max, "VI");
    check(vb_min, vb_max, "VB");
    check(vn_min, vn_max, "VN");
    if (i_max < 0) throw InputError("SynthConfig: I_max must be >= 0");
    if (width < 1 || height < 1) throw InputError("SynthConfig: image dimensions must be >= 1");
}

SampleParams sample_params(const SynthConfig& cfg, SeededRng& rng) {
    SampleParams p;
    p.void_count = static_cast<int>(rng.uniform_int(cfg.vc_min, cfg.vc_max));
    p.voids.resize(p.void_count);
    for (auto& v : p.voids) v.radius = static_cast<int>(rng.uniform_int(cfg.vr_min, cfg.vr_max));
    for (auto& v : p.voids) v.intensity = static_cast<int>(rng.uniform_int(cfg.vi_min, cfg.vi_max));
    for (auto& v : p.voids) v.blur = rng.uniform_real(cfg.vb_min, cfg.vb_max);
    for (auto& v : p.voids) v.noise_var = rng.uniform_real(cfg.vn_min, cfg.vn_max);
    for (auto& v : p.voids) v.x = rng.uniform_real(0.0, cfg.width);
    for (auto& v : p.voids) v.y = rng.uniform_real(0.0, cfg.height);
    return p;
}

SynthSample render_voids(const GrayImage& crop, const BallDisc& disc, const SampleParams& params,
                         SeededRng& rng) {
    SynthSample sample;
    sample.params = params;
    sample.mask = BinaryMask(crop.width, crop.height);

    FloatImage img = to_float(crop);

    // keep iff the void disc lies entirely inside the ball disc
    for (auto& v : sample.params.voids) {
        const double d = std::hypot(v.x - disc.cx, v.y - disc.cy);
        v.kept = (d + v.radius) <= disc.r;
        if (!v.kept) ++sample.rejected_voids;
    }

    // paint, then noise, then edge blur (the algorithm's step order)
    for (const auto& v : sample.params.voids) {
        if (!v.kept) continue;
        const double r2 = static_cast<double>(v.radius) * v.radius;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if ((x - v.x) * (x - v.x) + (y - v.y) * (y - v.y) < r2) {
                    img.at(x, y) += static_cast<float>(v.intensity);
                    sample.mask.at(x, y) = 1;
                }
    }
    for (const auto& v : sample.params.voids) {
        if (!v.kept) continue;
        const double sd = std::sqrt(v.noise_var);
        const double r2 = static_cast<double>(v.radius) * v.radius;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if ((x - v.x) * (x - v.x) + (y - v.y) * (y - v.y) < r2)
                    img.at(x, y) += static_cast<float>(rng.gaussian(0.0, sd));
    }
    for (const auto& v : sample.params.voids) {
        if (!v.kept) continue;
        if (v.blur <= 0.0) continue;
        const FloatImage blurred = gaussian_blur(img, v.blur);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                const double d = std::hypot(x - v.x, y - v.y);
                if (std::abs(d - v.radius) <= v.blur) img.at(x, y) = blurred.at(x, y);
            }
    }

    sample.image = quantize(img);
    return sample;
}

SynthSample generate_sample(const std::vector<GrayImage>& crops, const std::vector<BallDisc>& discs,
                            const SynthConfig& cfg, std::uint64_t sample_index) {
    if (crops.empty()) throw InputError("generate_sample: empty crop pool");
    if (discs.size() != crops.size())
        throw InputError("generate_sample: need one ball disc per crop");

    std::uint64_t seed = derive_seed(cfg.master_seed, sample_index);
    for (int attempt = 0;; ++attempt) {
        SeededRng rng(seed);
        const int crop_idx = static_cast<int>(rng.uniform_int(0, static_cast<int>(crops.size()) - 1));
        SampleParams params = sample_params(cfg, rng);
        SynthSample sample = render_voids(crops[crop_idx], discs[crop_idx], params, rng);
        sample.seed = seed;
        sample.source_crop = crop_idx;
        const bool empty = sample.mask.count() == 0;
        if (!empty || !cfg.resample_empty || attempt >= 64) return sample;
        seed = derive_seed(seed, 0x7e5a11ull);  // redraw deterministically
    }
}

SynthDataset generate_dataset(const std::vector<GrayImage>& crops,
                              const std::vector<BallDisc>& discs, const SynthConfig& cfg) {
    cfg.validate();
    if (crops.empty()) throw InputError("generate_dataset: empty crop pool");
    SynthDataset ds;
    ds.samples.resize(cfg.i_max);
    for (int i = 0; i < cfg.i_max; ++i)
        ds.samples[i] = generate_sample(crops, discs, cfg, static_cast<std::uint64_t>(i));
    return ds;
}

namespace {

std::string sample_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", index);
    return buf;
}

}  // namespace

void write_dataset(const SynthDataset& ds, const std::string& out_dir) {
    fs::create_directories(fs::path(out_dir) / "images");
    fs::create_directories(fs::path(out_dir) / "masks");

    std::ofstream manifest(fs::path(out_dir) / "manifest.jsonl");
    if (!manifest) throw InputError("cannot write manifest in " + out_dir);

    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const SynthSample& s = ds.samples[i];
        const std::string id = sample_id(i);
        const std::string img_rel = "images/" + id + ".png";
        const std::string mask_rel = "masks/" + id + ".png";
        save_image(s.image, (fs::path(out_dir) / img_rel).string());
        save_mask(s.mask, (fs::path(out_dir) / mask_rel).string());

        json rec;
        rec["id"] = id;
        rec["image"] = img_rel;
        rec["mask"] = mask_rel;
        rec["class"] = s.mask.count() > 0 ? "void" : "non_void";
        rec["origin"] = "synthetic";
        rec["seed"] = s.seed;
        rec["source_crop"] = s.source_crop;
        rec["rejected_voids"] = s.rejected_voids;
        rec["VC"] = s.params.void_count;
        json voids = json::array();
        for (const auto& v : s.params.voids) {
            voids.push_back({{"VR", v.radius},
                             {"VI", v.intensity},
                             {"VB", v.blur},
                             {"VN", v.noise_var},
                             {"VX", v.x},
                             {"VY", v.y},
                             {"kept", v.kept}});
        }
        rec["voids"] = std::move(voids);
        manifest << rec.dump() << "\n";
    }
}

SyntheticBoard synthesize_board(const BoardSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw InputError("synthesize_board: rows/cols must be >= 1");
    if (spec.pitch < 2.0 * spec.r_ball)
        throw InputError("synthesize_board: overlapping discs (pitch < 2 * r_ball)");

    const double margin = spec.pitch;
    const int width = static_cast<int>(std::ceil(2 * margin + (spec.cols - 1) * spec.pitch));
    const int height = static_cast<int>(std::ceil(2 * margin + (spec.rows - 1) * spec.pitch));

    SyntheticBoard board;
    board.image = GrayImage(width, height, spec.background);

    SeededRng rng(spec.seed);
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            double cx = margin + c * spec.pitch;
            double cy = margin + r * spec.pitch;
            if (spec.jitter > 0.0) {
                cx += rng.uniform_real(-spec.jitter, spec.jitter);
                cy += rng.uniform_real(-spec.jitter, spec.jitter);
            }
            draw_disc(board.image, cx, cy, spec.r_ball, spec.ball_level);
            BallDetection det;
            det.cx = cx;
            det.cy = cy;
            det.r = spec.r_ball;
            det.row_id = r;
            det.col_id = c;
            board.truth.push_back(det);
        }
    }

    for (const auto& [r, c] : spec.occluded) {
        if (r < 0 || r >= spec.rows || c < 0 || c >= spec.cols)
            throw InputError("synthesize_board: occluded ball outside the grid");
        const std::size_t idx = static_cast<std::size_t>(r) * spec.cols + c;
        const BallDetection& det = board.truth[idx];
        const int pad = static_cast<int>(spec.r_ball) + 4;
        const int x0 = std::max(0, static_cast<int>(det.cx) - pad);
        const int x1 = std::min(width - 1, static_cast<int>(det.cx) + pad);
        const int y0 = std::max(0, static_cast<int>(det.cy) - pad);
        const int y1 = std::min(height - 1, static_cast<int>(det.cy) + pad);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) board.image.at(x, y) = spec.occlusion_level;
        board.occluded_indices.push_back(idx);
    }
    return board;
}

}  // namespace voidseg
