#include "voidseg/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "voidseg/png_io.hpp"

namespace voidseg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(BallClass c) { return c == BallClass::void_ball ? "void" : "non_void"; }

std::string to_string(AnnotationSource s) {
    return s == AnnotationSource::auto_log ? "auto_log" : "manual_mask";
}

ContourSet contours_from_log(const GrayImage& crop, const BallDisc& disc,
                             const GroundTruthConfig& cfg) {
    const ContourSet raw = laplacian_of_gaussian(crop, cfg.log_sigma, cfg.log_min_strength);
    const double r2 = disc.r * disc.r;
    auto inside = [&](const Point& p) {
        return (p.x - disc.cx) * (p.x - disc.cx) + (p.y - disc.cy) * (p.y - disc.cy) < r2;
    };

    ContourSet clipped;
    for (const auto& c : raw.contours) {
        // split the chain at points outside the disc
        Contour cur;
        bool any_removed = false;
        auto flush = [&]() {
            if (cur.points.size() >= 2) {
                if (!any_removed && c.closed) {
                    cur.closed = true;
                } else if (cur.points.size() >= 4) {
                    const Point& a = cur.points.front();
                    const Point& b = cur.points.back();
                    cur.closed = !any_removed && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
                }
                clipped.contours.push_back(cur);
            }
            cur = Contour{};
        };
        for (const auto& p : c.points) {
            if (inside(p)) {
                cur.points.push_back(p);
            } else {
                any_removed = true;
                flush();
            }
        }
        flush();
    }
    return clipped;
}

std::vector<Point> contour_interior(const Contour& contour, int width, int height) {
    BinaryMask wall(width, height);
    for (const auto& p : contour.points)
        if (wall.in_bounds(p.x, p.y)) wall.at(p.x, p.y) = 1;

    // flood fill the outside from the border; interior = unreached & not wall,
    // plus the contour pixels themselves
    BinaryMask outside(width, height);
    std::vector<Point> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || x >= width || y < 0 || y >= height) return;
        if (wall.at(x, y) || outside.at(x, y)) return;
        outside.at(x, y) = 1;
        stack.push_back({x, y});
    };
    for (int x = 0; x < width; ++x) {
        push(x, 0);
        push(x, height - 1);
    }
    for (int y = 0; y < height; ++y) {
        push(0, y);
        push(width - 1, y);
    }
    while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        push(p.x - 1, p.y);
        push(p.x + 1, p.y);
        push(p.x, p.y - 1);
        push(p.x, p.y + 1);
    }

    std::vector<Point> interior;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (!outside.at(x, y)) interior.push_back({x, y});
    return interior;
}

void region_intensities(const GrayImage& crop, const BallDisc& disc,
                        const std::vector<Point>& region,
                        const std::vector<std::vector<Point>>& all_regions, int ring_width,
                        double* i_void, double* i_bg) {
    if (region.empty()) throw InputError("region_intensities: empty region");

    double sum = 0.0;
    for (const auto& p : region) sum += crop.at(p.x, p.y);
    *i_void = sum / static_cast<double>(region.size());

    BinaryMask in_any_void(crop.width, crop.height);
    for (const auto& reg : all_regions)
        for (const auto& p : reg)
            if (in_any_void.in_bounds(p.x, p.y)) in_any_void.at(p.x, p.y) = 1;
    BinaryMask in_region(crop.width, crop.height);
    for (const auto& p : region)
        if (in_region.in_bounds(p.x, p.y)) in_region.at(p.x, p.y) = 1;

    const double ball_r2 = disc.r * disc.r;
    auto in_ball = [&](int x, int y) {
        return (x - disc.cx) * (x - disc.cx) + (y - disc.cy) * (y - disc.cy) < ball_r2;
    };

    // ring = dilate(region, ring_width) \ region, inside the ball, excluding
    // all void regions
    const int rw = ring_width;
    double ring_sum = 0.0;
    long ring_n = 0;
    BinaryMask counted(crop.width, crop.height);
    for (const auto& p : region) {
        for (int dy = -rw; dy <= rw; ++dy) {
            for (int dx = -rw; dx <= rw; ++dx) {
                if (dx * dx + dy * dy > rw * rw) continue;
                const int x = p.x + dx, y = p.y + dy;
                if (!crop.in_bounds(x, y) || counted.at(x, y)) continue;
                counted.at(x, y) = 1;
                if (in_region.at(x, y) || in_any_void.at(x, y)) continue;
                if (!in_ball(x, y)) continue;
                ring_sum += crop.at(x, y);
                ++ring_n;
            }
        }
    }
    if (ring_n == 0) {
        // region fills the ball: fall back to the remaining ball pixels
        for (int y = 0; y < crop.height; ++y)
            for (int x = 0; x < crop.width; ++x)
                if (in_ball(x, y) && !in_any_void.at(x, y)) {
                    ring_sum += crop.at(x, y);
                    ++ring_n;
                }
    }
    *i_bg = ring_n > 0 ? ring_sum / static_cast<double>(ring_n) : *i_void;
}

namespace {

BallLabel label_from_regions(const GrayImage& crop, const BallDisc& disc,
                             std::vector<std::vector<Point>> pixel_sets,
                             const GroundTruthConfig& cfg, AnnotationSource src) {
    BallLabel label;
    label.source = src;
    int next = 0;
    for (const auto& pts : pixel_sets) {
        VoidRegion reg;
        reg.label = ++next;
        reg.pixels = pts;
        reg.area = static_cast<int>(pts.size());
        region_intensities(crop, disc, pts, pixel_sets, cfg.ring_width, &reg.i_void, &reg.i_bg);
        reg.valid = (reg.i_void - reg.i_bg) >= static_cast<double>(cfg.thr_min);
        label.regions.push_back(std::move(reg));
    }
    const bool any_valid =
        std::any_of(label.regions.begin(), label.regions.end(), [](const VoidRegion& r) { return r.valid; });
    label.cls = any_valid ? BallClass::void_ball : BallClass::non_void;
    return label;
}

}  // namespace

BallLabel classify_ball(const GrayImage& crop, const BallDisc& disc, const GroundTruthConfig& cfg) {
    const ContourSet contours = contours_from_log(crop, disc, cfg);
    std::vector<std::vector<Point>> pixel_sets;
    std::vector<Contour> open;
    for (const auto& c : contours.contours) {
        if (!c.closed) {
            open.push_back(c);
            continue;
        }
        std::vector<Point> interior = contour_interior(c, crop.width, crop.height);
        if (!interior.empty()) pixel_sets.push_back(std::move(interior));
    }
    BallLabel label = label_from_regions(crop, disc, std::move(pixel_sets), cfg, AnnotationSource::auto_log);
    label.open_contours = std::move(open);
    return label;
}

BallLabel classify_ball_from_mask(const GrayImage& crop, const BallDisc& disc,
                                  const BinaryMask& mask, const GroundTruthConfig& cfg) {
    if (mask.width != crop.width || mask.height != crop.height)
        throw InputError("classify_ball_from_mask: mask size differs from crop size");
    const LabeledRegions lr = connected_components(mask, 8);
    std::vector<std::vector<Point>> pixel_sets;
    for (const auto& reg : lr.regions) pixel_sets.push_back(region_pixels(lr, reg.label));
    return label_from_regions(crop, disc, std::move(pixel_sets), cfg, AnnotationSource::manual_mask);
}

std::vector<BallLabel> import_manual_masks(const std::string& crop_dir, const std::string& mask_dir,
                                           const BallDisc& disc, const GroundTruthConfig& cfg) {
    std::set<std::string> crop_names, mask_names;
    for (const auto& e : fs::directory_iterator(crop_dir))
        if (e.path().extension() == ".png") crop_names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(mask_dir))
        if (e.path().extension() == ".png") mask_names.insert(e.path().filename().string());

    for (const auto& m : mask_names)
        if (!crop_names.count(m)) throw InputError("orphan mask without a matching crop: " + m);
    for (const auto& c : crop_names)
        if (!mask_names.count(c)) throw InputError("crop without a matching mask: " + c);

    std::vector<BallLabel> labels;
    for (const auto& name : crop_names) {
        const GrayImage crop = load_image((fs::path(crop_dir) / name).string());
        const BinaryMask mask = load_mask((fs::path(mask_dir) / name).string());
        if (mask.width != crop.width || mask.height != crop.height)
            throw InputError("mask size mismatch for " + name);
        BallLabel label = classify_ball_from_mask(crop, disc, mask, cfg);
        label.ball_id = fs::path(name).stem().string();
        labels.push_back(std::move(label));
    }
    return labels;
}

void write_labels(const std::vector<BallLabel>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write labels manifest: " + path);
    for (const auto& l : labels) {
        json rec;
        rec["ball_id"] = l.ball_id;
        rec["class"] = to_string(l.cls);
        rec["source"] = to_string(l.source);
        json regions = json::array();
        for (const auto& r : l.regions)
            regions.push_back({{"area", r.area},
                               {"I_void", r.i_void},
                               {"I_BG", r.i_bg},
                               {"valid", r.valid}});
        rec["regions"] = std::move(regions);
        rec["open_contours"] = l.open_contours.size();
        out << rec.dump() << "\n";
    }
}

std::vector<BallLabel> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read labels manifest: " + path);
    std::vector<BallLabel> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json rec = json::parse(line);
        BallLabel l;
        l.ball_id = rec.at("ball_id").get<std::string>();
        l.cls = rec.at("class").get<std::string>() == "void" ? BallClass::void_ball : BallClass::non_void;
        l.source = rec.at("source").get<std::string>() == "manual_mask" ? AnnotationSource::manual_mask
                                                                        : AnnotationSource::auto_log;
        for (const auto& r : rec.at("regions")) {
            VoidRegion reg;
            reg.area = r.at("area").get<int>();
            reg.i_void = r.at("I_void").get<double>();
            reg.i_bg = r.at("I_BG").get<double>();
            reg.valid = r.at("valid").get<bool>();
            l.regions.push_back(std::move(reg));
        }
        labels.push_back(std::move(l));
    }
    return labels;
}

}  // namespace voidseg
