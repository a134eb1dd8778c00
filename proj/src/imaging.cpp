#include "voidseg/imaging.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace voidseg {

// ---------------------------------------------------------------------------
// Otsu
// ---------------------------------------------------------------------------

OtsuResult otsu_threshold(const GrayImage& img, bool dark_foreground) {
    if (img.size() == 0) throw InputError("otsu_threshold: empty image");

    std::array<std::int64_t, 256> hist{};
    for (auto p : img.pixels) hist[p]++;

    const std::int64_t total = static_cast<std::int64_t>(img.size());
    std::int64_t sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<std::int64_t>(v) * hist[v];

    int best_t = 0;
    double best_var = -1.0;
    std::int64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += static_cast<std::int64_t>(t) * hist[t];
        const std::int64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
        const double mu1 = static_cast<double>(sum_all - s0) / static_cast<double>(n1);
        const double var = static_cast<double>(n0) * static_cast<double>(n1) * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    if (best_var < 0.0) {
        // single-class histogram: threshold = the constant, empty foreground
        best_t = img.pixels[0];
    }

    OtsuResult res;
    res.threshold = best_t;
    res.mask = BinaryMask(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const bool fg = dark_foreground ? (img.pixels[i] <= best_t) : (img.pixels[i] > best_t);
        res.mask.bits[i] = fg ? 1 : 0;
    }
    if (best_var < 0.0 && dark_foreground) {
        // keep the degenerate contract symmetric: constant image -> empty mask
        std::fill(res.mask.bits.begin(), res.mask.bits.end(), 0);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Gaussian blur
// ---------------------------------------------------------------------------

namespace {

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + radius] = static_cast<float>(w);
        sum += w;
    }
    for (auto& w : k) w = static_cast<float>(w / sum);
    return k;
}

// symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

}  // namespace

FloatImage gaussian_blur(const FloatImage& img, double sigma) {
    if (sigma < 0.0) throw InputError("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return img;

    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width, h = img.height;

    FloatImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        const float* row = img.v.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * row[reflect(x + i, w)];
            tmp.at(x, y) = acc;
        }
    }
    FloatImage out(w, h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            float acc = 0.f;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(x, reflect(y + i, h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma == 0.0) return img;
    return quantize(gaussian_blur(to_float(img), sigma));
}

// ---------------------------------------------------------------------------
// LoG and contours
// ---------------------------------------------------------------------------

FloatImage log_response(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) throw InputError("log_response: sigma must be > 0");
    const FloatImage smooth = gaussian_blur(to_float(img), sigma);
    const int w = img.width, h = img.height;
    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float c = smooth.at(x, y);
            const float l = smooth.at(reflect(x - 1, w), y);
            const float r = smooth.at(reflect(x + 1, w), y);
            const float u = smooth.at(x, reflect(y - 1, h));
            const float d = smooth.at(x, reflect(y + 1, h));
            out.at(x, y) = l + r + u + d - 4.f * c;
        }
    }
    return out;
}

BinaryMask zero_crossings(const FloatImage& resp, double min_strength) {
    const int w = resp.width, h = resp.height;
    BinaryMask edges(w, h);
    auto consider = [&](int x0, int y0, int x1, int y1) {
        const float a = resp.at(x0, y0);
        const float b = resp.at(x1, y1);
        if (a * b >= 0.f) return;
        if (std::abs(a - b) < static_cast<float>(min_strength)) return;
        // mark the smaller-magnitude side to keep edges thin
        if (std::abs(a) <= std::abs(b))
            edges.at(x0, y0) = 1;
        else
            edges.at(x1, y1) = 1;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) consider(x, y, x + 1, y);
            if (y + 1 < h) consider(x, y, x, y + 1);
        }
    }
    return edges;
}

namespace {

int count_neighbors(const BinaryMask& m, int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (m.in_bounds(nx, ny) && m.at(nx, ny)) ++n;
        }
    return n;
}

// Zhang-Suen thinning to 1-px curves so chains trace cleanly.
void thin(BinaryMask& m) {
    const int w = m.width, h = m.height;
    auto at = [&](int x, int y) -> int { return m.in_bounds(x, y) ? m.at(x, y) : 0; };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<Point> kill;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!m.at(x, y)) continue;
                    const int p2 = at(x, y - 1), p3 = at(x + 1, y - 1), p4 = at(x + 1, y);
                    const int p5 = at(x + 1, y + 1), p6 = at(x, y + 1), p7 = at(x - 1, y + 1);
                    const int p8 = at(x - 1, y), p9 = at(x - 1, y - 1);
                    const int bp = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    if (bp < 2 || bp > 6) continue;
                    int ap = 0;
                    const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
                    for (int i = 0; i < 8; ++i)
                        if (seq[i] == 0 && seq[i + 1] == 1) ++ap;
                    if (ap != 1) continue;
                    if (pass == 0) {
                        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
                    } else {
                        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
                    }
                    kill.push_back({x, y});
                }
            }
            for (const auto& p : kill) m.at(p.x, p.y) = 0;
            if (!kill.empty()) changed = true;
        }
    }
}

}  // namespace

ContourSet trace_contours(const BinaryMask& edges_in) {
    BinaryMask edges = edges_in;
    thin(edges);

    const int w = edges.width, h = edges.height;
    BinaryMask visited(w, h);
    ContourSet out;

    // neighbor preference: 4-neighbours first to keep chains tight
    static const int dx8[8] = {1, 0, -1, 0, 1, -1, -1, 1};
    static const int dy8[8] = {0, 1, 0, -1, -1, -1, 1, 1};

    auto walk = [&](int sx, int sy) {
        Contour c;
        int x = sx, y = sy;
        visited.at(x, y) = 1;
        c.points.push_back({x, y});
        while (true) {
            bool moved = false;
            for (int k = 0; k < 8; ++k) {
                const int nx = x + dx8[k], ny = y + dy8[k];
                if (!edges.in_bounds(nx, ny)) continue;
                if (!edges.at(nx, ny) || visited.at(nx, ny)) continue;
                x = nx;
                y = ny;
                visited.at(x, y) = 1;
                c.points.push_back({x, y});
                moved = true;
                break;
            }
            if (!moved) break;
        }
        if (c.points.size() >= 4) {
            const Point& a = c.points.front();
            const Point& b = c.points.back();
            c.closed = std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1;
        }
        return c;
    };

    // endpoints first so open curves start at their tips
    for (int pass = 0; pass < 2; ++pass) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!edges.at(x, y) || visited.at(x, y)) continue;
                if (pass == 0 && count_neighbors(edges, x, y) != 1) continue;
                Contour c = walk(x, y);
                if (c.points.size() >= 2) out.contours.push_back(std::move(c));
            }
        }
    }
    return out;
}

ContourSet laplacian_of_gaussian(const GrayImage& img, double sigma, double min_strength) {
    if (sigma <= 0.0) throw InputError("laplacian_of_gaussian: sigma must be > 0");
    return trace_contours(zero_crossings(log_response(img, sigma), min_strength));
}

// ---------------------------------------------------------------------------
// Connected components (two-pass, union-find)
// ---------------------------------------------------------------------------

namespace {

int uf_find(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

void uf_union(std::vector<int>& parent, int a, int b) {
    a = uf_find(parent, a);
    b = uf_find(parent, b);
    if (a < b)
        parent[b] = a;
    else if (b < a)
        parent[a] = b;
}

}  // namespace

LabeledRegions connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw InputError("connected_components: connectivity must be 4 or 8");

    const int w = mask.width, h = mask.height;
    LabeledRegions lr;
    lr.width = w;
    lr.height = h;
    lr.labels.assign(static_cast<std::size_t>(w) * h, 0);

    std::vector<int> parent;
    parent.push_back(0);  // background sentinel

    auto provisional = [&](int x, int y) -> int { return lr.labels[static_cast<std::size_t>(y) * w + x]; };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            int neigh[4];
            int n = 0;
            if (x > 0 && mask.at(x - 1, y)) neigh[n++] = provisional(x - 1, y);
            if (y > 0 && mask.at(x, y - 1)) neigh[n++] = provisional(x, y - 1);
            if (connectivity == 8 && y > 0) {
                if (x > 0 && mask.at(x - 1, y - 1)) neigh[n++] = provisional(x - 1, y - 1);
                if (x + 1 < w && mask.at(x + 1, y - 1)) neigh[n++] = provisional(x + 1, y - 1);
            }
            if (n == 0) {
                const int fresh = static_cast<int>(parent.size());
                parent.push_back(fresh);
                lr.labels[static_cast<std::size_t>(y) * w + x] = fresh;
            } else {
                int mn = neigh[0];
                for (int i = 1; i < n; ++i) mn = std::min(mn, neigh[i]);
                lr.labels[static_cast<std::size_t>(y) * w + x] = mn;
                for (int i = 0; i < n; ++i) uf_union(parent, mn, neigh[i]);
            }
        }
    }

    // relabel to contiguous ids in raster order of first pixel
    std::vector<int> remap(parent.size(), 0);
    int next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int& lab = lr.labels[static_cast<std::size_t>(y) * w + x];
            if (lab == 0) continue;
            const int root = uf_find(parent, lab);
            if (remap[root] == 0) {
                remap[root] = ++next;
                Region reg;
                reg.label = next;
                reg.min_x = reg.max_x = x;
                reg.min_y = reg.max_y = y;
                reg.first_x = x;
                reg.first_y = y;
                lr.regions.push_back(reg);
            }
            lab = remap[root];
            Region& reg = lr.regions[lab - 1];
            reg.area++;
            reg.min_x = std::min(reg.min_x, x);
            reg.max_x = std::max(reg.max_x, x);
            reg.min_y = std::min(reg.min_y, y);
            reg.max_y = std::max(reg.max_y, y);
            reg.centroid_x += x;
            reg.centroid_y += y;
        }
    }
    for (auto& reg : lr.regions) {
        reg.centroid_x /= reg.area;
        reg.centroid_y /= reg.area;
    }
    return lr;
}

std::vector<Point> region_pixels(const LabeledRegions& lr, int label) {
    std::vector<Point> pts;
    for (int y = 0; y < lr.height; ++y)
        for (int x = 0; x < lr.width; ++x)
            if (lr.label_at(x, y) == label) pts.push_back({x, y});
    return pts;
}

std::vector<Point> region_boundary(const LabeledRegions& lr, int label) {
    std::vector<Point> pts;
    const Region& reg = lr.regions.at(label - 1);
    for (int y = reg.min_y; y <= reg.max_y; ++y) {
        for (int x = reg.min_x; x <= reg.max_x; ++x) {
            if (lr.label_at(x, y) != label) continue;
            const bool edge = x == 0 || x == lr.width - 1 || y == 0 || y == lr.height - 1 ||
                              lr.label_at(x - 1, y) != label || lr.label_at(x + 1, y) != label ||
                              lr.label_at(x, y - 1) != label || lr.label_at(x, y + 1) != label;
            if (edge) pts.push_back({x, y});
        }
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Circle fit (Kasa normal equations, centroid-shifted for conditioning)
// ---------------------------------------------------------------------------

CircleFit fit_circle_points(const std::vector<Point>& pts) {
    if (pts.size() < 3) throw InputError("fit_circle: need at least 3 boundary points");

    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());

    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
        const double x = p.x - mx, y = p.y - my;
        const double z = x * x + y * y;
        A(0, 0) += x * x;
        A(0, 1) += x * y;
        A(0, 2) += x;
        A(1, 1) += y * y;
        A(1, 2) += y;
        A(2, 2) += 1.0;
        rhs(0) += x * z;
        rhs(1) += y * z;
        rhs(2) += z;
    }
    A(1, 0) = A(0, 1);
    A(2, 0) = A(0, 2);
    A(2, 1) = A(1, 2);

    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible()) throw InputError("fit_circle: degenerate (collinear) boundary");
    const Eigen::Vector3d sol = lu.solve(rhs);

    const double cx = sol(0) / 2.0;
    const double cy = sol(1) / 2.0;
    const double r2 = sol(2) + cx * cx + cy * cy;
    if (!(r2 > 0.0)) throw InputError("fit_circle: degenerate boundary, non-positive radius");

    CircleFit fit;
    fit.cx = cx + mx;
    fit.cy = cy + my;
    fit.r = std::sqrt(r2);

    double ss = 0.0;
    for (const auto& p : pts) {
        const double d = std::hypot(p.x - fit.cx, p.y - fit.cy) - fit.r;
        ss += d * d;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(pts.size()));
    return fit;
}

CircleFit fit_circle(const LabeledRegions& lr, int label) {
    const Region& reg = lr.regions.at(label - 1);
    if (reg.area < 5) throw InputError("fit_circle: region area must be >= 5");
    return fit_circle_points(region_boundary(lr, label));
}

// ---------------------------------------------------------------------------
// Disc helpers
// ---------------------------------------------------------------------------

namespace {

template <typename Img, typename V>
void draw_disc_impl(Img& img, double cx, double cy, double r, V value) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + r)));
    const double r2 = r * r;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r2) img.at(x, y) = value;
}

}  // namespace

void draw_disc(GrayImage& img, double cx, double cy, double r, std::uint8_t value) {
    draw_disc_impl(img, cx, cy, r, value);
}

void draw_disc(BinaryMask& mask, double cx, double cy, double r, std::uint8_t value) {
    draw_disc_impl(mask, cx, cy, r, static_cast<std::uint8_t>(value ? 1 : 0));
}

BinaryMask disc_mask(int width, int height, double cx, double cy, double r) {
    BinaryMask m(width, height);
    draw_disc(m, cx, cy, r, 1);
    return m;
}

}  // namespace voidseg
