#include "wavesum/density.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace wavesum::density {

int slice_index(double r) {
    if (!(r >= 1)) throw InvalidArgument("radius must be >= 1");
    int k = static_cast<int>(std::floor(std::log2(r)));
    while (std::ldexp(1.0, k) > r) --k;
    while (std::ldexp(1.0, k + 1) <= r) ++k;
    return k;
}

namespace {
constexpr double kSepSlack = 1e-9;
}

void validate(const Configuration& cfg) {
    check_space(cfg.space, 2, 4);
    const auto& pts = cfg.points;
    std::map<Vec4, std::size_t> ys;
    std::map<double, std::size_t> rs;
    std::set<std::pair<Vec4, double>> seen;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].r >= 1)) throw SeparationError("radius below 1 at point " + std::to_string(i), i, i);
        for (int c = cfg.space.d; c < 4; ++c)
            if (pts[i].y[c] != 0) throw InvalidArgument("point " + std::to_string(i) + " has coordinates beyond d");
        if (!seen.insert({pts[i].y, pts[i].r}).second)
            throw SeparationError("duplicate point " + std::to_string(i), i, i);
        ys.emplace(pts[i].y, i);
        rs.emplace(pts[i].r, i);
    }
    std::vector<std::pair<Vec4, std::size_t>> yv(ys.begin(), ys.end());
    for (std::size_t a = 0; a < yv.size(); ++a)
        for (std::size_t b = a + 1; b < yv.size(); ++b)
            if (dist(yv[a].first, yv[b].first) < 1.0 - kSepSlack)
                throw SeparationError("centers closer than 1: points " + std::to_string(yv[a].second) + " and " +
                                          std::to_string(yv[b].second),
                                      yv[a].second, yv[b].second);
    std::vector<std::pair<double, std::size_t>> rv(rs.begin(), rs.end());
    for (std::size_t a = 0; a + 1 < rv.size(); ++a)
        if (rv[a + 1].first - rv[a].first < 1.0 - kSepSlack)
            throw SeparationError("radii closer than 1: points " + std::to_string(rv[a].second) + " and " +
                                      std::to_string(rv[a + 1].second),
                                  rv[a].second, rv[a + 1].second);
    if (cfg.is_product && seen.size() != ys.size() * rs.size())
        throw InvalidArgument("configuration flagged as product but is not Y x R");
}

std::map<int, Ids> validate_and_slice(const Configuration& cfg) {
    validate(cfg);
    std::map<int, Ids> out;
    for (std::size_t i = 0; i < cfg.points.size(); ++i) out[slice_index(cfg.points[i].r)].push_back(i);
    return out;
}

// ---------------------------------------------------------------- density

int DensityDecomposition::max_nu() const { return nu.empty() ? -1 : *std::max_element(nu.begin(), nu.end()); }

Ids DensityDecomposition::hat(int v) const {
    Ids out;
    for (std::size_t i = 0; i < slice.size(); ++i)
        if (nu[i] >= v) out.push_back(slice[i]);
    return out;
}

Ids DensityDecomposition::cls(int v) const {
    Ids out;
    for (std::size_t i = 0; i < slice.size(); ++i)
        if (nu[i] == v) out.push_back(slice[i]);
    return out;
}

namespace {

int class_of(int count, double radius) {
    if (count < radius) return -1;
    int v = static_cast<int>(std::floor(std::log2(count / radius)));
    while (v > 0 && count < std::ldexp(radius, v)) --v;
    while (count >= std::ldexp(radius, v + 1)) ++v;
    return v;
}

struct Best {
    int nu = -1;
    BallWitness w;
};

// Scores every candidate ball around `center` and raises the class of the points it contains.
void score_center(const std::vector<Vec5>& pts, const Vec5& center, double rmax, std::vector<Best>& best,
                  std::vector<std::pair<double, std::size_t>>& buf) {
    const std::size_t n = pts.size();
    buf.clear();
    for (std::size_t i = 0; i < n; ++i) buf.emplace_back(dist(pts[i], center), i);
    std::sort(buf.begin(), buf.end());
    auto count_within = [&](double rho) {
        return static_cast<int>(std::upper_bound(buf.begin(), buf.end(), std::make_pair(rho, n)) - buf.begin());
    };
    // best (class, radius) among candidates with count exactly c
    std::vector<int> cnu(n + 1, -1);
    std::vector<double> crad(n + 1, 0);
    auto consider = [&](double rho) {
        int c = count_within(rho);
        if (c == 0) return;
        int v = class_of(c, rho);
        if (v > cnu[c] || (v == cnu[c] && rho < crad[c])) {
            cnu[c] = v;
            crad[c] = rho;
        }
    };
    consider(1.0);
    consider(rmax);
    for (const auto& [dd, idx] : buf)
        if (dd >= 1.0 && dd <= rmax) consider(dd);
    int snu = -1;
    double srad = 0;
    int scount = 0;
    for (std::size_t c = n; c >= 1; --c) {
        if (cnu[c] > snu) {
            snu = cnu[c];
            srad = crad[c];
            scount = static_cast<int>(c);
        }
        std::size_t idx = buf[c - 1].second;
        if (snu > best[idx].nu) {
            best[idx].nu = snu;
            best[idx].w = {center, srad, scount};
        }
    }
}

}  // namespace

DensityDecomposition decompose_points(const std::vector<Vec5>& pts, int k, WitnessMode mode) {
    const double rmax = std::ldexp(1.0, k);
    std::vector<Best> best(pts.size());
    std::vector<std::pair<double, std::size_t>> buf;
    for (const auto& c : pts) score_center(pts, c, rmax, best, buf);
    if (mode == WitnessMode::exact) {
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                Vec5 mid;
                for (int i = 0; i < 5; ++i) mid[i] = 0.5 * (pts[a][i] + pts[b][i]);
                score_center(pts, mid, rmax, best, buf);
            }
    }
    DensityDecomposition dd;
    dd.k = k;
    dd.slice.resize(pts.size());
    std::iota(dd.slice.begin(), dd.slice.end(), 0);
    for (const auto& b : best) {
        dd.nu.push_back(b.nu);
        dd.witness.push_back(b.w);
    }
    return dd;
}

DensityDecomposition decompose_density(const Configuration& cfg, const Ids& slice, int k, WitnessMode mode) {
    if (slice.empty()) throw InvalidArgument("decompose_density: empty slice");
    std::vector<Vec5> pts;
    for (auto i : slice) pts.push_back(lift(cfg.points[i]));
    DensityDecomposition dd = decompose_points(pts, k, mode);
    dd.slice = slice;
    return dd;
}

// ---------------------------------------------------------------- projections and cubes

ProductExtension project_and_extend(const Configuration& cfg, const Ids& ids) {
    ProductExtension pe;
    std::map<Vec4, std::size_t> ym;
    std::map<double, std::size_t> rm;
    for (auto i : ids) {
        ym.emplace(cfg.points[i].y, 0);
        rm.emplace(cfg.points[i].r, 0);
    }
    for (auto& [y, idx] : ym) {
        idx = pe.ys.size();
        pe.ys.push_back(y);
    }
    for (auto& [r, idx] : rm) {
        idx = pe.rs.size();
        pe.rs.push_back(r);
    }
    for (std::size_t a = 0; a < pe.ys.size(); ++a)
        for (std::size_t b = 0; b < pe.rs.size(); ++b) pe.product.emplace_back(a, b);
    return pe;
}

ProjectionCounts projection_counts(const Configuration& cfg, const Ids& ids) {
    std::set<Vec4> ys;
    std::set<double> rs;
    for (auto i : ids) {
        ys.insert(cfg.points[i].y);
        rs.insert(cfg.points[i].r);
    }
    return {ys.size(), rs.size()};
}

bool in_box(const Vec5& p, const Vec5& lo, const Vec5& hi) {
    for (int i = 0; i < 5; ++i)
        if (p[i] < lo[i] || p[i] >= hi[i]) return false;
    return true;
}

CubeCover cube_cover(const Configuration& cfg, const Ids& S, int m, const Ids& ambient) {
    CubeCover cc;
    cc.m = m;
    cc.side = std::ldexp(1.0, m + 5);
    std::map<std::array<long long, 5>, std::size_t> where;
    for (auto i : S) {
        Vec5 p = lift(cfg.points[i]);
        std::array<long long, 5> key;
        for (int c = 0; c < 5; ++c) key[c] = static_cast<long long>(std::floor(p[c] / cc.side));
        auto it = where.find(key);
        if (it == where.end()) {
            it = where.emplace(key, cc.cubes.size()).first;
            Cube q;
            q.index = key;
            for (int c = 0; c < 5; ++c) {
                q.lo[c] = key[c] * cc.side;
                double mid = q.lo[c] + 0.5 * cc.side;
                q.star_lo[c] = mid - 16.0 * cc.side;
                q.star_hi[c] = mid + 16.0 * cc.side;
            }
            cc.cubes.push_back(q);
        }
        cc.cubes[it->second].members.push_back(i);
    }
    const Ids& amb = ambient.empty() ? S : ambient;
    for (auto& q : cc.cubes) {
        for (auto i : amb)
            if (in_box(lift(cfg.points[i]), q.star_lo, q.star_hi)) q.star_members.push_back(i);
        q.counts = projection_counts(cfg, q.star_members);
    }
    return cc;
}

// ---------------------------------------------------------------- tensor structure

namespace {
bool in_window(double v, double lo_exp, double hi_exp) {
    double a = std::abs(v);
    return a >= std::exp2(lo_exp) && a <= std::exp2(hi_exp);
}
}  // namespace

Configuration TensorLevelStructure::as_configuration(const std::vector<std::pair<std::size_t, std::size_t>>& set,
                                                     int d) const {
    Configuration c;
    c.space = {d};
    for (auto [iy, ir] : set) c.points.push_back({ys[iy], rs[ir], cplx(gamma(iy, ir), 0.0)});
    return c;
}

std::size_t level_count(const TensorLevelStructure& t, int l) {
    std::size_t n = 0;
    const double lo = std::ldexp(1.0, l), hi = std::ldexp(1.0, l + 1);
    for (std::size_t a = 0; a < t.ys.size(); ++a)
        for (std::size_t b = 0; b < t.rs.size(); ++b) {
            double g = std::abs(t.gamma(a, b));
            if (g >= lo && g < hi) ++n;
        }
    return n;
}

TensorLevelStructure tensor_levels(const Configuration& cfg, const Gamma1& gamma1, const Gamma2& gamma2, int j,
                                   int k) {
    TensorLevelStructure t;
    t.j = j;
    t.k = k;
    Ids all(cfg.points.size());
    std::iota(all.begin(), all.end(), 0);
    ProductExtension pe = project_and_extend(cfg, all);
    t.ys = pe.ys;
    for (double r : pe.rs)
        if (slice_index(r) == k) t.rs.push_back(r);
    for (const auto& y : t.ys) t.g1.push_back(gamma1(y));
    for (double r : t.rs) t.g2.push_back(gamma2(r));
    if (std::any_of(t.g1.begin(), t.g1.end(), [](double v) { return v == 0.0; }) ||
        std::any_of(t.g2.begin(), t.g2.end(), [](double v) { return v == 0.0; }))
        t.flags.push_back("degenerate-gamma");

    const double lo = std::ldexp(1.0, j), hi = std::ldexp(1.0, j + 1);
    std::set<int> bs;
    for (std::size_t a = 0; a < t.ys.size(); ++a)
        for (std::size_t b = 0; b < t.rs.size(); ++b) {
            double g = std::abs(t.gamma(a, b));
            if (g >= lo && g < hi) {
                t.level.emplace_back(a, b);
                bs.insert(static_cast<int>(std::floor(std::log2(std::abs(t.g1[a])))));
            }
            if (g >= std::ldexp(1.0, j - 5) && g <= std::ldexp(1.0, j + 5)) t.widened.emplace_back(a, b);
        }
    const int h = t.block_halfwindow;
    for (int b : bs) {
        Block blk;
        blk.b = b;
        for (std::size_t a = 0; a < t.ys.size(); ++a)
            if (in_window(t.g1[a], b - h, b + h)) blk.y_idx.push_back(a);
        for (std::size_t c = 0; c < t.rs.size(); ++c)
            if (in_window(t.g2[c], j - b - h, j - b + h)) blk.r_idx.push_back(c);
        t.blocks.push_back(blk);
    }
    return t;
}

std::vector<GroupAssignment> tensor_groups(const TensorLevelStructure& t, int m) {
    Configuration lv = t.as_configuration(t.level, 4);
    Ids all(lv.points.size());
    std::iota(all.begin(), all.end(), 0);
    CubeCover cc = cube_cover(lv, all, m);
    std::vector<GroupAssignment> out;
    for (std::size_t qi = 0; qi < cc.cubes.size(); ++qi) {
        const Cube& q = cc.cubes[qi];
        for (const auto& blk : t.blocks) {
            std::size_t ny = 0, nr = 0;
            for (auto a : blk.y_idx) {
                const Vec4& y = t.ys[a];
                bool in = true;
                for (int c = 0; c < 4; ++c) in = in && y[c] >= q.star_lo[c] && y[c] < q.star_hi[c];
                ny += in;
            }
            for (auto c : blk.r_idx) nr += t.rs[c] >= q.star_lo[4] && t.rs[c] < q.star_hi[4];
            std::size_t count = ny * nr;
            if (count == 0) continue;
            GroupAssignment g;
            g.cube = qi;
            g.b = blk.b;
            g.count = count;
            g.counts = {ny, nr};
            g.card_class = static_cast<int>(std::floor(std::log2(double(count)))) + 1;
            g.ratio_class = static_cast<int>(std::floor(std::log2(double(ny) / double(nr)))) + 1;
            out.push_back(g);
        }
    }
    return out;
}

std::vector<MuCell> mu_split(const Configuration& cfg, const Ids& slice, int k, double u, double a_exp) {
    if (!(u >= 1)) throw InvalidArgument("mu_split: u must be >= 1");
    if (!(a_exp > 0 && a_exp <= 1)) throw InvalidArgument("mu_split: a_exp must lie in (0, 1]");
    const double len = std::exp2(a_exp * std::log2(u));
    const double base = std::ldexp(1.0, k), top = 2 * base;
    const long long cells = std::max(1LL, static_cast<long long>(std::ceil(base / len - 1e-12)));
    std::vector<MuCell> out;
    for (long long mu = 1; mu <= cells; ++mu) {
        double lo = base + (mu - 1) * len;
        double hi = mu == cells ? top : base + mu * len;
        out.push_back({lo, hi, {}});
    }
    for (auto i : slice) {
        double r = cfg.points[i].r;
        if (r < base || r >= top) continue;
        long long mu = static_cast<long long>(std::floor((r - base) / len));
        mu = std::clamp(mu, 0LL, cells - 1);
        while (mu > 0 && r < out[mu].lo) --mu;
        while (mu + 1 < cells && r >= out[mu].hi) ++mu;
        out[mu].members.push_back(i);
    }
    return out;
}

}  // namespace wavesum::density
