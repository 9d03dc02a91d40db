#pragma once

#include "nildyn/errors.hpp"
#include "nildyn/random.hpp"
#include "nildyn/systems/system.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nildyn {

/// Finite-resolution certificate for (x, y) in RP^[d]: nearby points x', y'
/// and a d-tuple g whose nonzero face sums bring x', y' within delta.
struct RPWitness {
    Point x_prime;
    Point y_prime;
    std::vector<double> g;
    double delta = 0.0;    // scale the witness verifies at
    double achieved = 0.0; // largest of the 2^d + 1 distances
};

enum class SearchStatus { Found, Exhausted, ProvenAbsent };

inline std::string_view to_string(SearchStatus s) {
    switch (s) {
    case SearchStatus::Found: return "FOUND";
    case SearchStatus::Exhausted: return "EXHAUSTED";
    case SearchStatus::ProvenAbsent: return "PROVEN-ABSENT";
    }
    return "UNKNOWN";
}

struct SearchStats {
    std::uint64_t evaluations = 0; // (g, x', y') candidates checked
    std::uint64_t g_tuples = 0;
    std::uint64_t refined_tuples = 0;
    std::uint64_t max_shell = 0;
    double best_gap = std::numeric_limits<double>::infinity();
};

struct SearchOptions {
    double dt = 0.1;                     // coarse time step for flows
    int refine = 10;                     // fine step is dt / refine
    double near_miss = 2.0;              // refine around tuples whose best gap < near_miss * delta
    std::vector<double> radii{0.3, 0.6}; // perturbation radii, as fractions of the ball scale
    std::uint64_t level_cap = 200000;    // per-level candidate cap in the nested transfer
};

struct SearchOutcome {
    SearchStatus status = SearchStatus::Exhausted;
    std::optional<RPWitness> witness;
    SearchStats stats;
    double certified_scale = 0.0; // ProvenAbsent: no witness exists at this scale
    std::string method;
};

/// g^(eps) for the abelian face action: sum of g_i over the set bits of mask.
inline double face_time(const std::vector<double>& g, std::uint64_t mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (mask >> i & 1U) t += g[i];
    return t;
}

/// Largest of dist(x,x'), dist(y,y') and the 2^d - 1 face distances.
inline double witness_gap(const SystemHandle& sys, const Point& x, const Point& y, const RPWitness& w) {
    if (w.g.empty() || w.g.size() > 20) throw DimensionMismatch("witness must carry 1..20 group elements");
    double gap = std::max(sys.dist(x, w.x_prime), sys.dist(y, w.y_prime));
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << w.g.size()); ++mask) {
        double t = face_time(w.g, mask);
        gap = std::max(gap, sys.dist(sys.evolve(w.x_prime, t), sys.evolve(w.y_prime, t)));
    }
    return gap;
}

/// All 2^d + 1 strict inequalities at delta.
inline bool rp_witness_verify(const SystemHandle& sys, const Point& x, const Point& y, const RPWitness& w,
                              double delta) {
    if (!(delta > 0)) throw std::invalid_argument("rp_witness_verify: delta must be positive");
    if (w.x_prime.size() != sys.point_dim() || w.y_prime.size() != sys.point_dim())
        throw DimensionMismatch("rp_witness_verify: witness points have the wrong dimension");
    if (w.g.empty() || w.g.size() > 20) throw DimensionMismatch("rp_witness_verify: witness arity must be 1..20");
    if (!(sys.dist(x, w.x_prime) < delta) || !(sys.dist(y, w.y_prime) < delta)) return false;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << w.g.size()); ++mask) {
        double t = face_time(w.g, mask);
        if (!(sys.dist(sys.evolve(w.x_prime, t), sys.evolve(w.y_prime, t)) < delta)) return false;
    }
    return true;
}

inline bool rp_witness_verify(const SystemHandle& sys, const Point& x, const Point& y, const RPWitness& w,
                              double delta, int d) {
    if (w.g.size() != static_cast<std::size_t>(d))
        throw DimensionMismatch("rp_witness_verify: witness has " + std::to_string(w.g.size()) +
                                " group elements, expected " + std::to_string(d));
    return rp_witness_verify(sys, x, y, w, delta);
}

namespace detail {

/// 0, 1, -1, 2, -2, ...
inline std::int64_t signed_index(std::uint64_t i) {
    auto h = static_cast<std::int64_t>((i + 1) / 2);
    return i % 2 == 1 ? h : -h;
}

/// Visits every tuple in {0..s}^d whose largest entry is s, in lexicographic
/// order, until visit returns false. Returns false if stopped early.
inline bool for_each_shell_tuple(std::size_t d, std::uint64_t s,
                                 const std::function<bool(const std::vector<std::uint64_t>&)>& visit) {
    std::vector<std::uint64_t> idx(d, 0);
    while (true) {
        bool on_shell = false;
        for (auto v : idx) on_shell = on_shell || v == s;
        if (on_shell && !visit(idx)) return false;
        std::size_t pos = d;
        while (pos > 0 && idx[pos - 1] == s) idx[--pos] = 0;
        if (pos == 0) return true;
        ++idx[pos - 1];
    }
}

/// Axis-star lattice around center: center itself, then center +- r*scale*e_i
/// for each radius fraction r, kept when strictly within limit of anchor.
inline std::vector<Point> perturbation_lattice(const SystemHandle& sys, const Point& center, const Point& anchor,
                                               double scale, double limit, const std::vector<double>& radii) {
    std::vector<Point> out;
    auto keep = [&](const Point& q) {
        if (!(sys.dist(anchor, q) < limit)) return;
        for (const auto& p : out)
            if (p == q) return;
        out.push_back(q);
    };
    keep(center);
    for (double r : radii)
        for (std::size_t i = 0; i < center.size(); ++i)
            for (double sign : {1.0, -1.0}) {
                Point q = center;
                q[i] += sign * r * scale;
                keep(sys.canonical(q));
            }
    return out;
}

struct FaceImages {
    std::vector<std::vector<Point>> images; // [perturbation][mask - 1]
};

inline FaceImages face_images(const SystemHandle& sys, const std::vector<Point>& pts, const std::vector<double>& g) {
    FaceImages f;
    std::uint64_t faces = (std::uint64_t{1} << g.size()) - 1;
    f.images.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        f.images[i].reserve(faces);
        for (std::uint64_t mask = 1; mask <= faces; ++mask) f.images[i].push_back(sys.evolve(pts[i], face_time(g, mask)));
    }
    return f;
}

struct PairHit {
    std::size_t i = 0, j = 0;
    double gap = 0.0;
};

/// First (x'-index, y'-index) pair whose faces all fall strictly below delta,
/// plus the smallest max-face gap seen (for near-miss refinement).
inline std::optional<PairHit> scan_pairs(const SystemHandle& sys, const FaceImages& fx, const FaceImages& fy,
                                         double delta, double& best) {
    for (std::size_t i = 0; i < fx.images.size(); ++i)
        for (std::size_t j = 0; j < fy.images.size(); ++j) {
            double gap = 0.0;
            for (std::size_t f = 0; f < fx.images[i].size() && gap < best; ++f)
                gap = std::max(gap, sys.dist(fx.images[i][f], fy.images[j][f]));
            best = std::min(best, gap);
            if (gap < delta) return PairHit{i, j, gap};
        }
    return std::nullopt;
}

/// Budget-bounded grid search over g-tuples (shell order, with near-miss
/// refinement for flows) and the given perturbation sets. The budget is
/// charged per whole g-tuple so the search is symmetric in (x, y).
inline std::optional<RPWitness> grid_search(const SystemHandle& sys, const Point& x, const Point& y,
                                            const std::vector<Point>& px, const std::vector<Point>& py, int d,
                                            double delta, std::uint64_t budget, const SearchOptions& opt,
                                            SearchStats& stats) {
    const std::uint64_t per_tuple = px.size() * py.size();
    const bool flow = sys.is_flow();
    const double step = flow ? opt.dt : 1.0;
    std::optional<RPWitness> found;
    bool out_of_budget = false;
    double last_best = std::numeric_limits<double>::infinity();

    auto try_tuple = [&](const std::vector<double>& g) {
        if (stats.evaluations + per_tuple > budget) {
            out_of_budget = true;
            return false;
        }
        stats.evaluations += per_tuple;
        auto fx = face_images(sys, px, g);
        auto fy = face_images(sys, py, g);
        double best = std::numeric_limits<double>::infinity();
        auto hit = scan_pairs(sys, fx, fy, delta, best);
        stats.best_gap = std::min(stats.best_gap, best);
        if (hit) {
            RPWitness w{px[hit->i], py[hit->j], g, delta, 0.0};
            w.achieved = witness_gap(sys, x, y, w);
            if (w.achieved < delta) {
                found = w;
                return true;
            }
        }
        last_best = best;
        return false;
    };

    for (std::uint64_t shell = 0; !found && !out_of_budget; ++shell) {
        stats.max_shell = shell;
        for_each_shell_tuple(static_cast<std::size_t>(d), shell, [&](const std::vector<std::uint64_t>& idx) {
            std::vector<double> g(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) g[i] = static_cast<double>(signed_index(idx[i])) * step;
            ++stats.g_tuples;
            if (try_tuple(g)) return false;
            if (out_of_budget) return false;
            if (!flow || !(last_best < opt.near_miss * delta) || opt.refine < 2) return true;
            const double fine = step / opt.refine;
            const auto half = static_cast<std::uint64_t>(opt.refine / 2);
            for (std::uint64_t s = 1; s <= 2 * half && !found && !out_of_budget; ++s)
                for_each_shell_tuple(static_cast<std::size_t>(d), s, [&](const std::vector<std::uint64_t>& off) {
                    std::vector<double> h = g;
                    for (std::size_t i = 0; i < off.size(); ++i) h[i] += static_cast<double>(signed_index(off[i])) * fine;
                    ++stats.refined_tuples;
                    return !try_tuple(h) && !out_of_budget;
                });
            return !found && !out_of_budget;
        });
    }
    return found;
}

} // namespace detail

/// Searches for an RP^[d] witness of (x, y) at scale delta.
///
/// Candidates are ordered lexicographically by (g-tuple, x', y'); the first
/// verified one wins. Isometric systems with dist(x, y) >= 2 delta, and
/// suspension pairs whose heights differ mod 1, return PROVEN-ABSENT: the pair
/// is certified outside RP^[d], with no witness at scale certified_scale.
inline SearchOutcome rp_witness_search(const SystemHandle& sys, const Point& x, const Point& y, int d, double delta,
                                       std::uint64_t budget, const SearchOptions& opt = {}) {
    if (!(delta > 0)) throw std::invalid_argument("rp_witness_search: delta must be positive");
    if (d < 1 || d > 20) throw std::invalid_argument("rp_witness_search: d must be in 1..20");
    SearchOutcome out;
    const double gap = sys.dist(x, y);
    if (sys.is_isometry() && gap >= 2 * delta) {
        out.status = SearchStatus::ProvenAbsent;
        out.certified_scale = gap / 3;
        out.method = "isometry";
        return out;
    }
    if (sys.kind() == SystemKind::Suspension) {
        double dh = circle_dist(x.back(), y.back());
        if (dh > 1e-12) {
            out.status = SearchStatus::ProvenAbsent;
            out.certified_scale = dh / 3;
            out.method = "height-factor";
            return out;
        }
    }
    auto px = detail::perturbation_lattice(sys, x, x, delta, delta, opt.radii);
    auto py = detail::perturbation_lattice(sys, y, y, delta, delta, opt.radii);
    out.witness = detail::grid_search(sys, x, y, px, py, d, delta, budget, opt, out.stats);
    out.status = out.witness ? SearchStatus::Found : SearchStatus::Exhausted;
    out.method = "grid";
    return out;
}

/// Checks that the two actions commute on sampled points: dist(G^s H^t p, H^t G^s p) <= tol.
inline void check_commuting(const SystemHandle& sysG, const SystemHandle& sysH, double tol = 1e-10,
                            std::uint64_t seed = 0x5eed) {
    if (sysG.point_dim() != sysH.point_dim())
        throw DimensionMismatch("commuting actions must act on the same space");
    Rng rng(derive_seed(seed, 0));
    auto sample_time = [&](const SystemHandle& s) {
        return s.is_flow() ? rng.uniform(-3.0, 3.0) : static_cast<double>(rng.uniform_int(-3, 3));
    };
    for (int i = 0; i < 16; ++i) {
        Point p(sysG.point_dim());
        for (auto& c : p) c = rng.uniform();
        p = sysG.canonical(p);
        double s = sample_time(sysG), t = sample_time(sysH);
        double gap = sysG.dist(sysG.evolve(sysH.evolve(p, t), s), sysH.evolve(sysG.evolve(p, s), t));
        if (gap > tol)
            throw CommutationViolation("actions do not commute: gap " + std::to_string(gap) + " at s=" +
                                       std::to_string(s) + ", t=" + std::to_string(t));
    }
}

/// Transfers a G-witness for (x, y) to an H-witness at delta_out.
///
/// First the nested construction: h_1, ..., h_d chosen in turn so that every
/// face h^(eps) x'' tracks g^(eps) x' (and likewise for y'') within
/// delta_out / 3, for the faces inside {1..i} containing i. When H is not
/// transitive this can fail; the remaining budget then searches H-tuples
/// directly around (x', y') at delta_out.
inline SearchOutcome commuting_rp_transfer(const SystemHandle& sysG, const SystemHandle& sysH, const Point& x,
                                           const Point& y, const RPWitness& wg, double delta_out,
                                           std::uint64_t budget, const SearchOptions& opt = {}) {
    if (!(delta_out > 0)) throw std::invalid_argument("commuting_rp_transfer: delta_out must be positive");
    check_commuting(sysG, sysH);
    SearchOutcome out;
    if (sysG == sysH) {
        out.status = SearchStatus::Found;
        out.witness = wg;
        out.method = "identity";
        return out;
    }
    const double third = delta_out / 3;
    if (!(wg.delta <= third * (1 + 1e-12)) || !rp_witness_verify(sysG, x, y, wg, wg.delta))
        throw std::invalid_argument("commuting_rp_transfer: G-witness must verify at some delta <= delta_out/3");

    const std::size_t d = wg.g.size();

    if (sysG.dist(wg.x_prime, wg.y_prime) == 0.0) {
        RPWitness w{wg.x_prime, wg.y_prime, std::vector<double>(d, 0.0), delta_out, 0.0};
        w.achieved = witness_gap(sysH, x, y, w);
        if (w.achieved < delta_out) {
            out.status = SearchStatus::Found;
            out.witness = w;
            out.method = "diagonal";
            return out;
        }
    }

    // Targets g^(eps) x', g^(eps) y'.
    auto tx = detail::face_images(sysG, {wg.x_prime}, wg.g).images[0];
    auto ty = detail::face_images(sysG, {wg.y_prime}, wg.g).images[0];
    const double hstep = sysH.is_flow() ? opt.dt / std::max(1, opt.refine) : 1.0;
    const std::uint64_t nested_budget = budget / 2;

    auto px = detail::perturbation_lattice(sysH, wg.x_prime, x, third, delta_out, opt.radii);
    auto py = detail::perturbation_lattice(sysH, wg.y_prime, y, third, delta_out, opt.radii);
    for (std::size_t a = 0; a < px.size() && out.stats.evaluations < nested_budget; ++a)
        for (std::size_t b = 0; b < py.size() && out.stats.evaluations < nested_budget; ++b) {
            std::vector<double> h(d, 0.0);
            bool ok = true;
            for (std::size_t level = 0; level < d && ok; ++level) {
                ok = false;
                for (std::uint64_t idx = 0; idx < opt.level_cap && out.stats.evaluations < nested_budget; ++idx) {
                    h[level] = static_cast<double>(detail::signed_index(idx)) * hstep;
                    ++out.stats.evaluations;
                    bool good = true;
                    for (std::uint64_t mask = std::uint64_t{1} << level; mask < (std::uint64_t{2} << level) && good;
                         ++mask) {
                        double t = face_time(h, mask);
                        good = sysH.dist(sysH.evolve(px[a], t), tx[mask - 1]) < third &&
                               sysH.dist(sysH.evolve(py[b], t), ty[mask - 1]) < third;
                    }
                    if (good) {
                        ok = true;
                        break;
                    }
                }
            }
            if (!ok) continue;
            ++out.stats.g_tuples;
            RPWitness w{px[a], py[b], h, delta_out, 0.0};
            w.achieved = witness_gap(sysH, x, y, w);
            if (w.achieved < delta_out) {
                out.status = SearchStatus::Found;
                out.witness = w;
                out.method = "nested";
                return out;
            }
        }

    const double room = delta_out - std::max(sysH.dist(x, wg.x_prime), sysH.dist(y, wg.y_prime));
    auto qx = detail::perturbation_lattice(sysH, wg.x_prime, x, room, delta_out, opt.radii);
    auto qy = detail::perturbation_lattice(sysH, wg.y_prime, y, room, delta_out, opt.radii);
    SearchStats direct;
    direct.evaluations = out.stats.evaluations;
    out.witness = detail::grid_search(sysH, x, y, qx, qy, static_cast<int>(d), delta_out, budget, opt, direct);
    direct.g_tuples += out.stats.g_tuples;
    out.stats = direct;
    out.status = out.witness ? SearchStatus::Found : SearchStatus::Exhausted;
    out.method = out.witness ? "direct" : "exhausted";
    return out;
}

} // namespace nildyn
