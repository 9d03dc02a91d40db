#pragma once

#include "nildyn/proximality/density.hpp"
#include "nildyn/proximality/witness.hpp"
#include "nildyn/systems/system.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

namespace nildyn {

/// Point [x, s] of the unit-ceiling suspension.
struct SuspensionPoint {
    Point base;
    double height = 0.0;

    friend bool operator==(const SuspensionPoint&, const SuspensionPoint&) = default;
};

inline Point to_point(const SuspensionPoint& p) {
    Point out = p.base;
    out.push_back(p.height);
    return out;
}

inline SuspensionPoint to_suspension_point(const Point& p) {
    if (p.size() < 2) throw DimensionMismatch("suspension point needs base coordinates and a height");
    return {Point(p.begin(), p.end() - 1), p.back()};
}

namespace detail {

inline const SystemHandle& require_suspension(const SystemHandle& sys) {
    if (sys.kind() != SystemKind::Suspension) throw std::invalid_argument("expected a suspension system");
    return sys.base();
}

inline constexpr double kIntegralGapTol = 1e-12;

} // namespace detail

/// [T^{floor s} x, s - floor s].
inline SuspensionPoint susp_canonical(const SystemHandle& susp, const Point& x, double s) {
    const auto& base = detail::require_suspension(susp);
    if (!std::isfinite(s)) throw std::invalid_argument("susp_canonical: height must be finite");
    return to_suspension_point(susp.suspension_canonical(base.canonical(x), s));
}

/// (x, s) ~ (y, t): s - t is an integer n (within 1e-12) and T^n x = y (within 1e-10).
inline bool susp_equivalent(const SystemHandle& susp, const SuspensionPoint& p, const SuspensionPoint& q) {
    const auto& base = detail::require_suspension(susp);
    double gap = p.height - q.height;
    double n = std::round(gap);
    if (std::fabs(gap - n) > detail::kIntegralGapTol) return false;
    return base.dist(base.step(base.canonical(p.base), static_cast<std::int64_t>(n)), base.canonical(q.base)) <= 1e-10;
}

/// T^t [x, s] = [x, s + t].
inline SuspensionPoint susp_evolve(const SystemHandle& susp, const SuspensionPoint& p, double t) {
    detail::require_suspension(susp);
    return to_suspension_point(susp.evolve(to_point(p), t));
}

/// Chart metric: min over k in {-1,0,1} of max(dist(T^k p.base, q.base), |p.s - k - q.s|), symmetrized.
inline double susp_metric(const SystemHandle& susp, const SuspensionPoint& p, const SuspensionPoint& q) {
    detail::require_suspension(susp);
    return susp.dist(to_point(p), to_point(q));
}

struct TransferReport {
    bool forward = false;
    bool backward = false;
    bool height_gap_integral = false;
    bool backward_attempted = false;
    std::int64_t height_gap = 0; // s1 - s2 when integral
    SearchOutcome forward_outcome;
    std::optional<SearchOutcome> backward_outcome;

    /// forward agrees with "gap integral and backward".
    bool agree() const { return forward == (height_gap_integral && backward); }
};

/// Compares a witness search for ([x1,s1],[x2,s2]) in the suspension with one
/// for (T^{s1-s2} x1, x2) in the base, when the height gap is integral.
inline TransferReport susp_rp_transfer_check(const SystemHandle& base, const Point& x1, const Point& x2, double s1,
                                             double s2, int d, double delta, std::uint64_t budget,
                                             const SearchOptions& opt = {}) {
    auto susp = SystemHandle::suspension(base);
    TransferReport r;
    double gap = s1 - s2;
    double n = std::round(gap);
    r.height_gap_integral = std::fabs(gap - n) <= detail::kIntegralGapTol;

    auto p1 = to_point(susp_canonical(susp, x1, s1));
    auto p2 = to_point(susp_canonical(susp, x2, s2));
    r.forward_outcome = rp_witness_search(susp, p1, p2, d, delta, budget, opt);
    r.forward = r.forward_outcome.status == SearchStatus::Found;

    if (r.height_gap_integral) {
        r.backward_attempted = true;
        r.height_gap = static_cast<std::int64_t>(n);
        Point shifted = base.step(base.canonical(x1), r.height_gap);
        r.backward_outcome = rp_witness_search(base, shifted, base.canonical(x2), d, delta, budget, opt);
        r.backward = r.backward_outcome->status == SearchStatus::Found;
    }
    return r;
}

/// Fill fraction of the base space by {T^{floor t} x : t in times}.
inline Coverage integer_part_orbit(const SystemHandle& base, const Point& x, std::span<const double> times,
                                   double resolution) {
    if (base.is_flow()) throw std::invalid_argument("integer_part_orbit expects a discrete base system");
    CellCounter cells(base.point_dim(), resolution);
    Point p = base.canonical(x);
    for (double t : times) {
        if (!std::isfinite(t)) throw std::invalid_argument("integer_part_orbit: times must be finite");
        cells.add(base.step(p, static_cast<std::int64_t>(std::floor(t))));
    }
    return cells.result(times.size());
}

} // namespace nildyn
