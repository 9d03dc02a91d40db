#pragma once

#include "nildyn/systems/heisenberg.hpp"
#include "nildyn/systems/torus.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace nildyn {

enum class SystemKind { TorusFlow, TorusMap, HeisenbergNilflow, HeisenbergNilsystem, Suspension };

inline std::string_view to_string(SystemKind k) {
    switch (k) {
    case SystemKind::TorusFlow: return "torus-flow";
    case SystemKind::TorusMap: return "torus-map";
    case SystemKind::HeisenbergNilflow: return "heisenberg-nilflow";
    case SystemKind::HeisenbergNilsystem: return "heisenberg-nilsystem";
    case SystemKind::Suspension: return "suspension";
    }
    return "unknown";
}

class SystemHandle;

/// Unit-ceiling suspension of a discrete base system.
struct SuspensionSpec {
    std::shared_ptr<const SystemHandle> base;
};

/// One supported dynamical system together with its metric.
///
/// Points are flat coordinate vectors: T^n uses n circle coordinates, the
/// Heisenberg nilmanifold uses canonical Malcev coordinates (x, y, z), and a
/// suspension appends the height in [0,1) to the base coordinates. Acting
/// group elements are reals for flows and integers (stored as doubles) for
/// maps.
class SystemHandle {
public:
    static SystemHandle torus_flow(TorusFlowSpec spec) { return SystemHandle(SystemKind::TorusFlow, std::move(spec)); }
    static SystemHandle torus_map(TorusFlowSpec spec) { return SystemHandle(SystemKind::TorusMap, std::move(spec)); }
    static SystemHandle nilflow(NilflowSpec spec) { return SystemHandle(SystemKind::HeisenbergNilflow, std::move(spec)); }
    static SystemHandle nilsystem(NilflowSpec spec) {
        return SystemHandle(SystemKind::HeisenbergNilsystem, std::move(spec));
    }
    static SystemHandle suspension(SystemHandle base) {
        if (base.is_flow()) throw std::invalid_argument("suspension base must be a discrete system");
        return SystemHandle(SystemKind::Suspension, SuspensionSpec{std::make_shared<const SystemHandle>(std::move(base))});
    }

    SystemKind kind() const noexcept { return kind_; }
    std::string_view tag() const noexcept { return to_string(kind_); }

    bool is_flow() const noexcept {
        return kind_ == SystemKind::TorusFlow || kind_ == SystemKind::HeisenbergNilflow || kind_ == SystemKind::Suspension;
    }
    bool is_torus() const noexcept { return kind_ == SystemKind::TorusFlow || kind_ == SystemKind::TorusMap; }
    bool is_heisenberg() const noexcept {
        return kind_ == SystemKind::HeisenbergNilflow || kind_ == SystemKind::HeisenbergNilsystem;
    }
    /// Every time map is an isometry of the metric (rotations and linear torus flows).
    bool is_isometry() const noexcept { return is_torus(); }

    std::size_t point_dim() const {
        switch (kind_) {
        case SystemKind::TorusFlow:
        case SystemKind::TorusMap: return torus().dim();
        case SystemKind::HeisenbergNilflow:
        case SystemKind::HeisenbergNilsystem: return 3;
        case SystemKind::Suspension: return base().point_dim() + 1;
        }
        return 0;
    }

    const TorusFlowSpec& torus() const { return std::get<TorusFlowSpec>(payload_); }
    const NilflowSpec& nil() const { return std::get<NilflowSpec>(payload_); }
    const SystemHandle& base() const { return *std::get<SuspensionSpec>(payload_).base; }

    Point canonical(const Point& p) const {
        check_dim(p);
        switch (kind_) {
        case SystemKind::TorusFlow:
        case SystemKind::TorusMap: return torus_canonical(p);
        case SystemKind::HeisenbergNilflow:
        case SystemKind::HeisenbergNilsystem: return to_point(heis_reduce(to_heisenberg(p)).canonical);
        case SystemKind::Suspension: {
            Point b(p.begin(), p.end() - 1);
            return suspension_canonical(base().canonical(b), p.back());
        }
        }
        return p;
    }

    /// Integer power T^n of a discrete system.
    Point step(const Point& p, std::int64_t n) const {
        switch (kind_) {
        case SystemKind::TorusMap: return torus_evolve(torus(), p, static_cast<double>(n));
        case SystemKind::HeisenbergNilsystem: return to_point(nil_evolve(nil(), to_heisenberg(p), static_cast<double>(n)));
        default: throw std::invalid_argument(std::string("step() needs a discrete system, got ") + std::string(tag()));
        }
    }

    /// Action of the group element t (a real time for flows, an integer for maps).
    Point evolve(const Point& p, double t) const {
        check_dim(p);
        switch (kind_) {
        case SystemKind::TorusFlow: return torus_evolve(torus(), p, t);
        case SystemKind::HeisenbergNilflow: return to_point(nil_evolve(nil(), to_heisenberg(p), t));
        case SystemKind::TorusMap:
        case SystemKind::HeisenbergNilsystem: return step(p, integral(t));
        case SystemKind::Suspension: {
            Point b(p.begin(), p.end() - 1);
            return suspension_canonical(b, p.back() + t);
        }
        }
        return p;
    }

    double dist(const Point& p, const Point& q) const {
        check_dim(p);
        check_dim(q);
        switch (kind_) {
        case SystemKind::TorusFlow:
        case SystemKind::TorusMap: return torus_dist(p, q);
        case SystemKind::HeisenbergNilflow:
        case SystemKind::HeisenbergNilsystem: return heis_dist(to_heisenberg(p), to_heisenberg(q));
        case SystemKind::Suspension: return std::min(suspension_one_way(p, q), suspension_one_way(q, p));
        }
        return 0.0;
    }

    /// [x, s] -> [T^{floor s} x, s - floor s].
    Point suspension_canonical(const Point& base_point, double s) const {
        double fl = std::floor(s);
        Point out = base().step(base_point, static_cast<std::int64_t>(fl));
        out.push_back(clamp_unit(s - fl));
        return out;
    }

    friend bool operator==(const SystemHandle& a, const SystemHandle& b) {
        if (a.kind_ != b.kind_) return false;
        switch (a.kind_) {
        case SystemKind::TorusFlow:
        case SystemKind::TorusMap: return a.torus().rates == b.torus().rates;
        case SystemKind::HeisenbergNilflow:
        case SystemKind::HeisenbergNilsystem: return a.nil().generator == b.nil().generator;
        case SystemKind::Suspension: return a.base() == b.base();
        }
        return false;
    }

private:
    using Payload = std::variant<TorusFlowSpec, NilflowSpec, SuspensionSpec>;

    SystemHandle(SystemKind kind, Payload payload) : kind_(kind), payload_(std::move(payload)) {
        if (kind_ == SystemKind::HeisenbergNilflow || kind_ == SystemKind::HeisenbergNilsystem) {
            const auto& g = nil().generator;
            if (!std::isfinite(g.x) || !std::isfinite(g.y) || !std::isfinite(g.z))
                throw std::invalid_argument("nilflow generator must have finite coordinates");
        }
    }

    static std::int64_t integral(double t) {
        if (std::floor(t) != t) throw std::invalid_argument("discrete system acted on by non-integer time");
        return static_cast<std::int64_t>(t);
    }

    void check_dim(const Point& p) const {
        if (p.size() != point_dim())
            throw DimensionMismatch(std::string(tag()) + ": point has dimension " + std::to_string(p.size()) +
                                    ", expected " + std::to_string(point_dim()));
    }

    // Charts k in {-1,0,1}: [x, s] = [T^k x, s - k].
    double suspension_one_way(const Point& p, const Point& q) const {
        Point pb(p.begin(), p.end() - 1);
        Point qb(q.begin(), q.end() - 1);
        double best = std::numeric_limits<double>::infinity();
        for (int k = -1; k <= 1; ++k) {
            double dh = std::fabs(p.back() - k - q.back());
            if (dh >= best) continue;
            double db = base().dist(base().step(pb, k), qb);
            best = std::min(best, std::max(db, dh));
        }
        return best;
    }

    SystemKind kind_;
    Payload payload_;
};

} // namespace nildyn
