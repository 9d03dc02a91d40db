#pragma once

#include "nildyn/averages/multi_average.hpp"
#include "nildyn/averages/ud.hpp"

#include <vector>

namespace nildyn {

struct NilResidualOptions {
    MonteCarloOptions monte_carlo{};
    std::size_t grid_nodes = 0;  // 0 picks the exact node count
};

/// Sampled I_f(k,t), its predicted nilfunction part and their difference.
/// `stderr_` is empty when the samples are exact up to rounding.
struct NilResidual {
    TrigSpectrum prediction;
    TimeSeries sampled;
    TimeSeries residual;
    std::vector<double> stderr_;
    std::string method;
};

/// Predicted nilfunction part of I_f(k,.): the closed-form spectrum on a
/// torus, or on the base T^2 factor for trig observables pulled back to a
/// Heisenberg nilflow (the base flow rotates by the generator's (x, y)).
inline TrigSpectrum nilfunction_prediction(const SystemHandle& sys, const Observable& f,
                                           const std::vector<double>& alphas) {
    if (!f.is_trig()) throw std::invalid_argument("nilfunction prediction needs a trigonometric observable");
    if (sys.is_torus()) return multi_average_spectrum(sys, f, alphas);
    if (sys.kind() == SystemKind::HeisenbergNilflow) {
        const auto& g = sys.nil().generator;
        return multi_average_spectrum(SystemHandle::torus_flow(TorusFlowSpec::from_rates({g.x, g.y})), f, alphas);
    }
    throw std::invalid_argument("nilfunction prediction needs a torus or a Heisenberg nilflow");
}

/// Residual of sampled I_f(k,t) against the predicted nilfunction part. On
/// a torus the samples come from exact grid quadrature; on a Heisenberg
/// nilflow from Monte-Carlo with one fixed sample set for every t.
inline NilResidual nilfunction_residual(const SystemHandle& sys, const Observable& f, const std::vector<double>& alphas,
                                        const std::vector<double>& t_grid, const NilResidualOptions& opt = {}) {
    if (!f.is_trig()) throw std::invalid_argument("nilfunction_residual: unsupported observable kind");
    NilResidual out;
    out.prediction = nilfunction_prediction(sys, f, alphas);
    std::vector<Complex> sampled, residual;
    sampled.reserve(t_grid.size());
    if (sys.is_torus()) {
        out.method = "grid";
        std::size_t nodes = opt.grid_nodes ? opt.grid_nodes : exact_grid_nodes(f, alphas.size());
        for (double t : t_grid) sampled.push_back(multi_average_grid(sys, f, alphas, t, nodes));
    } else {
        out.method = "monte-carlo";
        if (opt.monte_carlo.samples < 2) throw std::invalid_argument("nilfunction_residual: need >= 2 samples");
        Rng rng(derive_seed(opt.monte_carlo.seed, 13));
        std::vector<Point> xs;
        xs.reserve(opt.monte_carlo.samples);
        for (std::uint64_t i = 0; i < opt.monte_carlo.samples; ++i) xs.push_back(haar_sample(sys, rng));
        for (double t : t_grid) {
            ComplexAccumulator acc;
            for (const auto& x : xs) acc.add(detail::multi_product(sys, f, alphas, t, x));
            sampled.push_back(acc.mean());
            out.stderr_.push_back(acc.stderr_of_mean());
        }
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) residual.push_back(sampled[i] - out.prediction(t_grid[i]));
    out.sampled = TimeSeries(t_grid, std::move(sampled));
    out.residual = TimeSeries(t_grid, std::move(residual));
    return out;
}

} // namespace nildyn
