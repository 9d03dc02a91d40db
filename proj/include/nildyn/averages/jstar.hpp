#pragma once

#include "nildyn/algebra/binomial.hpp"
#include "nildyn/averages/multi_average.hpp"
#include "nildyn/systems/heisenberg.hpp"

#include <optional>
#include <vector>

namespace nildyn {

inline bool is_central(const HeisenbergElement& g) { return g.x == 0.0 && g.y == 0.0; }

/// j*(g_1, g_2) = (g_1^{C(a_j,1)} g_2^{C(a_j,2)})_j for k <= 2, g_2 central.
inline std::vector<HeisenbergElement> jstar_embed(const std::vector<HeisenbergElement>& g,
                                                  const std::vector<double>& alphas) {
    require_valid_alphas(alphas);
    if (g.empty() || g.size() > 2) throw std::invalid_argument("jstar_embed supports k = 1 or 2");
    if (g.size() != alphas.size()) throw DimensionMismatch("jstar_embed needs one alpha per element");
    if (g.size() == 2 && !is_central(g[1])) throw std::invalid_argument("jstar_embed: g_2 must be central");
    std::vector<HeisenbergElement> out;
    for (double a : alphas) {
        HeisenbergElement h = heis_power(g[0], binom_real(a, 1));
        if (g.size() == 2) h = heis_multiply(h, heis_power(g[1], binom_real(a, 2)));
        out.push_back(h);
    }
    return out;
}

struct MembershipResult {
    bool member = false;
    std::optional<std::vector<HeisenbergElement>> preimage;
    double residual = 0.0;
};

/// Decides whether (h_1, h_2) lies in the range of j* by elimination: the
/// base coordinates give g_1's (x, y) by least squares over a_j, then the
/// central coordinates h_j.z = a_j z_1 + C(a_j,2) w with w = x_1 y_1 + z_2 form
/// a 2x2 system. Membership is decided by re-embedding the solution.
inline MembershipResult gtilde_star_membership(const std::vector<HeisenbergElement>& tuple,
                                               const std::vector<double>& alphas, double tol) {
    require_valid_alphas(alphas);
    if (tuple.size() != 2 || alphas.size() != 2) throw std::invalid_argument("gtilde_star_membership needs k = 2");
    double a1 = binom_real(alphas[0], 1), a2 = binom_real(alphas[1], 1);
    double b1 = binom_real(alphas[0], 2), b2 = binom_real(alphas[1], 2);

    double norm = a1 * a1 + a2 * a2;
    double x1 = (a1 * tuple[0].x + a2 * tuple[1].x) / norm;
    double y1 = (a1 * tuple[0].y + a2 * tuple[1].y) / norm;

    double det = a1 * b2 - a2 * b1;
    if (det == 0.0) throw InvariantBreach("gtilde_star_membership: singular central system");
    double z1 = (tuple[0].z * b2 - tuple[1].z * b1) / det;
    double w = (a1 * tuple[1].z - a2 * tuple[0].z) / det;

    std::vector<HeisenbergElement> pre{{x1, y1, z1}, {0.0, 0.0, w - x1 * y1}};
    auto back = jstar_embed(pre, alphas);
    MembershipResult out;
    for (std::size_t j = 0; j < 2; ++j) out.residual = std::max(out.residual, heis_coordinate_gap(back[j], tuple[j]));
    out.member = out.residual <= tol;
    if (out.member) out.preimage = std::move(pre);
    return out;
}

/// Conjugates every component of a member tuple by g and re-runs membership.
inline bool gtilde_star_conjugation_check(const HeisenbergElement& g, const std::vector<HeisenbergElement>& tuple,
                                          const std::vector<double>& alphas, double tol) {
    if (!gtilde_star_membership(tuple, alphas, tol).member)
        throw std::invalid_argument("gtilde_star_conjugation_check: tuple is not in the range of j*");
    std::vector<HeisenbergElement> conj;
    for (const auto& h : tuple) conj.push_back(heis_conjugate(g, h));
    return gtilde_star_membership(conj, alphas, tol).member;
}

} // namespace nildyn
