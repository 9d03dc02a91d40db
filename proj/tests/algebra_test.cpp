#include "nildyn/algebra/binomial.hpp"
#include "nildyn/algebra/independence.hpp"
#include "nildyn/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace nildyn;

namespace {

Rational random_rational(Rng& rng, int range = 9) {
    auto num = rng.uniform_int(-range, range);
    auto den = rng.uniform_int(1, range);
    return Rational(num) / Rational(den);
}

// Rank by fraction-free elimination over BigInt, kept separate from reduce_to_rref.
std::size_t bareiss_rank(const RationalMatrix& m) {
    std::vector<std::vector<BigInt>> a(m.rows(), std::vector<BigInt>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BigInt l = 1;
        for (std::size_t c = 0; c < m.cols(); ++c) l = boost::multiprecision::lcm(l, BigInt(denominator(m(r, c))));
        for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = BigInt(numerator(m(r, c) * Rational(l)));
    }
    std::size_t rank = 0;
    BigInt prev = 1;
    for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
        std::size_t p = rank;
        while (p < m.rows() && a[p][c] == 0) ++p;
        if (p == m.rows()) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = rank + 1; r < m.rows(); ++r) {
            for (std::size_t k = c + 1; k < m.cols(); ++k) a[r][k] = (a[r][k] * a[rank][c] - a[r][c] * a[rank][k]) / prev;
            a[r][c] = 0;
        }
        prev = a[rank][c];
        ++rank;
    }
    return rank;
}

} // namespace

TEST(SymbolicReal, NormalizesAwayZeroCoefficients) {
    auto a = SymbolicReal::parse("1 + √2");
    auto b = SymbolicReal::parse("2 - √2");
    auto s = a + b;
    EXPECT_EQ(s, SymbolicReal(3));
    EXPECT_EQ(s.coeffs().size(), 1u);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_TRUE((a - a).coeffs().empty());
}

TEST(SymbolicReal, ParseAndPrintRoundTrip) {
    for (const char* text : {"0", "3/2", "√2", "-√2", "1 + 2*√2", "1/2*√3 - 7*√6", "-5/3 + √5"}) {
        auto v = SymbolicReal::parse(text);
        EXPECT_EQ(SymbolicReal::parse(v.str()), v) << text;
    }
    EXPECT_EQ(SymbolicReal::parse("2√2"), SymbolicReal::symbol("√2", 2));
    EXPECT_THROW(SymbolicReal::parse(""), std::invalid_argument);
    EXPECT_THROW(SymbolicReal::parse("1 2"), std::invalid_argument);
}

TEST(SymbolicReal, FloatRenderingIsAdditive) {
    auto basis = Basis::square_roots({2, 3, 6});
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        SymbolicReal a = SymbolicReal(random_rational(rng)) + SymbolicReal::symbol("√2", random_rational(rng)) +
                         SymbolicReal::symbol("√6", random_rational(rng));
        SymbolicReal b = SymbolicReal::symbol("√3", random_rational(rng)) + SymbolicReal::symbol("√2", random_rational(rng));
        double lhs = basis.to_double(a + b);
        double rhs = basis.to_double(a) + basis.to_double(b);
        EXPECT_NEAR(lhs, rhs, 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(lhs)));
    }
    EXPECT_EQ(basis.to_double(SymbolicReal::symbol("√2")), 1.4142135623730951);
}

TEST(Basis, SquareRootProductsCloseWhenDeclared) {
    auto basis = Basis::square_roots({2, 3, 6});
    auto r2 = SymbolicReal::symbol("√2");
    auto r3 = SymbolicReal::symbol("√3");
    EXPECT_EQ(basis.multiply(r2, r2), SymbolicReal(2));
    EXPECT_EQ(basis.multiply(r2, r3), SymbolicReal::symbol("√6"));
    EXPECT_EQ(basis.multiply(r2, SymbolicReal::symbol("√6")), SymbolicReal::symbol("√3", 2));
    EXPECT_EQ(basis.multiply(SymbolicReal::parse("1 + √2"), SymbolicReal::parse("1 - √2")), SymbolicReal(-1));
}

TEST(Basis, MissingProductIsReportedByName) {
    auto basis = Basis::square_roots({2, 3});
    try {
        basis.multiply(SymbolicReal::symbol("√2"), SymbolicReal::symbol("√3"));
        FAIL() << "expected UnsupportedBasis";
    } catch (const UnsupportedBasis& e) {
        ASSERT_EQ(e.missing().size(), 1u);
        EXPECT_EQ(e.missing()[0], "√2·√3");
    }
}

TEST(Basis, ExplicitProductTable) {
    Basis basis;
    basis.declare("a", "0.7071067811865475244008443621048490392848359376884740");
    basis.declare_product("a", "a", SymbolicReal(Rational(1, 2)));
    auto a = SymbolicReal::symbol("a");
    EXPECT_EQ(basis.multiply(a, a), SymbolicReal(Rational(1, 2)));
    EXPECT_THROW(basis.declare("a", "1"), std::invalid_argument);
    EXPECT_THROW(basis.declare_sqrt("√4", 4), std::invalid_argument);
    EXPECT_THROW(basis.to_double(SymbolicReal::symbol("b")), MixedBasis);
}

TEST(RationalKernel, IdentityHasTrivialKernel) {
    auto m = RationalMatrix::from_rows({{1, 0}, {0, 1}});
    EXPECT_TRUE(rational_kernel(m).empty());
}

TEST(RationalKernel, RankOneMatrix) {
    auto m = RationalMatrix::from_rows({{1, 1}, {2, 2}});
    auto k = rational_kernel(m);
    ASSERT_EQ(k.size(), 1u);
    EXPECT_EQ(k[0], (RationalVector{1, -1}));
}

TEST(RationalKernel, RandomMatricesSatisfyExactNullity) {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        RationalMatrix m(4, 6);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 6; ++c) m(r, c) = random_rational(rng, 5);
        if (trial % 5 == 0)
            for (std::size_t c = 0; c < 6; ++c) m(3, c) = m(0, c) * Rational(3, 2) - m(1, c);
        auto kernel = rational_kernel(m);
        EXPECT_EQ(kernel.size(), 6 - bareiss_rank(m));
        for (const auto& v : kernel) {
            EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const Rational& q) { return q != 0; }));
            for (const auto& entry : m.multiply(v)) EXPECT_EQ(entry, 0);
        }
        auto basis_matrix = RationalMatrix(kernel.size(), 6);
        for (std::size_t i = 0; i < kernel.size(); ++i)
            for (std::size_t c = 0; c < 6; ++c) basis_matrix(i, c) = kernel[i][c];
        if (!kernel.empty()) { EXPECT_EQ(bareiss_rank(basis_matrix), kernel.size()); }
    }
}

TEST(RationalKernel, MalformedInput) {
    EXPECT_THROW(RationalMatrix::from_rows({{1, 2}, {3}}), DimensionMismatch);
    EXPECT_THROW(rational_kernel(RationalMatrix{}), DimensionMismatch);
    RationalMatrix m(2, 2);
    EXPECT_THROW(m(2, 0), std::out_of_range);
    EXPECT_THROW(m.multiply({1, 2, 3}), DimensionMismatch);
}

TEST(Independence, OneAndRootTwo) {
    EXPECT_TRUE(rationally_independent({SymbolicReal(1), SymbolicReal::symbol("√2")}).independent);
}

TEST(Independence, ExplicitRelationIsCertified) {
    std::vector<SymbolicReal> vals{SymbolicReal::parse("1 + √2"), SymbolicReal::parse("2 - √2"), SymbolicReal(3)};
    auto r = rationally_independent(vals);
    ASSERT_FALSE(r.independent);
    EXPECT_EQ(r.relation, (RationalVector{1, 1, -1}));
    EXPECT_TRUE(linear_combination(vals, r.relation).is_zero());
}

TEST(Independence, OneRootThreeRootSix) {
    auto basis = Basis::square_roots({3, 6});
    std::vector<SymbolicReal> vals{SymbolicReal(1), SymbolicReal::symbol("√3"), SymbolicReal::symbol("√6")};
    EXPECT_TRUE(rationally_independent(vals, basis).independent);
}

TEST(Independence, UndeclaredSymbolIsMixedBasis) {
    auto basis = Basis::square_roots({2});
    std::vector<SymbolicReal> vals{SymbolicReal(1), SymbolicReal::symbol("π")};
    EXPECT_THROW(rationally_independent(vals, basis), MixedBasis);
    EXPECT_THROW(rationally_independent(std::vector<SymbolicReal>{}), std::invalid_argument);
}

TEST(Independence, ZeroValueIsDependent) {
    auto r = rationally_independent({SymbolicReal(0), SymbolicReal::symbol("√2")});
    ASSERT_FALSE(r.independent);
    EXPECT_EQ(r.relation, (RationalVector{1, 0}));
}

TEST(Independence, InvariantUnderPermutationAndScaling) {
    Rng rng(3);
    const std::vector<std::string> syms{"1", "√2", "√3"};
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 4));
        std::vector<SymbolicReal> vals;
        for (std::size_t i = 0; i < n; ++i) {
            SymbolicReal v;
            for (const auto& s : syms)
                if (rng.uniform() < 0.6) v += SymbolicReal::symbol(s, random_rational(rng, 3));
            vals.push_back(v);
        }
        auto base = rationally_independent(vals);
        if (!base.independent) { EXPECT_TRUE(linear_combination(vals, base.relation).is_zero()); }

        auto permuted = vals;
        std::reverse(permuted.begin(), permuted.end());
        auto scaled = vals;
        Rational factor = random_rational(rng);
        if (factor == 0) factor = 2;
        scaled[0] *= factor;
        auto rp = rationally_independent(permuted);
        auto rs = rationally_independent(scaled);
        EXPECT_EQ(rp.independent, base.independent);
        EXPECT_EQ(rs.independent, base.independent);
        if (!rs.independent) { EXPECT_TRUE(linear_combination(scaled, rs.relation).is_zero()); }
    }
}

TEST(Binomial, HalfChooseTwo) { EXPECT_EQ(binom_real(Rational(1, 2), 2), Rational(-1, 8)); }

TEST(Binomial, EmptyProductAndIntegerCase) {
    EXPECT_EQ(binom_real(Rational(-7, 3), 0), 1);
    EXPECT_EQ(binom_real(1.2345, 0), 1.0);
    EXPECT_EQ(binom_real(Rational(3), 2), 3);
    auto basis = Basis::square_roots({2});
    auto v = binom_real(SymbolicReal::symbol("√2"), 2, basis);
    ASSERT_TRUE(std::holds_alternative<double>(v));
    EXPECT_NEAR(std::get<double>(v), std::sqrt(2.0) * (std::sqrt(2.0) - 1) / 2, 1e-15);
    auto exact = binom_real(SymbolicReal(Rational(5, 2)), 3, basis);
    ASSERT_TRUE(std::holds_alternative<Rational>(exact));
    EXPECT_EQ(std::get<Rational>(exact), Rational(5, 16));
}

TEST(Binomial, PascalRecurrenceOnRandomRationals) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Rational a = random_rational(rng, 20);
        for (unsigned n = 1; n <= 8; ++n)
            EXPECT_EQ(binom_real(a, n), binom_real(a - 1, n - 1) + binom_real(a - 1, n)) << to_string(a) << " " << n;
    }
}
