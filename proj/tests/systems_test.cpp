#include "nildyn/random.hpp"
#include "nildyn/systems/minimality.hpp"
#include "nildyn/systems/orbit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace nildyn;

namespace {

HeisenbergElement random_element(Rng& rng, double range = 3.0) {
    return {rng.uniform(-range, range), rng.uniform(-range, range), rng.uniform(-range, range)};
}

double max_gap(const HeisenbergElement& a, const HeisenbergElement& b) {
    return std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)});
}

SystemHandle sqrt_flow(const std::vector<std::string>& freqs, const Basis& basis) {
    std::vector<SymbolicReal> f;
    for (const auto& s : freqs) f.push_back(SymbolicReal::parse(s));
    return SystemHandle::torus_flow(TorusFlowSpec::from_exact(f, basis));
}

} // namespace

TEST(Torus, EvolveExamples) {
    auto unit = TorusFlowSpec::from_rates({1.0});
    EXPECT_EQ(torus_evolve(unit, {0.0}, 0.25), (Point{0.25}));
    Point p{0.3, 0.7};
    auto two = TorusFlowSpec::from_rates({0.123, 4.56});
    EXPECT_EQ(torus_evolve(two, p, 0.0), p);

    auto basis = Basis::square_roots({2});
    auto r2 = TorusFlowSpec::from_exact({SymbolicReal::symbol("√2")}, basis);
    EXPECT_NEAR(torus_evolve(r2, {0.0}, 1.0)[0], 0.41421356237309504880, 1e-15);
    EXPECT_THROW(torus_evolve(r2, {0.0, 0.0}, 1.0), DimensionMismatch);
}

TEST(Torus, CanonicalFormIsIdempotentAndInUnitCube) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        Point p{rng.uniform(-50, 50), rng.uniform(-1e-17, 1e-17), -1e-18};
        auto c = torus_canonical(p);
        for (double v : c) {
            EXPECT_GE(v, 0.0);
            EXPECT_LT(v, 1.0);
        }
        EXPECT_EQ(torus_canonical(c), c);
    }
}

TEST(Torus, FlowLaw) {
    auto basis = Basis::square_roots({2, 3});
    auto sys = sqrt_flow({"√2", "√3", "1/7"}, basis);
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        Point p{rng.uniform(), rng.uniform(), rng.uniform()};
        double s = rng.uniform(-1e3, 1e3), t = rng.uniform(-1e3, 1e3);
        EXPECT_LE(sys.dist(sys.evolve(sys.evolve(p, s), t), sys.evolve(p, s + t)), 1e-10);
    }
}

TEST(Torus, TimeMapsAreIsometries) {
    auto sys = SystemHandle::torus_flow(TorusFlowSpec::from_rates({0.5, 0.25}));
    Rng rng(4);
    auto grid = [&] { return static_cast<double>(rng.uniform_int(0, 1023)) / 1024; };
    for (int i = 0; i < 2000; ++i) {
        Point p{grid(), grid()}, q{grid(), grid()};
        double t = static_cast<double>(rng.uniform_int(-64, 64)) / 8;
        EXPECT_EQ(sys.dist(sys.evolve(p, t), sys.evolve(q, t)), sys.dist(p, q));
    }
}

TEST(Heisenberg, MultiplyExamples) {
    EXPECT_EQ(heis_multiply(HeisenbergElement{1, 0, 0}, HeisenbergElement{0, 1, 0}), (HeisenbergElement{1, 1, 1}));
    EXPECT_EQ(heis_multiply(HeisenbergElement{0, 1, 0}, HeisenbergElement{1, 0, 0}), (HeisenbergElement{1, 1, 0}));
}

TEST(Heisenberg, GroupAxioms) {
    Rng rng(5);
    HeisenbergElement e{};
    for (int i = 0; i < 10000; ++i) {
        auto a = random_element(rng), b = random_element(rng), c = random_element(rng);
        EXPECT_LE(max_gap(heis_multiply(heis_multiply(a, b), c), heis_multiply(a, heis_multiply(b, c))), 1e-12);
        EXPECT_LE(max_gap(heis_multiply(a, heis_inverse(a)), e), 1e-12);
        EXPECT_LE(max_gap(heis_multiply(heis_inverse(a), a), e), 1e-12);
        EXPECT_EQ(heis_multiply(a, e), a);
    }
}

TEST(Heisenberg, PowerExamples) {
    HeisenbergElement a{1, 1, 0};
    EXPECT_EQ(heis_power(a, 2.0), heis_multiply(a, a));
    EXPECT_EQ(heis_power(a, 2.0), (HeisenbergElement{2, 2, 1}));
    EXPECT_EQ(heis_power(HeisenbergElement{0.3, -2, 7}, 0.0), (HeisenbergElement{0, 0, 0}));
    HeisenbergElement b{1, 1, 1};
    auto half = heis_power(b, 0.5);
    EXPECT_EQ(half, (HeisenbergElement{0.5, 0.5, 0.375}));
    EXPECT_LE(max_gap(heis_multiply(half, half), b), 1e-12);
}

TEST(Heisenberg, PowerLaws) {
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        auto a = random_element(rng);
        EXPECT_EQ(heis_power(a, 1.0), a);
        double s = rng.uniform(-4, 4), t = rng.uniform(-4, 4);
        EXPECT_LE(max_gap(heis_multiply(heis_power(a, s), heis_power(a, t)), heis_power(a, s + t)), 1e-12);
    }
    for (int i = 0; i < 200; ++i) {
        auto a = random_element(rng, 1.0);
        for (int n = -8; n <= 8; ++n) {
            HeisenbergElement rep{};
            auto step = n >= 0 ? a : heis_inverse(a);
            for (int j = 0; j < std::abs(n); ++j) rep = heis_multiply(rep, step);
            EXPECT_LE(max_gap(heis_power(a, static_cast<double>(n)), rep), 1e-12) << n;
        }
    }
}

TEST(Heisenberg, ConjugatePowerIdentity) {
    HeisenbergElement a{0.7, -1.3, 2.1};
    EXPECT_EQ(heis_conjugate_power_identity(a, HeisenbergElement{}, 3.7), 0.0);
    EXPECT_EQ(heis_conjugate_power_identity(a, HeisenbergElement{1.5, 0.25, -3}, 1.0), 0.0);
    Rng rng(8);
    for (int i = 0; i < 5000; ++i)
        EXPECT_LE(heis_conjugate_power_identity(random_element(rng), random_element(rng), rng.uniform(-5, 5)), 1e-12);
}

TEST(Heisenberg, ReduceExamples) {
    HeisenbergElement g{1.25, -0.5, 2.3};
    auto r = heis_reduce(g);
    EXPECT_LE(max_gap(r.canonical, {0.25, 0.5, 0.55}), 1e-12);
    EXPECT_LE(max_gap(heis_multiply(g, heis_from_lattice(r.gamma)), r.canonical), 1e-12);

    HeisenbergElement c{0.3, 0.7, 0.1};
    auto rc = heis_reduce(c);
    EXPECT_EQ(rc.canonical, c);
    EXPECT_EQ(rc.gamma, (LatticeElement{0, 0, 0}));

    auto r2 = heis_reduce(HeisenbergElement{2, 3, 5});
    EXPECT_EQ(r2.canonical, (HeisenbergElement{0, 0, 0}));
    // (2,3,5)(-2,-3,k) = (0,0,5+k-6) forces k = 1.
    EXPECT_EQ(r2.gamma, (LatticeElement{-2, -3, 1}));
}

TEST(Heisenberg, ReduceProperties) {
    Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
        auto g = random_element(rng, 6.0);
        auto r = heis_reduce(g);
        ASSERT_TRUE(heis_is_canonical(r.canonical));
        auto back = heis_multiply(r.canonical, heis_inverse(heis_from_lattice(r.gamma)));
        EXPECT_LE(max_gap(back, g), 1e-12 * std::max(1.0, std::fabs(g.z) + 36));
        auto again = heis_reduce(r.canonical);
        EXPECT_EQ(again.canonical, r.canonical);
        EXPECT_EQ(again.gamma, (LatticeElement{0, 0, 0}));
    }
}

TEST(Heisenberg, NilflowExamples) {
    auto basis = Basis::square_roots({2, 3});
    auto spec = NilflowSpec::from_exact(SymbolicReal::symbol("√2"), SymbolicReal::symbol("√3"), 0.0, basis);
    auto sys = SystemHandle::nilflow(spec);
    Point p{0.2, 0.4, 0.6};
    EXPECT_EQ(sys.evolve(p, 0.0), p);

    auto tor = TorusFlowSpec::from_exact({SymbolicReal::symbol("√2"), SymbolicReal::symbol("√3")}, basis);
    Rng rng(10);
    for (int i = 0; i < 200; ++i) {
        double t = rng.uniform(-100, 100);
        auto q = sys.evolve({0, 0, 0}, t);
        auto b = torus_evolve(tor, {0, 0}, t);
        EXPECT_LE(circle_dist(q[0], b[0]), 1e-12);
        EXPECT_LE(circle_dist(q[1], b[1]), 1e-12);
    }

    auto once = sys.evolve(sys.evolve({0, 0, 0}, 1.0), 1.0);
    EXPECT_LE(sys.dist(once, sys.evolve({0, 0, 0}, 2.0)), 1e-10);
}

TEST(Heisenberg, NilflowLaw) {
    auto sys = SystemHandle::nilflow(NilflowSpec::from_generator({std::sqrt(2.0), std::sqrt(3.0), 0.3}));
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
        Point p = to_point(heis_reduce(random_element(rng)).canonical);
        double s = rng.uniform(-1e3, 1e3), t = rng.uniform(-1e3, 1e3);
        EXPECT_LE(sys.dist(sys.evolve(sys.evolve(p, s), t), sys.evolve(p, s + t)), 1e-10);
    }
}

TEST(Metric, Examples) {
    auto t1 = SystemHandle::torus_map(TorusFlowSpec::from_rates({0.5}));
    EXPECT_NEAR(t1.dist({0.1}, {0.9}), 0.2, 1e-15);
    EXPECT_EQ(t1.dist({0.3}, {0.3}), 0.0);
    EXPECT_THROW(t1.dist({0.1}, {0.1, 0.2}), DimensionMismatch);

    auto h = SystemHandle::nilsystem(NilflowSpec::from_generator({0.1, 0.2, 0.0}));
    EXPECT_LE(h.dist({0, 0, 0.9}, {0, 0, 0.05}), 0.15 + 1e-12);
    EXPECT_EQ(h.dist({0.2, 0.3, 0.4}, {0.2, 0.3, 0.4}), 0.0);
}

TEST(Metric, SymmetricAndPositive) {
    auto h = SystemHandle::nilsystem(NilflowSpec::from_generator({0.1, 0.2, 0.0}));
    Rng rng(13);
    for (int i = 0; i < 5000; ++i) {
        Point p{rng.uniform(), rng.uniform(), rng.uniform()}, q{rng.uniform(), rng.uniform(), rng.uniform()};
        EXPECT_EQ(h.dist(p, q), h.dist(q, p));
        EXPECT_GT(h.dist(p, q), 0.0);
    }
}

TEST(Metric, HeisenbergDistanceIsLatticeInvariant) {
    Rng rng(14);
    for (int i = 0; i < 2000; ++i) {
        auto g = random_element(rng, 1.0);
        auto p = heis_reduce(g).canonical;
        HeisenbergElement gamma{static_cast<double>(rng.uniform_int(-1, 1)), static_cast<double>(rng.uniform_int(-1, 1)),
                                static_cast<double>(rng.uniform_int(-1, 1))};
        auto moved = heis_reduce(heis_multiply(g, gamma)).canonical;
        EXPECT_LE(heis_dist(p, moved), 1e-12);
    }
}

TEST(Minimality, FlowExamples) {
    auto basis = Basis::square_roots({2, 3});
    EXPECT_TRUE(flow_minimal(sqrt_flow({"1", "√2"}, basis)));
    EXPECT_FALSE(flow_minimal(sqrt_flow({"√2", "2√2"}, basis)));
    auto nil = SystemHandle::nilflow(
        NilflowSpec::from_exact(SymbolicReal::symbol("√2"), SymbolicReal::symbol("√3"), 0.0, basis));
    EXPECT_TRUE(flow_minimal(nil));
    EXPECT_THROW(flow_minimal(SystemHandle::nilflow(NilflowSpec::from_generator({1, 2, 0}))), std::invalid_argument);
}

TEST(Minimality, TimeTExamples) {
    auto basis = Basis::square_roots({2, 3, 6});
    auto sys = sqrt_flow({"1", "√2"}, basis);
    EXPECT_FALSE(time_t_minimal(sys, SymbolicReal(1), basis));
    EXPECT_FALSE(time_t_minimal(sys, SymbolicReal::symbol("√2"), basis));
    EXPECT_TRUE(time_t_minimal(sys, SymbolicReal::symbol("√3"), basis));
    EXPECT_THROW(time_t_minimal(sys, SymbolicReal(0), basis), std::invalid_argument);
}

TEST(Minimality, UnsupportedBasisIsExplicit) {
    auto basis = Basis::square_roots({2, 3});
    auto sys = sqrt_flow({"1", "√2"}, basis);
    try {
        time_t_minimal(sys, SymbolicReal::symbol("√3"), basis);
        FAIL() << "expected UnsupportedBasis";
    } catch (const UnsupportedBasis& e) {
        EXPECT_EQ(e.missing(), std::vector<std::string>{"√2·√3"});
        EXPECT_EQ(std::string(e.what()).rfind("UNSUPPORTED-BASIS", 0), 0u);
    }
}

TEST(Minimality, InvariantUnderFrequencyOrder) {
    auto basis = Basis::square_roots({2, 3, 6});
    const std::vector<std::vector<std::string>> cases{{"1", "√2"}, {"√2", "2√2"}, {"√3", "1/2", "√6"}, {"√2", "1 + √2", "1"}};
    const std::vector<std::string> times{"1", "√2", "√3", "1/3 + √6"};
    for (auto freqs : cases) {
        auto fwd = sqrt_flow(freqs, basis);
        std::reverse(freqs.begin(), freqs.end());
        auto rev = sqrt_flow(freqs, basis);
        EXPECT_EQ(flow_minimal(fwd), flow_minimal(rev));
        for (const auto& t : times) {
            auto ts = SymbolicReal::parse(t);
            bool a = false, b = false;
            bool ta = false, tb = false;
            try { a = time_t_minimal(fwd, ts, basis); } catch (const UnsupportedBasis&) { ta = true; }
            try { b = time_t_minimal(rev, ts, basis); } catch (const UnsupportedBasis&) { tb = true; }
            EXPECT_EQ(ta, tb);
            EXPECT_EQ(a, b);
        }
    }
}

TEST(Minimality, MapMinimality) {
    auto basis = Basis::square_roots({2});
    auto rot = SystemHandle::torus_map(TorusFlowSpec::from_exact({SymbolicReal::symbol("√2")}, basis));
    EXPECT_TRUE(map_minimal(rot));
    auto third = SystemHandle::torus_map(TorusFlowSpec::from_exact({SymbolicReal(Rational(1, 3))}, basis));
    EXPECT_FALSE(map_minimal(third));
}

TEST(Orbit, SingleTime) {
    auto sys = SystemHandle::torus_flow(TorusFlowSpec::from_rates({std::sqrt(2.0)}));
    std::vector<double> times{0.0};
    auto cloud = orbit_sample(sys, {0.37}, times, 3);
    ASSERT_EQ(cloud.size(), 1u);
    EXPECT_EQ(cloud.component(0, 0), (Point{0.37}));
    EXPECT_EQ(cloud.provenance().seed, 3u);
    EXPECT_EQ(cloud.provenance().system, "torus-flow");
}

TEST(Orbit, MinimalRotationFillsCircle) {
    auto basis = Basis::square_roots({2});
    auto sys = SystemHandle::torus_flow(TorusFlowSpec::from_exact({SymbolicReal::symbol("√2")}, basis));
    Rng rng(15);
    std::vector<double> times(100000);
    for (auto& t : times) t = rng.uniform(0, 1e4);
    auto cloud = orbit_sample(sys, {0.0}, times);
    std::vector<int> hits(100, 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) ++hits[static_cast<std::size_t>(cloud.component(i, 0)[0] * 100)];
    for (int h : hits) EXPECT_GT(h, 0);
}

TEST(Orbit, RationalRotationHasPeriodThree) {
    auto sys = SystemHandle::torus_map(TorusFlowSpec::from_exact({SymbolicReal(Rational(1, 3))}, Basis{}));
    std::vector<double> times;
    for (int n = 0; n < 300; ++n) times.push_back(n);
    auto cloud = orbit_sample(sys, {0.1}, times);
    std::vector<Point> distinct;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.component(i, 0);
        bool seen = false;
        for (const auto& q : distinct) seen = seen || sys.dist(p, q) < 1e-9;
        if (!seen) distinct.push_back(p);
    }
    EXPECT_EQ(distinct.size(), 3u);
    EXPECT_THROW(sys.evolve({0.1}, 0.5), std::invalid_argument);
}
