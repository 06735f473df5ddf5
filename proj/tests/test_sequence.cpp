#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "bmlab/envelope.hpp"
#include "bmlab/sequence.hpp"
#include "oracles.hpp"

using namespace bmlab;

namespace {

std::vector<double> as_vector(const SeparatedSequence& s) { return {s.points().begin(), s.points().end()}; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Usage;
}

} // namespace

TEST(LoadSequence, UniformLattice) {
    const auto s = load_sequence({0, 1, 2, 3});
    EXPECT_EQ(as_vector(s), (std::vector<double>{0, 1, 2, 3}));
    EXPECT_EQ(s.delta(), 1.0);
    EXPECT_EQ(s.window().lo, 0.0);
    EXPECT_EQ(s.window().hi, 3.0);
}

TEST(LoadSequence, SortsInput) {
    const auto s = load_sequence({3, 1, 0, 2});
    EXPECT_EQ(as_vector(s), (std::vector<double>{0, 1, 2, 3}));
    EXPECT_EQ(s.delta(), 1.0);
}

TEST(LoadSequence, Errors) {
    EXPECT_EQ(kind_of([] { load_sequence({0, 0.5, 0.5}); }), ErrorKind::DuplicatePoint);
    EXPECT_EQ(kind_of([] { load_sequence({0, 0.5, 2}, std::nullopt, 1.0); }), ErrorKind::NotSeparated);
    EXPECT_EQ(kind_of([] { load_sequence({0, 1}, Window{0.5, 3}); }), ErrorKind::OutOfWindow);
    EXPECT_EQ(kind_of([] { load_sequence({0, 1}, Window{3, 3}); }), ErrorKind::EmptyWindow);
    EXPECT_EQ(kind_of([] { load_sequence({}); }), ErrorKind::InvalidArgument);
}

TEST(LoadSequence, DeltaIsExactMinimumGap) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-100, 100);
    std::vector<double> pts(200);
    for (auto& p : pts) p = u(rng);
    const auto s = load_sequence(pts);
    double gap = INFINITY;
    for (std::size_t k = 1; k < s.size(); ++k) {
        ASSERT_GT(s[k], s[k - 1]);
        gap = std::min(gap, s[k] - s[k - 1]);
    }
    EXPECT_EQ(gap, s.delta());
}

TEST(LoadSequence, ExplicitWindowIsKept) {
    const auto s = load_sequence({1, 2}, Window{-5, 5});
    EXPECT_EQ(s.window().lo, -5.0);
    EXPECT_EQ(s.window().symmetric_radius(), 5.0);
}

TEST(Generate, Lattice) {
    const auto s = generate(Lattice{1.0, -3, 3});
    EXPECT_EQ(as_vector(s), (std::vector<double>{-3, -2, -1, 0, 1, 2, 3}));
    EXPECT_EQ(s.delta(), 1.0);
}

TEST(Generate, SymmetricSquares) {
    const auto s = generate(SymmetricSquares{-3, 3});
    EXPECT_EQ(as_vector(s), (std::vector<double>{-9, -4, -1, 0, 1, 4, 9}));
    EXPECT_EQ(s.delta(), 1.0);
}

TEST(Generate, LogPerturbed) {
    const auto s = generate(LogPerturbedLattice{1, 3});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s[0], 1 + 1 / std::log(3.0));
    EXPECT_DOUBLE_EQ(s[1], 2 + 2 / std::log(4.0));
    EXPECT_DOUBLE_EQ(s[2], 3 + 3 / std::log(5.0));
}

TEST(Generate, EmptyRange) {
    EXPECT_EQ(kind_of([] { generate(Lattice{1.0, 3, 2}); }), ErrorKind::EmptyRange);
    EXPECT_EQ(kind_of([] { generate(SymmetricSquares{1, 0}); }), ErrorKind::EmptyRange);
}

TEST(Generate, WithinRadiusCoversExactly) {
    const auto sq = generate(spec_within_radius(GeneratorKind::Squares, 100.0));
    EXPECT_EQ(sq.size(), 21u);
    EXPECT_EQ(sq[0], -100.0);
    const auto lp = generate(spec_within_radius(GeneratorKind::LogPerturbed, 50.0));
    EXPECT_LE(lp.points().back(), 50.0);
    EXPECT_GT(log_perturbed_point(static_cast<std::int64_t>(lp.size() / 2) + 1), 50.0);
    const auto half = generate(spec_within_radius(GeneratorKind::Lattice, 10.0, 0.5));
    EXPECT_EQ(half.size(), 41u);
}

TEST(CountingFunction, UnitLatticeIsIdentity) {
    const auto s = generate(Lattice{1.0, -10, 10});
    const auto n = counting_function(s);
    for (double x = -10; x <= 10; x += 0.125) EXPECT_DOUBLE_EQ(n(x), x);
}

TEST(CountingFunction, SquaresInterpolation) {
    const auto n = counting_function(load_sequence({0, 1, 4, 9}));
    EXPECT_DOUBLE_EQ(n(2.5), 1.5);
    EXPECT_EQ(n(0.0), 0.0);
}

TEST(CountingFunction, UnitStepsAndIndexDifferences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.1, 3.0);
    std::vector<double> pts{-20};
    for (int k = 0; k < 60; ++k) pts.push_back(pts.back() + gap(rng));
    const auto s = load_sequence(pts);
    const auto n = counting_function(s);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_NEAR(n(s[k]) - n(s[k - 1]), 1.0, 1e-12);
    for (std::size_t j = 0; j < s.size(); j += 7)
        for (std::size_t k = j; k < s.size(); k += 5) {
            EXPECT_NEAR(n(s[k]) - n(s[j]), static_cast<double>(k - j), 1e-12);
            EXPECT_EQ(count_in(s, s[j], s[k]), k - j + 1);
        }
    EXPECT_NEAR(n(s.points().back()) - n(s.points().front()), static_cast<double>(s.size() - 1), 1e-12);
    for (double x = -25; x < pts.back() + 5; x += 0.01) EXPECT_NEAR(n(x), oracle::counting(pts, x), 1e-9);
}

TEST(CountingFunction, MonotoneAndContinuous) {
    const auto n = counting_function(generate(SymmetricSquares{-6, 6}));
    double prev = n(-40.0);
    for (double x = -40; x <= 40; x += 0.01) {
        const double v = n(x);
        EXPECT_GE(v, prev);
        prev = v;
    }
    for (const auto& b : n.breakpoints()) {
        EXPECT_EQ(n(b.x), b.y);
        EXPECT_NEAR(n(std::nextafter(b.x, -INFINITY)), b.y, 1e-12);
        EXPECT_NEAR(n(std::nextafter(b.x, INFINITY)), b.y, 1e-12);
    }
}

TEST(CountingFunction, OffOriginWindowAnchorsAtZero) {
    // Points 5, 6, 7: the first segment extended to 0 must give n(0) = 0.
    const auto n = counting_function(load_sequence({5, 6, 7}));
    EXPECT_DOUBLE_EQ(n(0.0), 0.0);
    EXPECT_DOUBLE_EQ(n(5.0), 5.0);
    const auto m = counting_function(load_sequence({-7, -6, -5}));
    EXPECT_DOUBLE_EQ(m(0.0), 0.0);
    EXPECT_DOUBLE_EQ(m(-5.0), -5.0);
}

TEST(CountingFunction, LatticeIsAffine) {
    for (double d : {0.5, 0.25, 3.0}) {
        const auto n = counting_function(generate(Lattice{d, -40, 40}));
        for (double x = -40 * d; x <= 40 * d; x += d / 7) EXPECT_NEAR(n(x), x / d, 1e-12 * (1 + std::abs(x / d)));
    }
}

TEST(CountingFunction, SinglePoint) {
    EXPECT_EQ(kind_of([] { counting_function(load_sequence({1.0})); }), ErrorKind::SinglePoint);
}

TEST(CountIn, Examples) {
    const auto z = generate(Lattice{1.0, -10, 10});
    EXPECT_EQ(count_in(z, Interval{0.5, 3.5}), 3u);
    const auto sq = generate(SymmetricSquares{-5, 5});
    EXPECT_EQ(count_in(sq, Interval{2, 8}), 1u);
    EXPECT_EQ(count_in(z, 4.0, 4.0), 1u);
    EXPECT_EQ(kind_of([&] { count_in(z, Interval{5, 11}); }), ErrorKind::OutOfWindow);
}

TEST(PiecewiseLinear, AffineMinusIsExactOnBreakpoints) {
    const auto n = counting_function(generate(SymmetricSquares{-4, 4}));
    const auto g = n.affine_minus(0.3, 1.0);
    for (const auto& b : n.breakpoints()) EXPECT_EQ(g(b.x), 0.3 * b.x + 1.0 - b.y);
    EXPECT_DOUBLE_EQ(g(100.0), 0.3 * 100.0 + 1.0 - n(100.0));
    EXPECT_DOUBLE_EQ(g(-100.0), 0.3 * -100.0 + 1.0 - n(-100.0));
}

TEST(PiecewiseLinear, RejectsUnsortedBreakpoints) {
    EXPECT_EQ(kind_of([] { PiecewiseLinear({{1, 0}, {0, 1}}, 0, 0); }), ErrorKind::InvalidArgument);
}

TEST(SequenceFile, ReadsCommentsAndBlankLines) {
    const auto path = std::filesystem::temp_directory_path() / "bmlab_seq_test.txt";
    {
        std::ofstream f(path);
        f << "# header\n3\n\n  -1.5\n+2e0\n";
    }
    const auto v = read_sequence_file(path.string());
    EXPECT_EQ(v, (std::vector<double>{3, -1.5, 2}));
    {
        std::ofstream f(path);
        f << "1\nabc\n";
    }
    EXPECT_EQ(kind_of([&] { read_sequence_file(path.string()); }), ErrorKind::Io);
    std::filesystem::remove(path);
    EXPECT_EQ(kind_of([] { read_sequence_file("/nonexistent/file"); }), ErrorKind::Io);
}
