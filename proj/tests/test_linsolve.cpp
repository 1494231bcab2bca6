#include "liesym/errors.hpp"
#include "liesym/linsolve.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace liesym;

namespace {

Vector vec(std::initializer_list<long> xs) {
    Vector v;
    for (long x : xs) v.push_back(Scalar(x));
    return v;
}

Vector times(const std::vector<Vector>& rows, const Vector& x) {
    Vector y(rows.size(), Scalar(0));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += rows[i][j] * x[j];
    return y;
}

} // namespace

TEST(Nullspace, Identity) { EXPECT_TRUE(nullspace({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}, 3).empty()); }

TEST(Nullspace, ZeroMatrix) { EXPECT_EQ(nullspace({vec({0, 0, 0}), vec({0, 0, 0})}, 3).size(), 3u); }

TEST(Nullspace, SingleVector) {
    auto n = nullspace({vec({1, 1, 0}), vec({0, 0, 1})}, 3);
    ASSERT_EQ(n.size(), 1u);
    EXPECT_EQ(n[0], vec({-1, 1, 0}));
}

TEST(Rref, ReducedForm) {
    SparseMatrix m = SparseMatrix::from_dense({vec({2, 4, 6}), vec({1, 3, 5}), vec({3, 7, 11})}, 3);
    Echelon e = rref(m);
    EXPECT_EQ(e.rank(), 2u);
    EXPECT_EQ(e.pivots, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(e.rows[0].at(0), 1);
    EXPECT_EQ(e.rows[0].count(1), 0u);
    EXPECT_EQ(e.rows[1].at(1), 1);
}

TEST(Rank, Examples) {
    EXPECT_EQ(rank({vec({1, 0})}, 2), 1u);
    EXPECT_EQ(rank({vec({1, 2}), vec({2, 4})}, 2), 1u);
}

TEST(Span, Coordinates) {
    auto c = span_coordinates(vec({2, 0}), {vec({1, 0})});
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(*c, vec({2}));
    EXPECT_FALSE(span_coordinates(vec({0, 1}), {vec({1, 0})}).has_value());
    EXPECT_THROW(span_coordinates(vec({1, 0}), {vec({1, 0}), vec({2, 0})}), DependentBasis);
}

TEST(Property, NullspaceExactness) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> entry(-6, 6), dim(1, 9), zero(0, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t r = dim(rng), c = dim(rng);
        std::vector<Vector> rows(r, Vector(c));
        for (auto& row : rows)
            for (auto& x : row) x = zero(rng) ? Scalar(0) : Scalar(entry(rng), 1 + std::abs(entry(rng)));
        for (auto& row : rows)
            for (auto& x : row) x.canonicalize();
        auto ns = nullspace(rows, c);
        EXPECT_EQ(ns.size() + rank(rows, c), c);
        for (const auto& v : ns)
            for (const auto& y : times(rows, v)) EXPECT_EQ(y, 0);
        EXPECT_EQ(rank(ns, c), ns.size());
    }
}
