#include <gtest/gtest.h>

#include <cmath>

#include "pxk/hybrid.hpp"
#include "pxk/rrqr.hpp"
#include "test_util.hpp"

namespace rq = pxk::rrqr;
using pxk::Complex;
using pxk::ComplexMatrix;

namespace {

double reconstruction_error(const ComplexMatrix& M, const rq::CpqrResult& f) {
    ComplexMatrix MP = M.select_cols(f.perm);
    return pxk::fro_norm(pxk::subtract(MP, pxk::matmul(f.Q, f.R)));
}

double row_id_residual(const ComplexMatrix& M, const rq::InterpolativeFactor& U) {
    return pxk::fro_norm(pxk::subtract(M, rq::row_id_apply(U, M.select_rows(U.selected))));
}

double col_id_residual(const ComplexMatrix& M, const rq::InterpolativeFactor& V) {
    return pxk::fro_norm(pxk::subtract(M, rq::col_id_apply(M.select_cols(V.selected), V)));
}

double max_abs(const ComplexMatrix& M) {
    double m = 0.0;
    for (const Complex& v : M.data()) m = std::max(m, std::abs(v));
    return m;
}

// Kahan's example: upper triangular with graded diagonal; plain column
// pivoting is known to underestimate its rank gap, which makes the strong
// swap phase do real work.
ComplexMatrix kahan_matrix(int n, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    ComplexMatrix K(n, n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        K(i, i) = scale;
        for (int j = i + 1; j < n; ++j) K(i, j) = -c * scale;
        scale *= s;
    }
    return K;
}

TEST(Cpqr, IdentityGivesUnitDiagonal) {
    const ComplexMatrix I = ComplexMatrix::identity(5);
    const auto f = rq::cpqr(I);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(f.R(i, i)), 1.0, 1e-14);
    EXPECT_LE(reconstruction_error(I, f), 1e-13 * pxk::fro_norm(I));
}

TEST(Cpqr, RankOneMatrix) {
    testutil::Rng rng(3);
    ComplexMatrix M = testutil::random_decay_matrix(rng, 6, 4, 1e-18);
    const auto f = rq::cpqr(M);
    EXPECT_LE(std::abs(f.R(1, 1)), 1e-13 * std::abs(f.R(0, 0)));
}

TEST(Cpqr, RandomResidualAndOrthonormality) {
    testutil::Rng rng(5);
    const ComplexMatrix M = testutil::random_matrix(rng, 20, 10);
    const auto f = rq::cpqr(M);
    EXPECT_LE(reconstruction_error(M, f), 1e-13 * pxk::fro_norm(M));
    const ComplexMatrix QhQ = pxk::matmul(f.Q.conj_transpose(), f.Q);
    EXPECT_LE(pxk::fro_norm(pxk::subtract(QhQ, ComplexMatrix::identity(10))), 1e-13);
    // Pivoted diagonal magnitudes are non-increasing.
    for (int i = 1; i < 10; ++i)
        EXPECT_LE(std::abs(f.R(i, i)), std::abs(f.R(i - 1, i - 1)) * (1.0 + 1e-12));
}

TEST(Cpqr, DeterministicWithTiedColumns) {
    // Columns 0 and 2 are identical; the larger column 1 is picked first and
    // the tie is broken toward the lower index.
    ComplexMatrix M(3, 3);
    M(0, 0) = 1.0, M(1, 0) = 0.5, M(2, 0) = Complex(0, 0.25);
    M(0, 1) = 2.0, M(1, 1) = Complex(0, 2.0), M(2, 1) = 1.0;
    for (int i = 0; i < 3; ++i) M(i, 2) = M(i, 0);
    const auto f = rq::cpqr(M);
    EXPECT_EQ(f.perm[0], 1);
    EXPECT_EQ(f.perm[1], 0);
    EXPECT_EQ(f.perm[2], 2);
}

TEST(Srrqr, DiagonalTailRank) {
    ComplexMatrix M(3, 3);
    M(0, 0) = 4.0;
    M(1, 1) = 2.0;
    M(2, 2) = 1e-20;
    const auto s = rq::srrqr(M, 1e-10, 2.0);
    EXPECT_EQ(s.k, 2);
    EXPECT_EQ(s.perm[0], 0);
    EXPECT_EQ(s.perm[1], 1);
}

TEST(Srrqr, CoefficientsCappedOnRandomDecay) {
    testutil::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix M = testutil::random_decay_matrix(rng, 40, 25, 0.55);
        const auto s = rq::srrqr(M, 1e-4, 2.0);
        EXPECT_GT(s.k, 0);
        EXPECT_LT(s.k, 25);
        EXPECT_LE(max_abs(s.T), 2.0 + 1e-12);
    }
}

TEST(Srrqr, KahanMatrixTriggersSwapsAndStaysCapped) {
    ComplexMatrix K = kahan_matrix(60, 1.3);
    const auto s = rq::srrqr(K, 1e-4, 2.0);
    EXPECT_LE(max_abs(s.T), 2.0 + 1e-12);
    // Plain column pivoting leaves coefficients above the cap here, so the
    // swap loop must have run.
    EXPECT_GE(s.swaps, 1);
    rq::InterpolativeFactor V = rq::col_id(K, 1e-4, 2.0);
    EXPECT_LE(col_id_residual(K, V), 1.05 * 1e-4 * pxk::fro_norm(K));
}

TEST(Srrqr, RejectsBadParameters) {
    ComplexMatrix M = ComplexMatrix::identity(3);
    EXPECT_THROW(rq::srrqr(M, 0.0, 2.0), std::invalid_argument);
    EXPECT_THROW(rq::srrqr(M, 1e-8, 1.0), std::invalid_argument);
}

TEST(RowId, RankOneRowsSelectLargest) {
    ComplexMatrix M(3, 2);
    M(0, 0) = 1.0, M(0, 1) = 2.0;
    M(1, 0) = 2.0, M(1, 1) = 4.0;
    M(2, 0) = 3.0, M(2, 1) = 6.0;
    const auto U = rq::row_id(M, 1e-10, 2.0);
    ASSERT_EQ(U.k(), 1);
    EXPECT_EQ(U.selected[0], 2);  // largest-norm row
    EXPECT_LE(row_id_residual(M, U), 1e-13 * pxk::fro_norm(M));
}

TEST(RowId, SelectedRowsAreVerbatim) {
    testutil::Rng rng(11);
    ComplexMatrix M = testutil::random_decay_matrix(rng, 30, 8, 0.45);
    const auto U = rq::row_id(M, 1e-9, 2.0);
    const ComplexMatrix sub = M.select_rows(U.selected);
    for (int i = 0; i < sub.rows(); ++i)
        for (int j = 0; j < sub.cols(); ++j) EXPECT_EQ(sub(i, j), M(U.selected[i], j));
    // U has an exact identity block on the selected rows.
    const ComplexMatrix Um = U.basis_matrix();
    for (int i = 0; i < U.k(); ++i)
        for (int j = 0; j < U.k(); ++j)
            EXPECT_EQ(Um(U.selected[i], j), i == j ? Complex(1, 0) : Complex(0, 0));
}

TEST(RowId, RandomWideInstanceMeetsToleranceAndCap) {
    testutil::Rng rng(13);
    const ComplexMatrix M = testutil::random_decay_matrix(rng, 100, 30, 0.5);
    const auto U = rq::row_id(M, 1e-12, 2.0);
    EXPECT_LE(row_id_residual(M, U), 1e-11 * pxk::fro_norm(M));
    EXPECT_LE(max_abs(U.E), 2.0 + 1e-12);
}

TEST(ColId, MirrorsRowId) {
    ComplexMatrix M(2, 3);
    M(0, 0) = 1.0, M(0, 1) = 2.0, M(0, 2) = -1.0;
    M(1, 0) = 2.0, M(1, 1) = 4.0, M(1, 2) = -2.0;
    const auto V = rq::col_id(M, 1e-10, 2.0);
    ASSERT_EQ(V.k(), 1);
    EXPECT_EQ(V.selected[0], 1);
    EXPECT_LE(col_id_residual(M, V), 1e-13 * pxk::fro_norm(M));

    testutil::Rng rng(17);
    const ComplexMatrix R = testutil::random_decay_matrix(rng, 24, 60, 0.55);
    const auto Vr = rq::col_id(R, 1e-10, 2.0);
    EXPECT_LE(col_id_residual(R, Vr), 1.05 * 1e-10 * pxk::fro_norm(R) + 1e-13 * pxk::fro_norm(R));
    EXPECT_LE(max_abs(Vr.E), 2.0 + 1e-12);
    const ComplexMatrix sub = R.select_cols(Vr.selected);
    for (int i = 0; i < sub.rows(); ++i)
        for (int j = 0; j < sub.cols(); ++j) EXPECT_EQ(sub(i, j), R(i, Vr.selected[j]));
}

TEST(InterpolativeFactor, BasisNormWithinTheoreticalCap) {
    testutil::Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix M = testutil::random_decay_matrix(rng, 50, 20, 0.55);
        const auto U = rq::row_id(M, 1e-8, 2.0);
        const int k = U.k(), m = M.rows();
        const double cap = std::sqrt(k + static_cast<double>(m - k) * k * 4.0);
        EXPECT_LE(pxk::fro_norm(U.basis_matrix()), cap * (1.0 + 1e-12));
    }
}

TEST(RowId, WithinOracleFactorOfOptimalResidual) {
    testutil::Rng rng(23);
    for (int trial = 0; trial < 12; ++trial) {
        const int m = 8 + static_cast<int>(rng.uniform() * 5);   // <= 12
        const int n = 6 + static_cast<int>(rng.uniform() * 7);   // <= 12
        const ComplexMatrix M = testutil::random_decay_matrix(rng, m, n, 0.45);
        const auto U = rq::row_id(M, 1e-3, 2.0);
        const int k = U.k();
        if (k >= std::min(m, n)) continue;
        const auto sv = pxk::hybrid::singular_values_oracle(M);
        double opt2 = 0.0;
        for (std::size_t i = k; i < sv.size(); ++i) opt2 += sv[i] * sv[i];
        const double opt = std::sqrt(opt2);
        if (opt == 0.0) continue;
        const double factor = std::sqrt(1.0 + static_cast<double>(k) * (m - k) * 4.0);
        EXPECT_LE(row_id_residual(M, U), factor * opt * (1.0 + 1e-10));
    }
}

TEST(RowId, DeterministicAcrossRuns) {
    testutil::Rng rng(29);
    const ComplexMatrix M = testutil::random_decay_matrix(rng, 40, 16, 0.5);
    const auto a = rq::row_id(M, 1e-8, 2.0);
    const auto b = rq::row_id(M, 1e-8, 2.0);
    EXPECT_EQ(a.selected, b.selected);
    for (int i = 0; i < a.E.rows(); ++i)
        for (int j = 0; j < a.E.cols(); ++j) EXPECT_EQ(a.E(i, j), b.E(i, j));
}

}  // namespace
