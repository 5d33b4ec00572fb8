#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hopfdirac/common.hpp"

namespace hopfdirac::lin {

// Dense Hermitian matrix, packed upper triangle (row-major: (i,j), i<=j).
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t order)
        : n_(order), data_(order * (order + 1) / 2) {}

    std::size_t order() const { return n_; }

    // i <= j required for writes
    cplx& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
    const cplx& at(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

    // arbitrary (i,j) read, conjugating below the diagonal
    cplx get(std::size_t i, std::size_t j) const {
        return i <= j ? data_[index(i, j)] : std::conj(data_[index(j, i)]);
    }

    std::vector<cplx> dense() const;
    double frobenius_norm() const;

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        return i * n_ - i * (i + 1) / 2 + j;
    }
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues;            // ascending
    std::vector<cplx> eigenvectors;             // column-major order x order, optional
    double residual_bound = 0.0;                // ||A v - l v|| <= residual_bound * ||A||
    bool has_vectors() const { return !eigenvectors.empty(); }
};

// Householder tridiagonalization + implicit-shift QL.
EigenDecomposition eigh(const HermitianMatrix& A, bool want_vectors);

// A v = lambda B v via Cholesky congruence; B must be positive definite.
EigenDecomposition eigh_generalized(const HermitianMatrix& A, const HermitianMatrix& B,
                                    bool want_vectors);

// Hermitian tridiagonal (zero-filled diagonal allowed): diag real, off
// complex with the convention off[i] = T(i, i+1). Ascending eigenvalues,
// O(n^2).
std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const cplx> off);

// Eigenvector of the Hermitian tridiagonal matrix nearest `shift`, by inverse
// iteration with partial pivoting. Returns (eigenvalue estimate, vector).
std::pair<double, std::vector<cplx>> tridiag_eigenvector(std::span<const double> diag,
                                                         std::span<const cplx> off,
                                                         double shift, Rng& rng);

// Composite Simpson in the log variable for samples on a log-spaced r-grid.
// Returns (integral of f dr, crude error estimate from grid halving).
std::pair<double, double> simpson_log(std::span<const double> r,
                                      std::span<const double> f);

// Gauss-Legendre nodes/weights on [a,b] (order up to 64, cached tables).
void gauss_legendre(int npts, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

}  // namespace hopfdirac::lin
