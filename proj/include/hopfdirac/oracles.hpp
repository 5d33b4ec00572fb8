#pragma once

#include <map>
#include <vector>

#include "hopfdirac/common.hpp"

namespace hopfdirac::oracle {

// Exact monomial moments over S^3: (a, c) -> integral |z1|^{2a} |z2|^{2c}
//   = 2 pi^2 a! c! / (a+c+1)!
class MomentTable {
public:
    explicit MomentTable(int max_total_degree);
    double get(int a, int c) const;
    int max_degree() const { return maxdeg_; }

private:
    int maxdeg_;
    std::map<std::pair<int, int>, double> vals_;
};

struct OracleLine {
    double value;
    long multiplicity;
};

// Free Dirac operator on S^3 assembled exactly on spinors with polynomial
// components of total degree <= degree in (z1, conj z1, z2, conj z2); Ritz
// values are exact on these invariant subspaces.
std::vector<OracleLine> s3_free_oracle(int degree);

struct S2ConstantOracle {
    std::vector<double> positive;            // ascending union over sectors
    std::map<long, std::vector<double>> per_sector;
    double zero_ritz = 0.0;                  // smallest kernel-side Ritz value
    long zero_sectors = 0;                   // sectors carrying a kernel mode
};

// Variational oracle for the constant-field Dirac operator on the bundle
// with Chern number n over N: trial sections z^a zbar^b (1+|z|^2/4)^{-s} in
// chart +, assembled per azimuthal sector with high-order quadrature.
S2ConstantOracle s2_constant_field_oracle(long n, int basis_size, double lambda_max = 12.0);

// single-sector positive Ritz values (ascending), for convergence tests
std::vector<double> s2_sector_oracle(long n, long j, int basis_size);

}  // namespace hopfdirac::oracle
