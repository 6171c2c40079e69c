#include "shrinktarget/lattice_search.hpp"

#include "shrinktarget/errors.hpp"

#include <algorithm>
#include <cmath>

namespace shrinktarget {

namespace {

using Matrix = std::vector<IntegerVector>;

// Exact LLL (delta = 3/4) on the rows of `basis`, mirroring the operations on the columns of u and rows of u_inv.
void lll_reduce(Matrix& basis, Matrix& u, Matrix& u_inv)
{
    const std::size_t m = basis.size();
    std::vector<std::vector<Rational>> mu(m, std::vector<Rational>(m));
    std::vector<Rational> bnorm(m);
    std::vector<std::vector<Rational>> star(m);

    auto gram_schmidt = [&] {
        for (std::size_t i = 0; i < m; ++i) {
            star[i].assign(basis[i].begin(), basis[i].end());
            for (std::size_t j = 0; j < i; ++j) {
                Rational num = 0;
                for (std::size_t t = 0; t < m; ++t)
                    num += Rational(basis[i][t]) * star[j][t];
                mu[i][j] = num / bnorm[j];
                for (std::size_t t = 0; t < m; ++t)
                    star[i][t] -= mu[i][j] * star[j][t];
            }
            bnorm[i] = 0;
            for (std::size_t t = 0; t < m; ++t)
                bnorm[i] += star[i][t] * star[i][t];
            require(bnorm[i] > 0, ErrorKind::internal, "dependent lattice basis");
        }
    };

    gram_schmidt();
    std::size_t k = 1;
    std::uint64_t guard = 0;
    while (k < m) {
        require(++guard < 1'000'000, ErrorKind::resource, "lattice reduction did not converge");
        for (std::size_t jj = k; jj-- > 0;) {
            Integer q = floor_of(mu[k][jj] + Rational(1, 2));
            if (q == 0)
                continue;
            for (std::size_t t = 0; t < m; ++t) {
                basis[k][t] -= q * basis[jj][t];
                u[t][k] -= q * u[t][jj];
                u_inv[jj][t] += q * u_inv[k][t];
            }
            for (std::size_t l = 0; l < jj; ++l)
                mu[k][l] -= Rational(q) * mu[jj][l];
            mu[k][jj] -= Rational(q);
        }
        if (bnorm[k] >= (Rational(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * bnorm[k - 1]) {
            ++k;
        } else {
            std::swap(basis[k], basis[k - 1]);
            for (std::size_t t = 0; t < m; ++t)
                std::swap(u[t][k], u[t][k - 1]);
            std::swap(u_inv[k], u_inv[k - 1]);
            gram_schmidt();
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
}

Integer scaled_round(const Rational& x, unsigned bits)
{
    Rational s = x;
    mpq_mul_2exp(s.get_mpq_t(), s.get_mpq_t(), bits);
    return floor_of(s + Rational(1, 2));
}

}  // namespace

ReturnSearch::ReturnSearch(const RationalVector& center, const Integer& l_lo, const Integer& l_hi,
                           const Rational& radius, unsigned min_bits)
    : dim_(center.size()), m_(center.size() + 1), center_(center), l_lo_(l_lo), l_hi_(l_hi), radius_(radius)
{
    require(dim_ >= 1, ErrorKind::dimension, "return search needs d >= 1");
    require(l_lo >= 0 && l_lo <= l_hi, ErrorKind::domain, "return search needs 0 <= l_lo <= l_hi");
    require(radius > 0, ErrorKind::domain, "return search needs a positive radius");

    std::size_t inv_bits = bit_length(ceil_of(1 / radius));
    bits_ = std::max<unsigned>(min_bits, static_cast<unsigned>(bit_length(l_hi) + inv_bits + 48));
    Integer one = Integer(1) << bits_;
    for (const auto& c : center) {
        Integer t = scaled_round(c - Rational(floor_of(c)), bits_);
        if (t >= one)
            t -= one;
        theta_scaled_.push_back(t);
    }

    // Inflate for rounding of c and x at this precision.
    Rational slack = make_rational(l_hi + 2, one);
    Rational r_search = radius + slack;
    Rational width = Rational(l_hi - l_lo + 1) / 2;

    Integer m_scale = floor_of(Rational(one) * r_search / width + Rational(1, 2));
    if (m_scale < 1)
        m_scale = 1;

    Matrix basis(m_, IntegerVector(m_, Integer(0)));
    basis[0][0] = m_scale;
    for (std::size_t i = 0; i < dim_; ++i) {
        basis[0][i + 1] = theta_scaled_[i];
        basis[i + 1][i + 1] = -one;
    }
    u_.assign(m_, IntegerVector(m_, Integer(0)));
    u_inv_.assign(m_, IntegerVector(m_, Integer(0)));
    for (std::size_t i = 0; i < m_; ++i) {
        u_[i][i] = 1;
        u_inv_[i][i] = 1;
    }
    lll_reduce(basis, u_, u_inv_);

    // Box coordinates: z_0 = Y_0 / (width m_scale), z_i = Y_i / (2^bits r_search).
    std::vector<std::vector<double>> z(m_, std::vector<double>(m_));
    Rational s0 = 1 / (width * Rational(m_scale));
    Rational s1 = 1 / (Rational(one) * r_search);
    for (std::size_t j = 0; j < m_; ++j)
        for (std::size_t t = 0; t < m_; ++t)
            z[j][t] = Rational(Rational(basis[j][t]) * (t == 0 ? s0 : s1)).get_d();

    mu_.assign(m_, std::vector<double>(m_, 0.0));
    norms_.assign(m_, 0.0);
    std::vector<std::vector<double>> star = z;
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double num = 0;
            for (std::size_t t = 0; t < m_; ++t)
                num += z[i][t] * star[j][t];
            mu_[i][j] = num / norms_[j];
            for (std::size_t t = 0; t < m_; ++t)
                star[i][t] -= mu_[i][j] * star[j][t];
        }
        double n = 0;
        for (std::size_t t = 0; t < m_; ++t)
            n += star[i][t] * star[i][t];
        norms_[i] = n;
    }
}

std::vector<Integer> ReturnSearch::enumerate(const IntegerVector& offset_scaled) const
{
    // Target in original coefficients, scaled by 2^(bits+1): (2 c0 2^bits, 2 c0 theta_i + 2 x_i).
    Integer twice_c0 = l_lo_ + l_hi_;
    IntegerVector target(m_);
    target[0] = twice_c0 << bits_;
    for (std::size_t i = 0; i < dim_; ++i)
        target[i + 1] = twice_c0 * theta_scaled_[i] + 2 * offset_scaled[i];

    IntegerVector whole(m_);
    std::vector<double> frac(m_);
    const unsigned shift = bits_ + 1;
    for (std::size_t j = 0; j < m_; ++j) {
        Integer kappa = 0;
        for (std::size_t t = 0; t < m_; ++t)
            kappa += u_inv_[j][t] * target[t];
        Integer q, r;
        mpz_fdiv_q_2exp(q.get_mpz_t(), kappa.get_mpz_t(), shift);
        mpz_fdiv_r_2exp(r.get_mpz_t(), kappa.get_mpz_t(), shift);
        whole[j] = q;
        long exp = 0;
        double mant = mpz_get_d_2exp(&exp, r.get_mpz_t());
        frac[j] = std::ldexp(mant, static_cast<int>(exp - static_cast<long>(shift)));
    }

    const double bound = static_cast<double>(m_) * (1.0 + 1e-9) + 1e-9;
    std::vector<Integer> found;
    std::vector<long long> coeff(m_, 0);
    std::vector<double> y(m_, 0.0);
    std::uint64_t nodes = 0;

    auto emit = [&] {
        Integer l = 0;
        for (std::size_t j = 0; j < m_; ++j)
            l += u_[0][j] * (whole[j] + Integer(static_cast<long>(coeff[j])));
        if (l >= l_lo_ && l <= l_hi_)
            found.push_back(l);
    };

    auto recurse = [&](auto&& self, std::size_t level_plus_one, double used) -> void {
        const std::size_t i = level_plus_one - 1;
        double centre = frac[i];
        for (std::size_t j = i + 1; j < m_; ++j)
            centre -= mu_[j][i] * y[j];
        double rem = bound - used;
        if (rem < 0)
            return;
        double span = std::sqrt(rem / norms_[i]) + 1e-9;
        auto lo = static_cast<long long>(std::ceil(centre - span));
        auto hi = static_cast<long long>(std::floor(centre + span));
        for (long long u = lo; u <= hi; ++u) {
            require(++nodes <= node_limit, ErrorKind::resource, "return search enumeration exceeded its node budget");
            coeff[i] = u;
            y[i] = static_cast<double>(u) - frac[i];
            double c = static_cast<double>(u) - centre;
            double next = used + c * c * norms_[i];
            if (next > bound + 1e-9)
                continue;
            if (i == 0)
                emit();
            else
                self(self, i, next);
        }
    };
    recurse(recurse, m_, 0.0);

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

std::vector<Integer> ReturnSearch::candidates(std::span<const Rational> x) const
{
    require(x.size() == dim_, ErrorKind::dimension, "offset dimension mismatch");
    IntegerVector scaled;
    for (const auto& xi : x)
        scaled.push_back(scaled_round(xi - Rational(floor_of(xi)), bits_));
    return enumerate(scaled);
}

std::vector<Integer> ReturnSearch::candidates_grid128(std::span<const u128> x) const
{
    require(x.size() == dim_, ErrorKind::dimension, "offset dimension mismatch");
    IntegerVector scaled;
    for (u128 xi : x)
        scaled.push_back(to_integer(xi) << (bits_ - 128));
    return enumerate(scaled);
}

std::vector<Integer> ReturnSearch::solve(std::span<const Rational> x) const
{
    std::vector<Integer> out;
    for (const auto& l : candidates(x)) {
        RationalVector p;
        for (std::size_t i = 0; i < dim_; ++i)
            p.push_back(x[i] + Rational(l) * center_[i]);
        if (dist_nearest_lattice(p) <= radius_)
            out.push_back(l);
    }
    return out;
}

}  // namespace shrinktarget
