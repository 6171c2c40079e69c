#pragma once

#include "shrinktarget/best_approx.hpp"
#include "shrinktarget/certified.hpp"
#include "shrinktarget/exact.hpp"

#include <string>
#include <vector>

namespace shrinktarget {

struct SeriesOptions {
    unsigned rel_bits = 64;        // relative width of each certified root
    std::size_t tail_window = 10;  // terms in tail_estimate
    ScanOptions scan;
};

struct SeriesTerm {
    std::size_t index = 0;
    CertifiedScalar value;
};

struct SeriesReport {
    std::string label;
    std::vector<SeriesTerm> terms;
    std::vector<CertifiedScalar> partial_sums;
    CertifiedScalar tail_estimate;  // sum of the last tail_window terms
    std::string verdict = "partial sums up to N; no convergence claim";

    CertifiedScalar total() const;
};

// t_n = (|X_{n+1}|^d ||<X_n, theta>||)^(1/(d+1)) for n = 0..N-1; needs N + 1 vectors of increasing norm.
SeriesReport linear_window_series(const CertifiedVector& theta, const std::vector<IntegerVector>& xs, std::size_t n,
                                  const SeriesOptions& options = {});

// k^-1 (k^delta eps_l(k))^(1/(delta+1)) for k = 1..K; delta = d is the harmonic form of the linear condition.
SeriesReport harmonic_linear_series(const CertifiedVector& theta, std::uint64_t k_max, const Rational& delta,
                                    const SeriesOptions& options = {});

// (2^(n d) eps_l(2^n))^(1/(d+1)) for n = 0..N-1.
SeriesReport dyadic_linear_series(const CertifiedVector& theta, std::size_t n, const SeriesOptions& options = {});

// (q_n^(1/d) ||q_{n-1} theta||)^(1/(d+1)) for n = 1..N; needs N + 1 increasing denominators.
SeriesReport simultaneous_series(const CertifiedVector& theta, const IntegerVector& qs, std::size_t n,
                                 const SeriesOptions& options = {});

// Dyadic blocks bracket the harmonic sum up to K = 2^J - 1:
//   2^-(1+d/(d+1)) sum_{n=1..J} T_n <= S <= 2^(d/(d+1)) sum_{n=0..J-1} T_n,  T_n = (2^(n d) eps_l(2^n))^(1/(d+1)).
struct DyadicBracket {
    CertifiedScalar harmonic;  // S
    CertifiedScalar lower;     // left side
    CertifiedScalar upper;     // right side
    Verdict lower_holds = Verdict::inconclusive;
    Verdict upper_holds = Verdict::inconclusive;
    bool holds() const;
};

DyadicBracket dyadic_bracket(const CertifiedVector& theta, std::size_t j, const SeriesOptions& options = {});

struct TransferReport {
    Rational h;
    Rational c;  // 1 / (2(d+1))
    CertifiedScalar lhs;  // eps_l(h)
    CertifiedScalar rhs;  // eps_s(C h^d) / (C h^(d-1))
    bool holds = false;
};

// Linear-to-simultaneous transfer inequality eps_l(h) <= eps_s(C h^d) / (C h^(d-1)).
TransferReport transfer_check(const CertifiedVector& theta, const Rational& h, const ScanOptions& options = {});

// transfer_check for many h from one linear scan up to max h and one simultaneous scan up to max C h^d.
std::vector<TransferReport> transfer_sweep(const CertifiedVector& theta, const std::vector<Rational>& hs,
                                           const ScanOptions& options = {});

enum class EvidenceMode { simultaneous, linear };

struct EvidenceSample {
    std::size_t n = 0;
    Integer size;                  // q_n or |Delta_n|
    CertifiedScalar error;         // ||q_n theta|| or ||<Delta_n, theta>||
    CertifiedScalar theta_scaled;  // q_{n+1}^((1+tau)/d) ||q_n theta||, or |Delta_{n+1}|^(d(1+tau)) ||<Delta_n, theta>||
    CertifiedScalar omega_scaled;  // q_n^((1+tau)/d) ||q_n theta||, or |Delta_n|^(d(1+tau)) ||<Delta_n, theta>||
};

struct TypeEvidence {
    EvidenceMode mode = EvidenceMode::simultaneous;
    Rational tau;
    std::vector<EvidenceSample> samples;
    Rational running_inf;          // lower end of the infimum of omega_scaled
    Rational running_sup_of_tail;  // upper end of the supremum of theta_scaled over the second half
};

// Evidence over the first `depth` best approximations; scans grow until depth + 1 records exist.
TypeEvidence type_evidence(const CertifiedVector& theta, const Rational& tau, EvidenceMode mode, std::size_t depth,
                           const SeriesOptions& options = {});

// Simultaneous evidence from known denominators q_0 < q_1 < ... (depth = qs.size() - 1).
TypeEvidence type_evidence_for(const CertifiedVector& theta, const Rational& tau, const IntegerVector& qs,
                               const SeriesOptions& options = {});

struct WindowBound {
    CertifiedScalar l_n;       // |X_n|^(delta/(delta+1)) eps_{n-1}^(-delta/(delta+1))
    CertifiedScalar l_next;    // same at n + 1
    CertifiedScalar eps_prev;  // ||<X_{n-1}, theta>||
    CertifiedScalar eps;       // ||<X_n, theta>||
    CertifiedScalar bound;     // 2 (L_{n+1} eps_n + d L_n^(-1/delta) |X_n|)
};

// Window [L_n, L_{n+1}) of return times and the measure bound of its union of shrinking balls.
WindowBound window_bound(const CertifiedVector& theta, const std::vector<IntegerVector>& xs, const Rational& delta,
                         std::size_t n, const SeriesOptions& options = {});

}  // namespace shrinktarget
