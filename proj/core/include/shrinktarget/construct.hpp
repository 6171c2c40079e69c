#pragma once

#include "shrinktarget/certified.hpp"
#include "shrinktarget/exact.hpp"
#include "shrinktarget/lattice.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shrinktarget {

// Sequence mini-language.
//   a:  "const:K" | "poly:P" (a_n = n^P, indexed from the first n with n^P > 32) | "poly:P@S" | "v0,v1,..."
//   h:  "v0[,v1,...][;geom:Ka]" or "geom:Ka" (h_0 = 1); missing terms follow h_{n+1} = K a_n h_n (K = 24 by default).
IntegerVector expand_a_sequence(const std::string& spec, std::size_t count);
IntegerVector expand_h_sequence(const std::string& spec, const IntegerVector& a, std::size_t count);

struct ConstructionParams {
    IntegerVector a;         // a_0, a_1, ...
    IntegerVector h_target;  // h_0°, h_1°, ...
    std::string a_source;
    std::string h_source;

    Integer q_target(std::size_t n) const { return a.at(n) * h_target.at(n) * h_target.at(n); }
};

// Expands both specs to the length needed by a build of `steps` steps.
ConstructionParams make_params(const std::string& a_spec, const std::string& h_spec, std::size_t steps);

struct ConstructionStep {
    LatticePoint3 delta;  // Delta_n = (r_n, s_n, t_n)
    LatticePoint3 point;  // P_n = (x_n, y_n, z_n)
    Integer h;            // |Delta_n|
    Integer q;            // |P_n|
};

struct ConstructionState {
    ConstructionParams params;
    std::vector<ConstructionStep> steps;  // indices 0..N+1; step N+1 only certifies the radius of theta
    std::size_t depth = 0;                // N
    CertifiedVector theta;                // affine image of P_N with radius (3/2) h_{N+1} / (q_N q_{N+1})
};

// P' with {P, P'} a basis of {X : <delta, X> = 0} and |P'| <= 2 max(|P|, |delta|/|P|).
LatticePoint3 complete_basis(const LatticePoint3& delta, const LatticePoint3& p);

// Domain error naming the first index violating a_n > 32 or h_{n+1}° >= 24 a_n h_n° (through step N+1).
void check_admissible(const ConstructionParams& params, std::size_t steps);

ConstructionState build_theta(const ConstructionParams& params, std::size_t steps);

// theta and radius recomputed from a transcript (used after parsing).
CertifiedVector certified_limit(const std::vector<ConstructionStep>& steps, std::size_t depth);

struct CheckResult {
    std::string name;
    std::size_t index = 0;
    bool passed = false;
    std::string detail;
};

// Empirical status of the candidate q_{n+1} - q_n excluded from the exceptional-returns claim.
struct ExceptionalCandidate {
    std::size_t n = 0;
    Integer q;
    Verdict against_q_n = Verdict::inconclusive;  // ||q theta|| compared with ||q_n theta||
    bool is_record = false;                       // appears among best simultaneous approximations
    bool scanned = false;                         // is_record is only meaningful when scanned
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<ExceptionalCandidate> exceptional;
    std::size_t bruteforce_depth = 0;

    bool all_passed() const;
    std::size_t failures() const;
    std::size_t count(const std::string& name) const;
};

struct VerifyOptions {
    // Number of n for which all q < q_{n+1} are scanned; defaults to the largest n with q_{n+1} <= scan_limit.
    std::optional<std::size_t> depth_bruteforce;
    std::uint64_t scan_limit = 20'000'000;
    std::uint64_t scan_budget = 100'000'000;
    // Lattice-based search for exceptional returns at every depth.
    bool return_search = true;
    // Cross-check linear records up to h_1 when the scan fits the budget.
    bool linear_records = true;
};

VerificationReport verify_construction(const ConstructionState& state, const VerifyOptions& options = {});

// Transcript text format; serialize(parse(text)) reproduces text byte for byte.
std::string serialize_transcript(const ConstructionState& state);
ConstructionState parse_transcript(const std::string& text);

// Alternating continued fractions with prescribed growth of the denominators.
struct CFVectorSpec {
    std::size_t d = 0;
    Rational delta;
    std::size_t levels = 0;       // N
    std::size_t start_index = 0;  // n_0
    std::vector<IntegerVector> partial_quotients;  // [i][m] for levels m = 0..N+2
    std::vector<IntegerVector> denominators;       // [i][m]
    CertifiedVector theta;                         // convergents at level N+1
    std::string digit_rule;
};

CFVectorSpec alternating_cf(std::size_t d, const Rational& delta, std::size_t levels, std::size_t start_index);

// Violations of q_{d,n}^b >= q_{1,n}^{d b} n^a and q_{i-1,n+1}^b >= q_{i,n}^{d b} n^a (delta = a/b), n_0 <= n <= N.
std::vector<std::string> growth_violations(const CFVectorSpec& spec);

}  // namespace shrinktarget
