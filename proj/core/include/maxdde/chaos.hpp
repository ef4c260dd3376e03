#pragma once

#include <array>
#include <string>
#include <vector>

#include "maxdde/return_map.hpp"

namespace maxdde {

/// Closed intervals I1 = [p0, alpha], I2 = [alpha, kappa], I3 = [p1, R0]
/// with p0 < alpha < kappa < p1 < R0 and pairwise disjoint interiors.
struct IntervalTriple {
    double p0 = 0.0;     // R(p0) = R(0), left of the fixed point
    double alpha = 0.0;  // leftmost fixed point
    double kappa = 0.0;  // R(kappa) < p0 - margin, just left of p1
    double p1 = 0.0;     // first discontinuity
    double R0 = 0.0;     // R(0)
    std::array<std::pair<double, double>, 3> intervals() const;
};

/// One verified covering relation: the image of `source` contains every
/// `targets` interval. Margin = min depth of the free target endpoints inside
/// the image; endpoint pairs equal by construction (fixed point alpha, value
/// R(0)) are checked as equalities within pin_tol and excluded from the min.
struct CoveringRelation {
    int source = 0;
    std::vector<int> targets;
    double image_lo = 0.0, image_hi = 0.0;
    double margin = 0.0;
    double pinned_residual = 0.0;  // max |pinned endpoint - image bound|
    bool ok = false;
};

struct PeriodicOrbit {
    int n = 0;                   // fixed point of R^n
    std::vector<int> word;       // interval indices (1-based), empty if from scan
    std::vector<double> points;  // the orbit, starting in I_{word[0]}
    int minimal_period = 0;
    int rotations = 1;           // distinct rotations of the word (census weight)
    bool degenerate = false;     // realized period below the word's symbol period
    int period_in_T = 0;         // DDE period as a multiple of T
    bool unresolved = false;     // nested preimage collapsed below resolution
};

/// Fixed points of R^n the certificate's words realize, counted per word
/// (degenerate realizations at shared interval endpoints included, matching
/// how the covering argument produces them). >= Tr A^n when all words resolve.
int word_census(const std::vector<PeriodicOrbit>& orbits, int n);

struct ChaosCertificate {
    IntervalTriple intervals;
    std::array<CoveringRelation, 3> relations;
    std::array<std::array<int, 3>, 3> adjacency{};
    int transitive_power = 0;           // least k with A^k > 0
    double entropy_lower = 0.0;         // log(spectral radius of A)
    double spectral_radius = 0.0;
    std::vector<long long> orbit_counts;  // Tr A^n, n = 1..8
    std::vector<PeriodicOrbit> located_orbits;
};

struct ChaosOptions {
    int image_grid = 2001;       // grid for image bounds, golden refinement on top
    double margin_min = 1e-3;    // certification threshold
    double kappa_margin = 2e-3;  // R(kappa) < p0 - kappa_margin
    double pin_tol = 2e-2;       // tolerance on pinned endpoint equalities
    int max_period = 3;          // orbit census depth
};

/// Fails loudly (Error) if alpha is not in (0.9, p1) or no p0 bracket exists.
IntervalTriple build_intervals(const ReturnMap& rm, const ChaosOptions& opts = {});

/// Error if a relation margin falls below margin_min (names the relation).
std::array<CoveringRelation, 3> verify_coverings(const ReturnMap& rm,
                                                 const IntervalTriple& iv,
                                                 const ChaosOptions& opts = {});

ChaosCertificate markov_certificate(const ReturnMap& rm, const IntervalTriple& iv,
                                    const std::array<CoveringRelation, 3>& rel,
                                    const ChaosOptions& opts = {});

/// Locates fixed points of R^n for each cyclically admissible word (nested
/// monotone-branch preimages + bisection) and merges full-branch scan results.
std::vector<PeriodicOrbit> locate_periodic_orbits(const ReturnMap& rm,
                                                  const ChaosCertificate& cert,
                                                  int max_period);

/// One-shot pipeline: intervals, coverings, certificate, orbit census.
ChaosCertificate certify(const ReturnMap& rm, const ChaosOptions& opts = {});

std::string summarize(const ChaosCertificate& cert);

}  // namespace maxdde
