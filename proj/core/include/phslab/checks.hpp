#ifndef PHSLAB_CHECKS_HPP
#define PHSLAB_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "phslab/ragged.hpp"
#include "phslab/semiconjugacy.hpp"
#include "phslab/systems.hpp"

namespace phslab {

struct CheckOptions {
  long n_samples = 100;
  std::uint64_t seed = 1;
  double displacement = 0.05;   // transversal off-leaf displacement
  double on_leaf_tol = 1e-6;    // comparison tolerance along traced curves
  double leaf_length = 4.0;     // 2D center-leaf length
  double stable_leaf_length = 30.0;
  double window = 0.1;          // monotonicity window (arclength)
  int growth_nmax = 8;
  double cs_center_length = 1.2;  // 3D cs/cu surface base length
  double rail_length = 0.6;
  int n_rails = 5;
  unsigned threads = 0;
  bool inject_fault = false;
  double fault_amplitude = 0.1;
};

// One named statement checked by sampling; violations must be zero to pass.
// Reports are deterministic given (system, options.seed).
struct CheckReport {
  std::string check_id;
  std::string target;  // preset/face the check ran against
  long samples = 0;
  long violations = 0;
  double margin = 0.0;  // check-specific separation margin
  double tol_used = 0.0;
  std::uint64_t seed = 0;
  bool fault_injected = false;
  std::string worst_witness;

  bool passed() const { return samples > 0 && violations == 0; }
};

// ---- 2D boundary-dynamics checks -----------------------------------------

// Points of one traced center leaf share H^s; points displaced along the
// stable direction do not.
CheckReport check_center_unstable_correspondence(const SurfaceSystem& sys,
                                                 const SurfaceSemiconjugacy& H,
                                                 const CheckOptions& opts);

// A center leaf and a stable leaf cross exactly once.
CheckReport check_center_stable_single_crossing(const SurfaceSystem& sys,
                                                const CheckOptions& opts);

// H^s restricted to a stable leaf is strictly monotone with growing range.
CheckReport check_stable_projection_homeo(const SurfaceSystem& sys,
                                          const SurfaceSemiconjugacy& H,
                                          const CheckOptions& opts);

// H^u along a center leaf is monotone up to tolerance backtracking;
// sub-tolerance plateaus are contiguous runs.
CheckReport check_center_monotone(const SurfaceSystem& sys,
                                  const SurfaceSemiconjugacy& H,
                                  const CheckOptions& opts);

// Longest plateau (arclength) of H^u along the center leaf through x;
// used to exhibit the collapsed interval over a weakened fixed point.
double center_plateau_length(const SurfaceSystem& sys,
                             const SurfaceSemiconjugacy& H,
                             const PlanePoint& x, const CheckOptions& opts);

// ---- 3D slab checks -------------------------------------------------------

// Points of one traced cs-surface share H^u (mirror: cu-surface / H^s);
// transversally displaced pairs differ with margin delta0.
CheckReport check_cs_leaf_constant_hu(const SemiconjugacyEvaluator& eval,
                                      bool cs_side, const CheckOptions& opts);

// Unit unstable arcs seeded on cs-tangent faces: H^u length grows by
// lambda_u^n over the n=0 floor, and the arcs never re-touch a cs face.
CheckReport check_unstable_growth(const SemiconjugacyEvaluator& eval,
                                  const CheckOptions& opts);

// H separates the endpoints of nondegenerate unstable+stable paths.
CheckReport check_su_path_separation(const SemiconjugacyEvaluator& eval,
                                     const CheckOptions& opts);

// sup |pi^u(p) - pi^u(q)| over cs-leaf pairs restricted to the set of points
// whose unit unstable arcs avoid cs faces; finite and stable under sample
// doubling and center-length extension.
CheckReport check_cs_projection_bound(const SemiconjugacyEvaluator& eval,
                                      const CheckOptions& opts);

// ---- suite ---------------------------------------------------------------

struct SuiteOptions {
  CheckOptions checks;
  bool include_fault_duals = true;
  bool run_certificate = true;
  int cert_n1 = 64, cert_n2 = 64, cert_ns = 16;
  double tol = 1e-8;  // evaluator tolerance
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  PartialHyperbolicityCertificate certificate;
  bool certificate_ran = false;
  bool all_passed = false;
};

// Runs every check against the system and its boundary restrictions, plus
// inverted fault duals (a dual passes when the corrupted check fires).
SuiteResult run_verification_suite(const SlabSystem& sys,
                                   const std::string& label,
                                   const SuiteOptions& opts);

}  // namespace phslab

#endif
