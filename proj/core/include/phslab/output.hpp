#ifndef PHSLAB_OUTPUT_HPP
#define PHSLAB_OUTPUT_HPP

#include <string>
#include <vector>

#include "phslab/checks.hpp"
#include "phslab/ragged.hpp"
#include "phslab/semiconjugacy.hpp"
#include "phslab/tracing.hpp"

namespace phslab {

void write_text_file(const std::string& path, const std::string& content);

// Curve/fiber CSV: one vertex per row "v1,v2,x,y,s" where (v1,v2) tags the
// curve (fiber target or seed) and (x,y,s) is the vertex. A single leading
// comment line carries the run configuration.
std::string csv_polyline(const PlanePoint& tag,
                         const std::vector<SlabPoint>& vertices,
                         const std::string& config);
std::string csv_polyline_2d(const PlanePoint& tag,
                            const std::vector<PlanePoint>& vertices,
                            double s_face, const std::string& config);

struct GridRow {
  SlabPoint input;
  PlanePoint value;
};
std::string csv_grid(const std::vector<GridRow>& rows,
                     const std::string& config);

std::string fiber_json(const FiberSegment& fib, const std::string& config);
std::string curve_json(const TracedCurve& curve, const std::string& config);
std::string certificate_json(const PartialHyperbolicityCertificate& cert,
                             const std::string& config);
std::string suite_json(const SuiteResult& suite, const std::string& config);
std::string suite_table(const SuiteResult& suite);
std::string chart_json(const RaggedChart& chart,
                       const ConjugacyResidualReport& residual,
                       const std::string& orientation_note,
                       const std::string& config);
std::string profile_json(const RaggedProfile& prof, const std::string& config);

// Fiber images as vertical segments over the transect parameter, detected
// jumps highlighted; emitted directly, no plotting dependency.
std::string profile_svg(const RaggedProfile& prof, const std::string& title);

}  // namespace phslab

#endif
