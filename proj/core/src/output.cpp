#include "phslab/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phslab/errors.hpp"

namespace phslab {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json point_json(const SlabPoint& p) {
  return json{p.v.x(), p.v.y(), p.s};
}

json config_as_json(const std::string& config) {
  if (config.empty()) return json::object();
  return json::parse(config);
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("failed writing output file: " + path);
}

std::string csv_polyline(const PlanePoint& tag,
                         const std::vector<SlabPoint>& vertices,
                         const std::string& config) {
  std::ostringstream out;
  if (!config.empty()) out << "# config " << config << "\n";
  out << "v1,v2,x,y,s\n";
  for (const auto& p : vertices) {
    out << num(tag.x()) << ',' << num(tag.y()) << ',' << num(p.v.x()) << ','
        << num(p.v.y()) << ',' << num(p.s) << "\n";
  }
  return out.str();
}

std::string csv_polyline_2d(const PlanePoint& tag,
                            const std::vector<PlanePoint>& vertices,
                            double s_face, const std::string& config) {
  std::ostringstream out;
  if (!config.empty()) out << "# config " << config << "\n";
  out << "v1,v2,x,y,s\n";
  for (const auto& p : vertices) {
    out << num(tag.x()) << ',' << num(tag.y()) << ',' << num(p.x()) << ','
        << num(p.y()) << ',' << num(s_face) << "\n";
  }
  return out.str();
}

std::string csv_grid(const std::vector<GridRow>& rows,
                     const std::string& config) {
  std::ostringstream out;
  if (!config.empty()) out << "# config " << config << "\n";
  out << "x,y,s,hx,hy\n";
  for (const auto& r : rows) {
    out << num(r.input.v.x()) << ',' << num(r.input.v.y()) << ','
        << num(r.input.s) << ',' << num(r.value.x()) << ','
        << num(r.value.y()) << "\n";
  }
  return out.str();
}

std::string fiber_json(const FiberSegment& fib, const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["v"] = {fib.v.x(), fib.v.y()};
  j["arclength"] = fib.arclength();
  j["endpoint_faces"] = {fib.endpoint_faces[0], fib.endpoint_faces[1]};
  j["max_residual"] = fib.max_residual;
  j["max_tangent_angle"] = fib.max_tangent_angle;
  j["degenerate"] = fib.degenerate;
  json verts = json::array();
  for (const auto& p : fib.vertices) verts.push_back(point_json(p));
  j["vertices"] = std::move(verts);
  j["arclengths"] = fib.arclengths;
  return j.dump(2);
}

std::string curve_json(const TracedCurve& curve, const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["bundle"] = to_string(curve.bundle);
  j["step"] = curve.step;
  j["length"] = curve.length();
  j["max_tangent_angle"] = curve.max_tangent_angle;
  json verts = json::array();
  for (const auto& p : curve.vertices) verts.push_back(point_json(p));
  j["vertices"] = std::move(verts);
  return j.dump(2);
}

std::string certificate_json(const PartialHyperbolicityCertificate& cert,
                             const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["pass"] = cert.pass;
  j["gap_center_over_stable"] = cert.gap_center_over_stable;
  j["gap_unstable_over_center"] = cert.gap_unstable_over_center;
  j["min_unstable_expansion"] = cert.min_unstable_expansion;
  j["min_stable_contraction"] = cert.min_stable_contraction;
  j["grid_points"] = cert.grid_points;
  j["worst_point"] = point_json(cert.worst_point);
  return j.dump(2);
}

namespace {

json report_json(const CheckReport& r) {
  json j;
  j["check_id"] = r.check_id;
  j["target"] = r.target;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["margin"] = r.margin;
  j["tol"] = r.tol_used;
  j["seed"] = r.seed;
  j["fault_injected"] = r.fault_injected;
  j["worst_witness"] = r.worst_witness;
  j["pass"] = r.passed();
  return j;
}

}  // namespace

std::string suite_json(const SuiteResult& suite, const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["all_passed"] = suite.all_passed;
  if (suite.certificate_ran) {
    j["certificate"] = json::parse(certificate_json(suite.certificate, ""));
  }
  json reports = json::array();
  for (const auto& r : suite.reports) reports.push_back(report_json(r));
  j["reports"] = std::move(reports);
  return j.dump(2);
}

std::string suite_table(const SuiteResult& suite) {
  std::ostringstream out;
  char buf[256];
  if (suite.certificate_ran) {
    std::snprintf(buf, sizeof(buf),
                  "%-34s %-24s %8s %10s  %s\n", "check", "target", "samples",
                  "violations", "result");
    out << buf;
    std::snprintf(
        buf, sizeof(buf), "%-34s %-24s %8s %10s  %s  (gaps %.3f %.3f %.3f %.3f)\n",
        "partial-hyperbolicity", "grid", "-", "-",
        suite.certificate.pass ? "pass" : "FAIL",
        suite.certificate.gap_center_over_stable,
        suite.certificate.gap_unstable_over_center,
        suite.certificate.min_unstable_expansion,
        suite.certificate.min_stable_contraction);
    out << buf;
  }
  for (const auto& r : suite.reports) {
    std::snprintf(buf, sizeof(buf), "%-34s %-24s %8ld %10ld  %s\n",
                  r.check_id.c_str(), r.target.c_str(), r.samples,
                  r.violations, r.passed() ? "pass" : "FAIL");
    out << buf;
  }
  out << (suite.all_passed ? "suite: PASS\n" : "suite: FAIL\n");
  return out.str();
}

std::string chart_json(const RaggedChart& chart,
                       const ConjugacyResidualReport& residual,
                       const std::string& orientation_note,
                       const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["T"] = chart.T;
  j["grid"] = {chart.grid.n1, chart.grid.n2, chart.grid.ns};
  j["min_output_separation"] = chart.min_output_separation;
  j["orientation"] = orientation_note;
  j["residual"] = {{"max", residual.max_residual},
                   {"mean", residual.mean_residual},
                   {"histogram_log10", residual.histogram},
                   {"samples", residual.samples}};
  json phi = json::array();
  for (const auto& s : residual.phi_samples) {
    phi.push_back({s[0], s[1], s[2], s[3]});
  }
  j["phi_samples"] = std::move(phi);
  json entries = json::array();
  for (const auto& e : chart.entries) {
    entries.push_back({e.input.v.x(), e.input.v.y(), e.input.s,
                       e.h_plane.x(), e.h_plane.y(), e.p});
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

std::string profile_json(const RaggedProfile& prof, const std::string& config) {
  json j;
  j["config"] = config_as_json(config);
  j["t"] = prof.t;
  json vs = json::array();
  for (const auto& v : prof.v) vs.push_back({v.x(), v.y()});
  j["v"] = std::move(vs);
  j["arclength"] = prof.arclength;
  j["p_lo"] = prof.p_lo;
  j["p_hi"] = prof.p_hi;
  j["jumps"] = prof.jumps;
  j["median_step"] = prof.median_step;
  j["max_step"] = prof.max_step;
  return j.dump(2);
}

std::string profile_svg(const RaggedProfile& prof, const std::string& title) {
  const double W = 900.0, Hh = 520.0;
  const double ml = 70.0, mr = 30.0, mt = 50.0, mb = 50.0;
  const double plot_w = W - ml - mr, plot_h = Hh - mt - mb;
  const std::size_t n = prof.t.size();

  auto X = [&](double t) { return ml + t * plot_w; };
  auto Y = [&](double p) { return mt + (1.0 - p) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << Hh << "\" viewBox=\"0 0 " << W << " " << Hh
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";

  // axes
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + plot_h << "\"/>\n";
  out << "</g>\n";
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << Hh - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">transect parameter</text>\n";
  out << "<text x=\"20\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 20 "
      << mt + plot_h / 2 << ")\">averaged height p</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double p = k / 4.0;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(p) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << p << "</text>\n";
  }

  // fiber images as vertical segments
  out << "<g stroke=\"#2060b0\" stroke-width=\"1.4\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << "<line x1=\"" << X(prof.t[i]) << "\" y1=\"" << Y(prof.p_lo[i])
        << "\" x2=\"" << X(prof.t[i]) << "\" y2=\"" << Y(prof.p_hi[i])
        << "\"/>\n";
  }
  out << "</g>\n";

  // detected jumps
  out << "<g class=\"jumps\" fill=\"none\" stroke=\"#d03020\" "
         "stroke-width=\"2\">\n";
  for (long j : prof.jumps) {
    if (j <= 0 || static_cast<std::size_t>(j) >= n) continue;
    const double x =
        0.5 * (X(prof.t[static_cast<std::size_t>(j) - 1]) +
               X(prof.t[static_cast<std::size_t>(j)]));
    out << "<circle class=\"jump\" cx=\"" << x << "\" cy=\""
        << Y(0.5 * (prof.p_lo[static_cast<std::size_t>(j)] +
                    prof.p_hi[static_cast<std::size_t>(j)]))
        << "\" r=\"9\"/>\n";
  }
  out << "</g>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace phslab
