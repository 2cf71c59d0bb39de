#pragma once

#include "spiralbend/annulus_embed.hpp"
#include "spiralbend/bending.hpp"
#include "spiralbend/capspace.hpp"
#include "spiralbend/harness.hpp"
#include "spiralbend/invariance.hpp"
#include "spiralbend/norms2d.hpp"
#include "spiralbend/polygon_cover.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace spiralbend {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "spiralbend/1";

// Every document starts with the schema tag and its kind.
inline Json document(const std::string& kind) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = kind;
  return j;
}

// Doubles round-trip exactly; non-finite values become strings.
inline Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double read_num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidArgument("expected a number");
}

inline Json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

inline Json to_json(const NormConstants& c) {
  return Json{{"m_z", num(c.m_z)}, {"M_z", num(c.M_z)}, {"c_z", num(c.c_z)}, {"grid", c.grid},
              {"tolerance", num(c.tolerance)}};
}

inline Json to_json(const ValidationReport& r) {
  return Json{{"ok", r.ok()},
              {"samples", r.samples},
              {"seed", r.seed},
              {"tolerance", num(r.tolerance)},
              {"normalization", num(r.normalization)},
              {"sign_symmetry", num(r.sign_symmetry)},
              {"homogeneity", num(r.homogeneity)},
              {"triangle", num(r.triangle)},
              {"sandwich", num(r.sandwich)},
              {"worst", num(r.worst)},
              {"failures", r.failures}};
}

inline Json to_json(const DistortionReport& r) {
  return Json{{"min_ratio", num(r.min_ratio)},     {"max_ratio", num(r.max_ratio)},
              {"distortion", num(r.distortion)},   {"argmin", r.argmin},
              {"argmax", r.argmax},                {"pair_count", r.pair_count},
              {"seed", r.seed},                    {"exhaustive", r.exhaustive},
              {"non_embedding", r.non_embedding}};
}

inline Json to_json(const BendingParams& p) {
  return Json{{"eps", num(p.eps)},         {"r", num(p.r.value)}, {"log_r", num(p.r.log_value)},
              {"R", num(p.R.value)},       {"log_R", num(p.R.log_value)},
              {"c", num(p.c)},             {"z", p.z.name()},     {"dim", p.dim}};
}

inline Json to_json(const BendingCheck& c) {
  return Json{{"passed", c.passed()},
              {"eps", num(c.eps)},
              {"ratios", to_json(c.ratios)},
              {"violations", c.violations},
              {"str_checked", c.str_checked},
              {"str_violations", c.str_violations},
              {"str_worst", num(c.str_worst)},
              {"norm_defect", num(c.norm_defect)},
              {"worst_radii", {num(c.worst_radii[0]), num(c.worst_radii[1])}}};
}

inline Json to_json(const Bracket& b) {
  return Json{{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"quotient", num(b.quotient())}};
}

inline Json to_json(const CaseBounds& b) {
  return Json{{"same_odd", to_json(b.same_odd)},
              {"same_even", to_json(b.same_even)},
              {"far_apart", to_json(b.far_apart)},
              {"overall", num(b.overall)},
              {"max_case_quotient", num(b.max_case_quotient)}};
}

inline Json to_json(const ParamSet& p) {
  return Json{{"eps", num(p.eps)}, {"gamma", num(p.gamma)},         {"psi", num(p.psi)},
              {"zeta", num(p.zeta)}, {"d", p.d}, {"gamma_product", num(p.gamma_product)},
              {"bounds", to_json(p.bounds)}};
}

inline Json to_json(const RadiusSchedule& s, std::size_t upto) {
  Json logs = Json::array();
  for (std::size_t j = 1; j <= std::min(upto, s.size()); ++j) logs.push_back(num(s[j].log_value));
  return Json{{"psi", num(s.psi())},
              {"eps", num(s.eps())},
              {"d", num(s.d())},
              {"c", num(s.c())},
              {"bend_log_ratio", num(s.bend_log_ratio())},
              {"gap_log_ratio", num(s.gap_log_ratio())},
              {"log_radii", logs}};
}

inline Json to_json(const EmbeddingReport& r) {
  std::vector<std::size_t> counts(4, 0);
  for (const auto& c : r.charts) ++counts[std::min<std::size_t>(c.size(), 3)];
  Json j{{"within_bound", r.within_bound()},
         {"bound", num(r.bound)},
         {"distortion", to_json(r.distortion)},
         {"bounds", to_json(r.bounds)},
         {"points", r.charts.size()},
         {"points_in_two_charts", counts[2]},
         {"overlap_points", r.overlap_points},
         {"overlap_max_diff", num(r.overlap_max_diff)},
         {"overlap_consistent", r.overlap_consistent},
         {"norm_defect", num(r.norm_defect)},
         {"radii_used", r.radii_used}};
  j["translation"] = r.translation ? vec_json(*r.translation) : Json(nullptr);
  return j;
}

inline Json to_json(const InvarianceDefect& d) {
  return Json{{"eps", num(d.eps)},
              {"max_ratio", num(d.max_ratio)},
              {"min_ratio", num(d.min_ratio)},
              {"samples", d.samples},
              {"refinement_evals", d.refinement_evals},
              {"seed", d.seed},
              {"worst_y1", vec_json(d.worst_y1)},
              {"worst_y2", vec_json(d.worst_y2)}};
}

inline Json to_json(const NetBounds& b) { return Json{{"lower", num(b.lower)}, {"upper", num(b.upper)}}; }

inline Json to_json(const RadialProfile& p) {
  Json r = Json::array();
  for (double v : p.r) r.push_back(num(v));
  return Json{{"k", p.k}, {"delta", num(p.delta)}, {"flat_top", p.flat_top}, {"radii", r}};
}

inline Json point_json(Point2 p) { return Json::array({num(p.x), num(p.y)}); }

inline Json to_json(const CoverPolygon& c) {
  Json chain = Json::array();
  for (auto p : c.chain()) chain.push_back(point_json(p));
  Json deg = Json::array();
  for (auto i : c.degenerate) deg.push_back(i);
  return Json{{"k", c.k},       {"delta", num(c.delta)}, {"omega", num(c.omega)},
              {"sharp_top", c.sharp_top}, {"alpha", num(c.alpha)}, {"chain", chain},
              {"degenerate", deg}};
}

inline Json to_json(const ContainmentCertificate& c) {
  Json clauses = Json::array();
  for (const auto& cl : c.clauses)
    clauses.push_back(Json{{"name", cl.name}, {"index", cl.index}, {"lhs", num(cl.lhs)},
                           {"rhs", num(cl.rhs)}, {"holds", cl.holds}});
  Json ce = Json::array();
  for (auto p : c.counterexamples) ce.push_back(point_json(p));
  return Json{{"certified", c.certified},
              {"omega", num(c.omega)},
              {"max_vertex_gauge", num(c.max_vertex_gauge)},
              {"max_sample_gauge", num(c.max_sample_gauge)},
              {"samples", c.samples},
              {"failed_clauses", c.failed_clauses()},
              {"clauses", clauses},
              {"counterexamples", ce}};
}

inline Json to_json(const RadialReport& r) {
  return Json{{"ok", r.ok()},
              {"worst_concavity", num(r.worst_concavity)},
              {"worst_evenness", num(r.worst_evenness)},
              {"worst_increase", num(r.worst_increase)},
              {"violations", r.violations}};
}

inline Json to_json(const IntervalCertificate& c) {
  Json iv = Json::array();
  for (const auto& i : c.intervals)
    iv.push_back(Json{{"level", i.level}, {"inner_gauge", num(i.inner_gauge)},
                      {"outer_gauge", num(i.outer_gauge)}, {"crossing", num(i.crossing)}, {"ok", i.ok}});
  return Json{{"certified", c.certified},
              {"hypothesis_ok", c.hypothesis_ok},
              {"omega", num(c.omega)},
              {"top_error", num(c.top_error)},
              {"failing_level", c.failing_level ? Json(*c.failing_level) : Json(nullptr)},
              {"contains_a", num(c.contains_a)},
              {"max_gauge", num(c.max_gauge)},
              {"samples", c.samples},
              {"intervals", iv}};
}

inline Json to_json(const SectionCertificate& s) {
  return Json{{"certified", s.certified}, {"delta", num(s.delta)}, {"radial", to_json(s.radial)},
              {"interval", to_json(s.interval)}};
}

inline Json to_json(const NetInfo& n) {
  Json unc = Json::array();
  for (auto i : n.uncapped) unc.push_back(i);
  return Json{{"size", std::max(n.members, n.planes.size())},
              {"pool", n.pool},
              {"validation", n.validation},
              {"separation", num(n.separation)},
              {"covering_radius", num(n.covering_radius)},
              {"covering_achieved", n.covering_achieved},
              {"uncapped", unc}};
}

// Full cap space: reloading it gives a bit-identical norm.
inline Json to_json(const CapSpace4& c) {
  Json caps = Json::array();
  for (const auto& cap : c.caps())
    caps.push_back(Json{{"w", vec_json(cap.w)}, {"h", num(cap.h)}, {"structured", cap.structured}});
  Json j = document("capspace");
  j["delta"] = num(c.delta());
  j["seed"] = c.seed();
  j["sigma"] = num(c.sigma());
  j["tau"] = num(c.tau());
  j["a"] = num(c.a());
  j["net"] = to_json(c.net());
  j["structured_caps"] = c.structured_count();
  j["caps"] = caps;
  return j;
}

inline CapSpace4 capspace_from_json(const Json& j) {
  try {
    if (j.at("schema") != kSchema) throw InvalidArgument("unsupported schema");
    std::vector<CapSpec> caps;
    for (const auto& c : j.at("caps")) {
      CapSpec s;
      const auto& w = c.at("w");
      require(w.is_array() && w.size() == 4, "cap centre must have 4 entries");
      for (int i = 0; i < 4; ++i) s.w[i] = read_num(w[static_cast<std::size_t>(i)]);
      s.h = read_num(c.at("h"));
      s.structured = c.at("structured").get<bool>();
      caps.push_back(s);
    }
    NetInfo net;
    const auto& n = j.at("net");
    net.members = n.at("size").get<std::size_t>();
    net.pool = n.at("pool").get<std::size_t>();
    net.validation = n.at("validation").get<std::size_t>();
    net.separation = read_num(n.at("separation"));
    net.covering_radius = read_num(n.at("covering_radius"));
    net.covering_achieved = n.at("covering_achieved").get<bool>();
    for (const auto& u : n.at("uncapped")) net.uncapped.push_back(u.get<std::size_t>());
    return CapSpace4(read_num(j.at("delta")), j.at("seed").get<std::uint64_t>(), std::move(caps), net);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed cap space: ") + e.what());
  }
}

inline Json to_json(const PropertyCertificate& c) {
  return Json{{"certified", c.certified()},
              {"isometric_summands", c.isometric_ok},
              {"norm_one_projections", c.projection_ok},
              {"norm_equivalence", c.sandwich_ok},
              {"norm_axioms", c.axioms_ok},
              {"plane_samples", c.plane_samples},
              {"samples", c.samples},
              {"triples", c.triples},
              {"iso_error", num(c.iso_error)},
              {"cap_clearance", num(c.cap_clearance)},
              {"proj_max_ratio", num(c.proj_max_ratio)},
              {"proj_equality", c.proj_equality},
              {"ratio_min", num(c.ratio_min)},
              {"ratio_max", num(c.ratio_max)},
              {"sandwich_slack", num(c.sandwich_slack)},
              {"triangle_worst", num(c.triangle_worst)},
              {"homogeneity_worst", num(c.homogeneity_worst)},
              {"symmetry_worst", num(c.symmetry_worst)},
              {"counterexamples", c.counterexamples.size()},
              {"not_euclidean_constant", "not certified: exists only by compactness"}};
}

inline Json to_json(const FlatnessWitness& w) {
  Json j{{"precondition_ok", w.precondition_ok}, {"omega1", num(w.omega1)}, {"omega2", num(w.omega2)},
         {"found", w.found},                     {"margin", num(w.margin)}};
  if (w.found) {
    j["cap"] = w.cap;
    j["u"] = vec_json(w.u);
    j["v"] = vec_json(w.v);
    j["midpoint_norm"] = num(w.midpoint_norm);
    j["chord"] = num(w.chord);
  }
  return j;
}

inline Json to_json(const WitnessSweep& w) {
  Json sm = Json::array();
  for (double m : w.shortfall_margins) sm.push_back(num(m));
  return Json{{"gamma", num(w.gamma)},
              {"planes", w.planes},
              {"found", w.found},
              {"rate", num(w.rate())},
              {"rejected_draws", w.rejected},
              {"min_margin", num(w.min_margin)},
              {"worst_unit_error", num(w.worst_midpoint_error)},
              {"shortfall_margins", sm}};
}

inline Json to_json(const GordonResult& g) {
  return Json{{"values", g.values}, {"first_below_one", g.first_below_one}, {"final", g.final_value()}};
}

inline Json to_json(const ComponentBoundReport& r) {
  return Json{{"ok", r.ok()},       {"clause", r.clause}, {"omega1", num(r.omega1)},
              {"omega2", num(r.omega2)}, {"samples", r.samples}, {"worst", num(r.worst)},
              {"slack", num(r.slack)}};
}

inline Json to_json(const ColoringProfile& p) {
  return Json{{"gamma", num(p.gamma)},
              {"length", num(p.length)},
              {"samples", p.params.size()},
              {"blue", num(p.blue)},
              {"yellow", num(p.yellow)},
              {"neither", num(p.neither)},
              {"flagged", p.flagged.size()},
              {"ftc_residual", num(p.ftc_residual)},
              {"chord_ratio", num(p.chord_ratio)},
              {"zero_crossing", p.zero_crossing ? num(*p.zero_crossing) : Json(nullptr)}};
}

inline Json to_json(const PreconditionReport& r) {
  return Json{{"gamma", num(r.gamma)},
              {"eps", num(r.eps)},
              {"delta", num(r.delta)},
              {"gamma_cap", num(r.gamma_cap)},
              {"gamma_ok", r.gamma_ok},
              {"eps_ok", r.eps_ok},
              {"eps_gamma_note", "eps(gamma) exists by compactness and is not computed"},
              {"delta_ok", r.delta_ok},
              {"lhs", num(r.lhs)},
              {"cube_bound", num(r.cube_bound)},
              {"bending_bound", num(r.bending_bound)},
              {"bending_inequality", r.bending_inequality},
              {"chained_inequality", r.chained_inequality},
              {"contradiction", r.contradiction()}};
}

// { "dim": n, "points": [[...], ...], "contains_origin": optional bool }.
inline PointCloud cloud_from_json(const Json& j) {
  PointCloud c;
  try {
    if (!j.is_object()) throw InvalidArgument("cloud must be a JSON object");
    const auto& d = j.at("dim");
    if (!d.is_number_integer() || d.get<long long>() < 1) throw InvalidArgument("cloud dim must be a positive integer");
    c.dim = d.get<std::size_t>();
    const auto& pts = j.at("points");
    if (!pts.is_array()) throw InvalidArgument("cloud points must be an array");
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != c.dim) throw InvalidArgument("cloud point has wrong dimension");
      Vec v(static_cast<Eigen::Index>(c.dim));
      for (std::size_t i = 0; i < c.dim; ++i) {
        if (!p[i].is_number()) throw InvalidArgument("cloud coordinates must be numbers");
        v[static_cast<Eigen::Index>(i)] = p[i].get<double>();
      }
      c.points.push_back(std::move(v));
    }
    if (j.contains("contains_origin")) c.contains_origin = j.at("contains_origin").get<bool>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed cloud: ") + e.what());
  }
  c.validate();
  return c;
}

inline Json to_json(const PointCloud& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(vec_json(p));
  Json j{{"dim", c.dim}, {"points", pts}};
  if (c.contains_origin) j["contains_origin"] = true;
  return j;
}

// [[angle, radius], ...] with angles strictly increasing over [0, pi/2].
inline UncondNorm2 tabulated_from_json(const Json& j) {
  const Json& arr = j.is_object() && j.contains("table") ? j.at("table") : j;
  if (!arr.is_array()) throw InvalidArgument("tabulated norm must be an array of [angle, radius] pairs");
  std::vector<double> a, r;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw InvalidArgument("tabulated entries must be [angle, radius] pairs");
    a.push_back(e[0].get<double>());
    r.push_back(e[1].get<double>());
  }
  return UncondNorm2::tabulated(std::move(a), std::move(r));
}

inline Json tabulated_to_json(const UncondNorm2& z) {
  const auto* t = z.table();
  require(t != nullptr, "norm is not tabulated");
  Json arr = Json::array();
  for (std::size_t i = 0; i < t->angles.size(); ++i) arr.push_back(Json::array({t->angles[i], t->radii[i]}));
  return arr;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("invalid JSON in " + path + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace spiralbend
