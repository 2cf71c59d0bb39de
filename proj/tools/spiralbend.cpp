// spiralbend command line: one certification pipeline per invocation, JSON on
// stdout (or --out), optional SVG figure.
#include "spiralbend/spiralbend.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

using namespace spiralbend;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kConsistency = 3;

struct Common {
  bool json_only = false;
  std::string out;
  std::string svg;
  std::string config;
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

struct Args {
  // norms
  std::string family = "l2";
  std::string table;
  std::size_t samples = 10000;
  std::size_t grid = 4096;
  // bend
  double eps = 0.2;
  std::string z = "l2";
  std::size_t dim = 2;
  std::size_t pairs = 100000;
  double r = 1.0;
  double c = 4.0;
  // embed
  std::string cloud;
  bool contains_origin = false;
  // polygon
  std::string body = "disk";
  std::string radii;
  std::size_t k = 16;
  // capspace
  double delta = 0.1;
  std::size_t pool = 0;
  std::size_t validation = 20000;
  std::size_t triples = 100000;
  std::size_t witness_planes = 1000;
  std::string save;
  std::string load;
  // invariance
  std::size_t n1 = 2;
  std::size_t n2 = 2;
  bool extract = false;
  double tol = 1e-10;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

// Config keys are the long flag names; flags given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  const Json cfg = read_json_file(path);
  if (!cfg.is_object()) throw InvalidArgument("config must be a JSON object");
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config" || given.count(key)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back("--" + key);
    } else if (value.is_string()) {
      extra.push_back("--" + key);
      extra.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      extra.push_back("--" + key);
      extra.push_back(value.dump());
    } else {
      throw InvalidArgument("config key '" + key + "' must be a string, number or boolean");
    }
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

UncondNorm2 parse_z(const std::string& s) { return UncondNorm2::parse(s); }

Body2 parse_body(const std::string& s) {
  if (s == "disk") return Body2::disk();
  if (s == "l1" || s == "diamond") return Body2::diamond();
  if (s == "square" || s == "linf") return Body2::square();
  if (s == "superellipse") return Body2::superellipse(3.0);
  if (s.rfind("lp:", 0) == 0) {
    const auto z = UncondNorm2::parse(s);
    return Body2::lp_ball(z.lp_exponent());
  }
  throw InvalidArgument("unknown body '" + s + "' (disk, l1, square, superellipse, lp:<p>)");
}

struct Outcome {
  Json doc;
  int code = kPass;
  std::string svg;
};

Outcome cmd_norms(const Common& g, const Args& a) {
  const UncondNorm2 z = a.table.empty() ? parse_z(a.family) : tabulated_from_json(read_json_file(a.table));
  Outcome o{document("norms"), kPass, {}};
  o.doc["family"] = family_name(z.family());
  o.doc["name"] = z.name();
  NormConstants k = extremal_constants(z, a.grid);
  k.c_z = curve_lipschitz(z, a.grid);
  const auto v = validate_unconditional(z, a.samples, g.seed);
  const bool c_ok = k.c_z >= 2.0 / kPi - 1e-9 && k.c_z <= 4.0 + 1e-9;
  o.doc["constants"] = to_json(k);
  o.doc["c_z_in_range"] = c_ok;
  o.doc["validation"] = to_json(v);
  o.doc["pass"] = v.ok() && c_ok;
  o.code = v.ok() && c_ok ? kPass : kFail;
  return o;
}

Outcome cmd_bend(const Common& g, const Args& a) {
  const BendingMap t(BendingParams::make(a.eps, a.r, parse_z(a.z), a.dim, a.c));
  const auto chk = verify_distortion(t, a.pairs, g.seed);
  Outcome o{document("bend"), kPass, {}};
  o.doc["params"] = to_json(t.params());
  o.doc["pairs"] = a.pairs;
  o.doc["seed"] = g.seed;
  o.doc["check"] = to_json(chk);
  const bool norm_ok = chk.norm_defect <= 1e-10;
  o.doc["norm_preserved"] = norm_ok;
  o.doc["pass"] = chk.passed() && norm_ok;
  o.code = chk.passed() && norm_ok ? kPass : kFail;
  o.svg = bend_svg(t);
  return o;
}

Outcome cmd_embed(const Common& g, const Args& a) {
  if (a.cloud.empty()) throw InvalidArgument("embed needs --cloud <file>");
  Json cj = read_json_file(a.cloud);
  if (a.contains_origin && cj.is_object()) cj["contains_origin"] = true;
  PointCloud cloud = cloud_from_json(cj);
  const auto ps = choose_parameters(a.eps);
  EmbedOptions opt;
  opt.pairs.seed = g.seed;
  auto res = embed_cloud(std::move(cloud), build_schedule(ps.psi, a.eps, ps.d, 2, a.c), {parse_z(a.z)}, opt);
  Outcome o{document("embed"), kPass, {}};
  o.doc["eps_target"] = num(a.eps);
  o.doc["parameters"] = to_json(ps);
  o.doc["schedule"] = to_json(res.schedule, res.report.radii_used);
  o.doc["report"] = to_json(res.report);
  const bool ok = res.report.within_bound();
  o.doc["pass"] = ok;
  o.code = ok ? kPass : kFail;
  o.svg = schedule_svg(res.schedule);
  return o;
}

Outcome cmd_polygon(const Common&, const Args& a) {
  std::optional<Body2> body;
  RadialProfile prof;
  if (!a.radii.empty()) {
    const Json j = read_json_file(a.radii);
    std::vector<double> r;
    try {
      r = (j.is_object() ? j.at("radii") : j).get<std::vector<double>>();
    } catch (const Json::exception& e) {
      throw InvalidArgument(std::string("radii file must hold an array of numbers: ") + e.what());
    }
    prof = profile_from_samples(std::move(r));
  } else {
    body = parse_body(a.body);
    prof = sample_profile(*body, a.k);
  }
  const auto poly = build_polygon(prof);
  const auto cert = verify_containment(poly, prof, a.samples);
  Outcome o{document("polygon"), kPass, {}};
  o.doc["body"] = body ? body->name() : std::string("samples");
  o.doc["profile"] = to_json(prof);
  o.doc["polygon"] = to_json(poly);
  o.doc["certificate"] = to_json(cert);
  o.doc["pass"] = cert.certified;
  o.code = cert.certified ? kPass : kFail;
  if (body) o.svg = polygon_svg(*body, poly);
  return o;
}

Outcome cmd_capspace(const Common& g, const Args& a) {
  CapBuildOptions opt;
  opt.pool = a.pool;
  opt.validation = a.validation;
  const CapSpace4 c = a.load.empty() ? build_capspace(a.delta, g.seed, opt)
                                     : capspace_from_json(read_json_file(a.load));
  if (!a.save.empty()) write_text(a.save, dump(to_json(c)));
  const auto cert = certify_properties(c, a.samples, g.seed, a.triples);
  const auto sweep = witness_sweep(c, a.witness_planes, g.seed + 1);
  Outcome o{document("capspace"), kPass, {}};
  o.doc["delta"] = num(c.delta());
  o.doc["seed"] = c.seed();
  o.doc["sigma"] = num(c.sigma());
  o.doc["tau"] = num(c.tau());
  o.doc["caps"] = c.caps().size();
  o.doc["structured_caps"] = c.structured_count();
  o.doc["net"] = to_json(c.net());
  o.doc["properties"] = to_json(cert);
  o.doc["flatness_witnesses"] = to_json(sweep);
  o.doc["pass"] = cert.certified();
  o.code = cert.certified() ? kPass : kFail;
  return o;
}

Outcome cmd_invariance(const Common& g, const Args& a) {
  const auto z = parse_z(a.z);
  const auto ds = DirectSum::euclidean_blocks(a.n1, a.n2, z);
  const auto space = PairedSpace::from_direct_sum(ds);
  const auto d = invariance_defect(space, a.samples, g.seed);
  Outcome o{document("invariance"), kPass, {}};
  o.doc["z"] = z.name();
  o.doc["n1"] = a.n1;
  o.doc["n2"] = a.n2;
  o.doc["defect"] = to_json(d);
  bool ok = d.eps <= a.tol;
  if (a.extract) {
    ExtractOptions eo;
    eo.seed = g.seed;
    const auto ez = extract_z(space, eo);
    double err = 0.0;
    for (std::size_t j = 0; j < 256; ++j) {
      const double t = kHalfPi * static_cast<double>(j) / 255.0;
      err = std::max(err, std::abs(ez(std::cos(t), std::sin(t)) - z(std::cos(t), std::sin(t))));
    }
    o.doc["extraction"] = Json{{"grid", 256}, {"max_error", num(err)}};
    ok = ok && err <= 1e-9;
  }
  o.doc["pass"] = ok;
  o.code = ok ? kPass : kFail;
  return o;
}

void add_common(CLI::App* sub, Common& g) {
  sub->add_flag("--json-only", g.json_only, "suppress SVG output");
  sub->add_option("--out", g.out, "write JSON here instead of stdout");
  sub->add_option("--svg", g.svg, "SVG path (default <command>.svg)");
  sub->add_option("--config", g.config, "JSON file with flag values; command-line flags win");
  sub->add_option("--threads", g.threads, "thread cap")->check(CLI::PositiveNumber);
  sub->add_option("--seed", g.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiralbend: bending maps, annulus embeddings, polygon covers and cap-cut norms"};
  app.require_subcommand(1);
  Common g;
  Args a;

  auto* norms = app.add_subcommand("norms", "extremal and curve constants of a 2D unconditional norm");
  norms->add_option("--family", a.family, "l1, l1.5, l2, linf, lp:<p>");
  norms->add_option("--table", a.table, "JSON array of [angle, radius] pairs over [0, pi/2]");
  norms->add_option("--samples", a.samples, "validation samples")->check(CLI::PositiveNumber);
  norms->add_option("--grid", a.grid, "angular grid")->check(CLI::Range(256, 1 << 24));

  auto* bend = app.add_subcommand("bend", "sampled distortion of the bending map");
  bend->add_option("--eps", a.eps, "target distortion in (0,1)");
  bend->add_option("--Z", a.z, "combining norm");
  bend->add_option("--dim", a.dim, "dimension")->check(CLI::PositiveNumber);
  bend->add_option("--pairs", a.pairs, "sampled pairs")->check(CLI::PositiveNumber);
  bend->add_option("--r", a.r, "inner radius");
  bend->add_option("--c", a.c, "curve constant in [2/pi, 4]");

  auto* embed = app.add_subcommand("embed", "annulus-glued embedding of a point cloud");
  embed->add_option("--cloud", a.cloud, "JSON {dim, points}");
  embed->add_option("--eps", a.eps, "target distortion");
  embed->add_option("--Z", a.z, "combining norm");
  embed->add_option("--c", a.c, "curve constant in [2/pi, 4]");
  embed->add_flag("--contains-origin", a.contains_origin, "do not translate the cloud");

  auto* polygon = app.add_subcommand("polygon", "polygonal cover of a symmetric convex body");
  polygon->add_option("--body", a.body, "disk, l1, square, superellipse, lp:<p>");
  polygon->add_option("--radii", a.radii, "JSON array r_0..r_k instead of a body");
  polygon->add_option("--k", a.k, "number of levels")->check(CLI::Range(5, 1 << 20));
  polygon->add_option("--samples", a.samples, "boundary samples")->check(CLI::PositiveNumber);

  auto* cap = app.add_subcommand("capspace", "cap-cut norm on R^4 and its certificates");
  cap->add_option("--delta", a.delta, "cap radius in (0, 1/4)");
  cap->add_option("--pool", a.pool, "candidate planes for the net (0: automatic)");
  cap->add_option("--validation", a.validation, "planes for the covering radius");
  cap->add_option("--samples", a.samples, "samples per summand circle")->check(CLI::PositiveNumber);
  cap->add_option("--triples", a.triples, "norm-axiom triples")->check(CLI::PositiveNumber);
  cap->add_option("--witness-planes", a.witness_planes, "planes for flatness witnesses");
  cap->add_option("--save", a.save, "write the built space as JSON");
  cap->add_option("--load", a.load, "load a space instead of building one");

  auto* inv = app.add_subcommand("invariance", "orthogonal invariance of a Z-sum of Euclidean spaces");
  inv->add_option("--Z", a.z, "combining norm");
  inv->add_option("--n1", a.n1, "first summand dimension")->check(CLI::Range(1, 6));
  inv->add_option("--n2", a.n2, "second summand dimension")->check(CLI::Range(1, 6));
  inv->add_option("--samples", a.samples, "sampled points")->check(CLI::PositiveNumber);
  inv->add_flag("--extract", a.extract, "also recover Z and compare on a 256-point grid");
  inv->add_option("--tol", a.tol, "largest accepted defect");

  for (auto* sub : {norms, bend, embed, polygon, cap, inv}) add_common(sub, g);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "spiralbend: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  if (g.threads) set_thread_count(g.threads);
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Outcome o;
    if (name == "norms") o = cmd_norms(g, a);
    else if (name == "bend") o = cmd_bend(g, a);
    else if (name == "embed") o = cmd_embed(g, a);
    else if (name == "polygon") o = cmd_polygon(g, a);
    else if (name == "capspace") o = cmd_capspace(g, a);
    else o = cmd_invariance(g, a);
    if (g.out.empty()) std::cout << dump(o.doc);
    else write_text(g.out, dump(o.doc));
    if (!g.json_only && !o.svg.empty()) write_text(g.svg.empty() ? name + ".svg" : g.svg, o.svg);
    return o.code;
  } catch (const ConsistencyError& e) {
    std::cerr << "spiralbend: consistency failure: " << e.what() << "\n";
    return kConsistency;
  } catch (const ExtractionRefused& e) {
    std::cerr << "spiralbend: " << e.what() << "\n";
    return kFail;
  } catch (const InvalidArgument& e) {
    std::cerr << "spiralbend: " << e.what() << "\nrun 'spiralbend " << name << " --help' for usage\n";
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "spiralbend: " << e.what() << "\n";
    return kUsage;
  } catch (const ScheduleTooShort& e) {
    std::cerr << "spiralbend: consistency failure: " << e.what() << "\n";
    return kConsistency;
  } catch (const std::exception& e) {
    std::cerr << "spiralbend: internal error: " << e.what() << "\n";
    return kConsistency;
  }
}
