#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include "bouquet/error.hpp"
#include "bouquet/io.hpp"
#include "bouquet/sampling.hpp"
#include "bouquet/thermo.hpp"

namespace bouquet::cli {

PotentialSpec RunConfig::potential(bool require_admissible) const {
  try {
    return PotentialSpec::from_json(spec, require_admissible);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid potential: ") + e.what());
  }
}

nlohmann::json parse_c_law(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) throw ConfigError("bad number '" + s + "' in --c-law " + text);
    return x;
  };
  if (kind == "unit" && arg.empty()) return {{"kind", "unit"}};
  if (kind == "gaussian") return {{"kind", "gaussian"}, {"beta", arg.empty() ? 2.0 : number(arg)}};
  if (kind == "table" && !arg.empty()) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const auto comma = arg.find(',', start);
      values.push_back(number(arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return {{"kind", "table"}, {"values", values}, {"tail", {{"kind", "gaussian"}, {"beta", 2.0}}}};
  }
  throw ConfigError("unknown --c-law '" + text + "' (expected unit, gaussian[:beta] or table:c0,c1,...)");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"lambda", "spec",  "N",     "m",     "seed",    "tolerances",
                                              "output_dir", "m_max", "n_max", "radii", "count", "depth",
                                              "samples",    "sum_n_max"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  RunConfig c;
  try {
    c.lambda = j.value("lambda", c.lambda);
    if (j.contains("spec")) c.spec = j["spec"];
    c.n_level = j.value("N", c.n_level);
    c.depth = j.value("m", c.depth);
    c.seed = j.value("seed", c.seed);
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      c.backward_tolerance = t.value("backward_tolerance", c.backward_tolerance);
      c.eigen_tolerance = t.value("eigen_tolerance", c.eigen_tolerance);
    }
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.m_max = j.value("m_max", c.m_max);
    c.n_max = j.value("n_max", c.n_max);
    c.radii = j.value("radii", c.radii);
    c.count = j.value("count", c.count);
    c.hair_depth = j.value("depth", c.hair_depth);
    c.samples = j.value("samples", c.samples);
    c.sum_n_max = j.value("sum_n_max", c.sum_n_max);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

namespace {

struct Context {
  RunConfig config;
  ExpMapModel model;
  std::ostream& out;
  std::ostream& err;

  TruncationLevel level() const { return TruncationLevel(config.n_level); }
  std::filesystem::path file(const std::string& name) const { return config.output_dir / name; }
  EigenOptions eigen() const { return {config.eigen_tolerance, 100'000, Kernel::Parallel}; }
};

void validate(const RunConfig& c) {
  if (c.n_level < 1) throw ConfigError("N must be >= 1");
  if (c.depth < 1) throw ConfigError("m must be >= 1");
  if (c.m_max < 0) throw ConfigError("m_max must be >= 0");
  if (c.n_max < 1) throw ConfigError("n_max must be >= 1");
  if (c.count < 1) throw ConfigError("count must be >= 1");
  if (c.hair_depth < 1) throw ConfigError("depth must be >= 1");
  if (c.samples < 100) throw ConfigError("samples must be >= 100");
  if (c.sum_n_max < 4) throw ConfigError("sum_n_max must be >= 4");
  if (!(c.eigen_tolerance > 0.0)) throw ConfigError("eigen_tolerance must be > 0");
  if (c.radii.empty()) throw ConfigError("radii must be nonempty");
  for (std::size_t i = 1; i < c.radii.size(); ++i)
    if (!(c.radii[i] > c.radii[i - 1])) throw ConfigError("radii must be strictly increasing");
  try {
    cylinder_count(TruncationLevel(c.n_level), std::max(c.depth, c.m_max));
  } catch (const CapExceeded& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_endpoint(Context& ctx, const std::string& text) {
  Itinerary s;
  try {
    s = Itinerary::parse(text);
  } catch (const ParseError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (ctx.config.strict && !s.in(ctx.level())) {
    ctx.err << "error: itinerary " << s.to_string() << " has a symbol outside {-N..N}, N=" << ctx.config.n_level
            << "\n";
    return kUsage;
  }
  const HairPoint h = endpoint(ctx.model, s);
  ctx.out << "re=" << format_number(h.point.real()) << " im=" << format_number(h.point.imag())
          << " residual=" << format_number(h.residual) << " depth=" << h.depth_used << "\n";
  return kOk;
}

int cmd_pressure(Context& ctx) {
  const auto spec = ctx.config.potential();
  const int m_max = ctx.config.m_max > 0 ? ctx.config.m_max : ctx.config.depth;
  CsvTable table(ctx.file("pressure.csv"), {"route", "N", "m_or_n", "value", "residual", "envelope"});
  try {
    for (int n = 1; n <= ctx.config.n_level; ++n) {
      double previous = std::nan("");
      for (int m = 1; m <= m_max; ++m) {
        const auto op = build_operator(ctx.model, spec, TruncationLevel(n), m);
        const auto p = pressure_eigen(op, ctx.eigen());
        // depth increment as the discretization envelope
        table.row({"eigen", static_cast<long long>(n), static_cast<long long>(m), p.value, p.residual,
                   std::abs(p.value - previous)});
        previous = p.value;
      }
    }
    // iterates at 0̄, with four sampled base points for the distortion envelope
    ItinerarySampler sampler(ctx.level(), ctx.config.seed);
    std::vector<Itinerary> bases{Itinerary()};
    while (bases.size() < 5) bases.push_back(sampler.itinerary());
    const auto series = iterate_series(ctx.model, spec, ctx.level(), bases, ctx.config.n_max);
    double log_l = 0.0;
    for (double d : series.distortion) log_l = std::max(log_l, d);
    for (int n = 1; n <= ctx.config.n_max; ++n)
      table.row({"iterate", static_cast<long long>(ctx.config.n_level), static_cast<long long>(n),
                 series.log_sums[0][static_cast<std::size_t>(n) - 1] / n, 0.0, log_l / n});
  } catch (const CapExceeded& e) {
    table.abort(e.what());
    ctx.err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  table.finish();
  return kOk;
}

int cmd_measure(Context& ctx) {
  const auto spec = ctx.config.potential();
  const TruncationLevel level = ctx.level();
  const int m = ctx.config.depth;
  const auto op = build_operator(ctx.model, spec, level, m);
  const auto conformal = conformal_measure(op, ctx.eigen());
  const auto invariant = invariant_measure(op, conformal, 32, ctx.eigen());
  const double cesaro = invariant.cesaro_tv.back();

  nlohmann::json doc = {{"lambda", ctx.config.lambda},
                        {"spec", spec.to_json()},
                        {"N", level.value()},
                        {"m", m},
                        {"pressure", conformal.pressure.value},
                        {"theta", conformal.pressure.theta()},
                        {"weights", conformal.measure.weights},
                        {"invariant_weights", invariant.measure.weights},
                        {"conformality_residual", conformal.residual},
                        {"invariance_residual", invariant.invariance_residual},
                        {"cesaro_tv", invariant.cesaro_tv},
                        {"cesaro_flag", cesaro > 1e-6}};

  // Gibbs ratios against exp(W_r / (1 - r)) from the fitted variation
  CsvTable gibbs(ctx.file("gibbs.csv"), {"n", "prefix", "base", "ratio", "normalized", "envelope", "within"});
  if (m >= 2) {
    const auto constants = fit_shrinking_constants(ctx.model, level, 2000, ctx.config.seed);
    const auto variation =
        variation_report(ctx.model, spec, constants.delta_0, 8, ctx.config.samples, level, ctx.config.seed);
    const double envelope =
        variation.fitted_r < 1.0 ? std::exp(variation.w_r / (1.0 - variation.fitted_r)) : HUGE_VAL;
    const auto report = gibbs_check(ctx.model, spec, op, conformal.measure, conformal.pressure.value,
                                    std::max(1.0, envelope), 2000, 1, ctx.config.seed);
    for (const auto& r : report.ratios)
      gibbs.row({static_cast<long long>(r.prefix.size()), format_word(r.prefix), r.base.to_string(), r.ratio,
                 r.normalized, report.envelope,
                 std::string(r.normalized <= report.envelope && r.normalized >= 1.0 / report.envelope ? "yes" : "no")});
    doc["gibbs"] = {{"d_hat", report.d_hat}, {"envelope", report.envelope}, {"verdict", to_string(report.verdict)},
                    {"w_r", variation.w_r}, {"r", variation.fitted_r}};
  }
  gibbs.finish();

  std::vector<int> levels;
  for (int n = 1; n <= level.value(); ++n) levels.push_back(n);
  const auto tight = tightness_report(ctx.model, spec, levels, ctx.config.radii, m, 10, ctx.config.seed);
  CsvTable tightness(ctx.file("tightness.csv"), {"N", "R", "pressure", "measured", "bound", "holds", "note"});
  for (const auto& r : tight.rows)
    tightness.row({static_cast<long long>(r.n_level), r.radius, r.pressure, r.measured, r.bound,
                   std::string(r.holds ? "yes" : "no"), std::string("sampled sup, 10% inflation")});
  tightness.finish();
  doc["tightness"] = {{"all_hold", tight.all_hold}, {"bound_monotone", tight.bound_monotone}};
  write_json(ctx.file("measure.json"), doc);

  if (cesaro > 1e-6)
    ctx.err << "warning: Cesaro surrogate differs from h*nu by " << format_number(cesaro)
            << " in total variation at M=32\n";
  if (!(conformal.residual < 1e-10)) {
    ctx.err << "error: conformality residual " << format_number(conformal.residual) << " exceeds 1e-10\n";
    return kNumerical;
  }
  if (!(invariant.invariance_residual < 1e-10)) {
    ctx.err << "error: invariance residual " << format_number(invariant.invariance_residual) << " exceeds 1e-10\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_audit(Context& ctx) {
  const TruncationLevel level = ctx.level();
  const std::uint64_t seed = ctx.config.seed;
  ShrinkingConstants constants = fit_shrinking_constants(ctx.model, level, 2000, seed);
  ShrinkingConstants b1_constants = constants;
  if (ctx.config.broken_constants) {
    b1_constants.c_e = 1.0;
    b1_constants.lambda_e = 10.0;
  }
  std::vector<AuditResult> results;
  results.push_back(
      audit_b1(ctx.model, level, b1_constants, ctx.config.samples, seed + 1, {ctx.config.metric, 0.5}));
  results.push_back(audit_b2_mixing(ctx.model, level, constants, 50, seed + 2));
  results.push_back(audit_b3_chaining(ctx.model, level, constants, 100, seed + 3));
  results.push_back(audit_density(ctx.model, level, 100, seed + 4));
  results.push_back(audit_compactness(ctx.model, level, 10 * ctx.config.samples, seed + 5));

  CsvTable table(ctx.file("audit.csv"), {"axiom", "N", "samples", "worst_violation", "verdict", "notes"});
  bool failed = false;
  for (const auto& r : results) {
    table.row({to_string(r.axiom), static_cast<long long>(r.n_level), static_cast<long long>(r.samples),
               r.worst_violation, to_string(r.verdict), r.notes});
    ctx.out << to_string(r.axiom) << " " << to_string(r.verdict) << "\n";
    failed = failed || r.verdict == Verdict::Fail;
  }
  table.finish();
  return failed ? kNumerical : kOk;
}

// Σ_N itineraries in canonical order: 0̄, then w 0̄ for words of length
// 1, 2, ... in lexicographic order, skipping repeats.
std::vector<Itinerary> canonical_itineraries(TruncationLevel level, int count) {
  std::vector<Itinerary> out{Itinerary()};
  for (int d = 1; static_cast<int>(out.size()) < count; ++d) {
    const std::size_t words = cylinder_count(level, d);
    for (std::size_t i = 0; i < words && static_cast<int>(out.size()) < count; ++i) {
      const Word w = cylinder_word(i, level, d);
      if (w.back() == 0) continue;  // already listed at a shorter length
      out.push_back(Itinerary::representative(w));
    }
  }
  return out;
}

int cmd_hairs(Context& ctx) {
  CsvTable table(ctx.file("hairs.csv"), {"itinerary", "re", "im", "param_index"});
  std::size_t skipped = 0;
  for (const auto& s : canonical_itineraries(ctx.level(), ctx.config.count)) {
    std::vector<HairSample> hair;
    try {
      hair = sample_hair(ctx.model, s, ctx.config.hair_depth);
    } catch (const std::exception& e) {
      ctx.err << "skipped " << s.to_string() << ": " << e.what() << "\n";
      ++skipped;
      continue;
    }
    for (const auto& h : hair)
      table.row({s.to_string(), h.point.real(), h.point.imag(), static_cast<long long>(h.param_index)});
  }
  table.finish();
  if (skipped) ctx.err << skipped << " itineraries skipped\n";
  return kOk;
}

int cmd_summability(Context& ctx) {
  const auto spec = ctx.config.potential(false);
  const TruncationLevel level = ctx.level();
  ItinerarySampler sampler(level, ctx.config.seed);
  std::vector<Itinerary> samples{Itinerary()};
  while (samples.size() < 8) samples.push_back(sampler.itinerary());

  const auto sum = summability_check(ctx.model, spec, ctx.config.sum_n_max, samples);
  CsvTable table(ctx.file("summability.csv"), {"sample", "K", "partial_sum"});
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t k = 0; k < sum.partial_sums[i].size(); ++k)
      table.row({samples[i].to_string(), static_cast<long long>(k + 1), sum.partial_sums[i][k]});
  table.finish();

  const auto rapid = rapid_decrease_check(ctx.model, spec, ctx.config.radii, 10, ctx.config.seed);
  CsvTable tails(ctx.file("rapid_decrease.csv"), {"R", "tail_sum", "symbols"});
  for (std::size_t i = 0; i < rapid.radii.size(); ++i)
    tails.row({rapid.radii[i], rapid.tail_sums[i], static_cast<long long>(rapid.contributing[i])});
  tails.finish();

  const auto ball = bounded_on_balls_check(ctx.model, spec, ctx.config.radii.back(), level, 2000, ctx.config.seed);

  ctx.out << "summable " << to_string(sum.verdict) << " (" << sum.note << ")\n"
          << "rapidly_decreasing " << to_string(rapid.verdict) << " (" << rapid.note << ")\n"
          << "bounded_on_balls " << to_string(ball.verdict) << " (sup " << format_number(ball.sup_abs_phi) << ")\n";
  const bool failed =
      sum.verdict == Verdict::Fail || rapid.verdict == Verdict::Fail || ball.verdict == Verdict::Fail;
  return failed ? kNumerical : kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic formalism for hyperbolic exponential maps lambda*e^z", "bouquet"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, c_law, metric;
  std::optional<double> lambda, t, tau, constant;
  std::optional<int> n_level, depth, count, hair_depth;
  bool strict = false, broken = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--lambda", lambda, "map parameter in (0, 1/e)");
  app.add_option("--N", n_level, "truncation level");
  app.add_option("--m", depth, "cylinder depth");
  app.add_option("--t", t, "potential exponent");
  app.add_option("--tau", tau, "theta-derivative exponent");
  app.add_option("--c-law", c_law, "unit | gaussian[:beta] | table:c0,c1,...");
  app.add_option("--constant", constant, "use the constant potential phi = value");
  app.add_flag("--strict", strict, "reject itineraries outside Sigma_N");
  app.add_option("--metric", metric, "induced | natural (audit)");
  app.add_flag("--inject-broken-constants", broken, "audit B1 with C_E = 1, lambda_E = 10");

  std::string itinerary;
  auto* endpoint_cmd = app.add_subcommand("endpoint", "endpoint of the hair of an itinerary");
  endpoint_cmd->add_option("itinerary", itinerary, "text form pre|per, e.g. 3,1|0")->required();
  auto* pressure_cmd = app.add_subcommand("pressure", "pressure by eigenvector and by iterates");
  auto* measure_cmd = app.add_subcommand("measure", "conformal and invariant measures with Gibbs and tightness");
  auto* audit_cmd = app.add_subcommand("audit", "metric-space audits");
  auto* hairs_cmd = app.add_subcommand("hairs", "sample points along hairs");
  hairs_cmd->add_option("--count", count, "number of itineraries");
  hairs_cmd->add_option("--depth", hair_depth, "points per hair");
  auto* summability_cmd = app.add_subcommand("summability", "admissibility checks of the potential");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::optional<Context> ctx;
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (lambda) config.lambda = *lambda;
    if (n_level) config.n_level = *n_level;
    if (depth) config.depth = *depth;
    if (count) config.count = *count;
    if (hair_depth) config.hair_depth = *hair_depth;
    if (constant) {
      config.spec = {{"constant", *constant}};
    } else {
      if (config.spec.contains("constant") && (t || tau || c_law))
        throw ConfigError("--t, --tau and --c-law do not apply to a constant potential");
      if (t) config.spec["t"] = *t;
      if (tau) config.spec["tau"] = *tau;
      if (c_law) config.spec["c_law"] = parse_c_law(*c_law);
    }
    if (metric) {
      if (*metric == "natural")
        config.metric = MetricKind::Natural;
      else if (*metric != "induced")
        throw ConfigError("--metric must be induced or natural");
    }
    config.strict = strict;
    config.broken_constants = broken;
    validate(config);
    if (!summability_cmd->parsed()) config.potential();
    ExpMapModel model = build_model(config.lambda, config.backward_tolerance);
    ctx.emplace(Context{std::move(config), model, out, err});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (endpoint_cmd->parsed()) return cmd_endpoint(*ctx, itinerary);
    if (pressure_cmd->parsed()) return cmd_pressure(*ctx);
    if (measure_cmd->parsed()) return cmd_measure(*ctx);
    if (audit_cmd->parsed()) return cmd_audit(*ctx);
    if (hairs_cmd->parsed()) return cmd_hairs(*ctx);
    if (summability_cmd->parsed()) return cmd_summability(*ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace bouquet::cli
