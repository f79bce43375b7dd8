#include "levyshe/cli.hpp"

#include "levyshe/config.hpp"
#include "levyshe/emit.hpp"
#include "levyshe/errors.hpp"
#include "levyshe/levy_kernel.hpp"
#include "levyshe/malliavin.hpp"
#include "levyshe/mc_stats.hpp"
#include "levyshe/mild_solver.hpp"
#include "levyshe/noise_field.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

namespace levyshe {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Outcome
{
  std::vector<Row> rows;
  Json extra = Json::object();
  std::size_t replicas_requested = 0;
  std::size_t replicas_used = 0;
  std::vector<BlowUpRecord> blowups;
};

LevyExponent make_exponent(const Settings& s)
{
  if (s.raw("exponent") == "power")
    return make_power_exponent(s.real("c"), s.real("alpha"), s.real("drift"));
  return make_mixed_exponent(s.real("c"), s.real("alpha"), s.real("c2"), s.real("beta"));
}

GridSpec make_grid(const Settings& s)
{
  GridSpec g{ static_cast<std::size_t>(s.integer("m_space")),
              static_cast<std::size_t>(s.integer("k_time")), s.real("horizon") };
  g.validate();
  return g;
}

SigmaSpec make_sigma(const Settings& s)
{
  if (s.raw("sigma") == "const")
    return constant_sigma(s.real("sigma_a"));
  return sine_sigma(s.real("sigma_a"), s.real("sigma_b"));
}

SpectralField make_u0(const GridSpec& g, const Settings& s)
{
  const double a = s.real("u0_value");
  if (s.raw("u0") == "const")
    return SpectralField::from_values(std::vector<double>(g.m_space, a));
  const double mode = static_cast<double>(s.integer("u0_mode"));
  return sample_field(g.m_space, [=](double x) { return a * std::cos(mode * x); });
}

std::vector<GridProbe> make_probes(const GridSpec& g, const Settings& s,
                                   const std::string& key)
{
  std::vector<GridProbe> out;
  for (const auto& [t, x] : s.points(key))
    out.push_back(probe_at(g, t, x));
  if (out.empty())
    throw ConfigError("key '" + key + "' needs at least one point");
  return out;
}

bool has_key(const Settings& s, const std::string& key)
{
  for (const auto& k : s.schema())
    if (k.name == key)
      return true;
  return false;
}

RunConfig make_run(const Settings& s)
{
  const GridSpec g = make_grid(s);
  RunConfig cfg{ g,
                 make_exponent(s),
                 make_sigma(s),
                 make_u0(g, s),
                 s.integer("seed"),
                 static_cast<std::size_t>(s.integer("replicas")),
                 has_key(s, "probes") ? make_probes(g, s, "probes") : std::vector<GridProbe>{},
                 static_cast<unsigned>(std::max<std::uint64_t>(1, s.integer("workers"))) };
  if (s.integer("workers") < 1)
    throw ConfigError("workers must be at least 1");
  cfg.validate();
  return cfg;
}

struct RowMaker
{
  std::string run_id;
  std::uint64_t seed;
  std::size_t replicas;
  double alpha;
  double beta;

  Row operator()(const std::string& quantity, double t, double x, double value,
                 double se = 0.0, double tail = 0.0) const
  {
    return { run_id, seed, replicas, alpha, beta, t, x, quantity, value, se, tail };
  }
};

RowMaker row_maker(const Settings& s, const LevyExponent& e, std::size_t replicas)
{
  return { s.raw("run_id"), s.integer("seed"), replicas, e.envelope().alpha,
           e.envelope().beta };
}

std::string tag(const std::string& base, const std::string& key, double v)
{
  return base + "[" + key + "=" + format_double(v) + "]";
}

Json blowup_json(const std::vector<BlowUpRecord>& b)
{
  Json arr = Json::array();
  for (const auto& r : b)
    arr.push_back({ { "replica", r.replica }, { "step", r.step },
                    { "max_abs", format_double(r.max_abs) } });
  return arr;
}

Outcome run_kernel(const Settings& s)
{
  const auto e = make_exponent(s);
  const auto ts = s.reals("t_grid");
  if (ts.empty())
    throw ConfigError("t_grid needs at least one time");
  const auto rep = verify_kernel_bounds(e, ts, s.real("rate"), s.real("tol"));
  const auto mk = row_maker(s, e, 0);
  Outcome o;
  for (const auto& r : rep.rows) {
    o.rows.push_back(mk("kernel_l2_norm_sq", r.t, kNan, r.l2_norm_sq, 0.0, r.tail_bound));
    o.rows.push_back(mk("kernel_scaled_alpha", r.t, kNan, r.scaled_alpha));
    o.rows.push_back(mk("kernel_scaled_beta", r.t, kNan, r.scaled_beta));
    o.rows.push_back(
      mk("kernel_cumulative", r.t, kNan, r.cumulative, 0.0, r.cumulative_tail_bound));
    o.rows.push_back(mk(tag("kernel_weighted_cumulative", "rate", rep.rate), r.t, kNan,
                        r.weighted_cumulative, 0.0, r.cumulative_tail_bound));
  }
  o.rows.push_back(mk("kernel_l2_slope", kNan, kNan, rep.l2_slope));
  o.rows.push_back(mk("kernel_l2_r2", kNan, kNan, rep.l2_r2));
  o.rows.push_back(mk("kernel_cumulative_slope", kNan, kNan, rep.cumulative_slope));
  o.rows.push_back(mk("kernel_cumulative_r2", kNan, kNan, rep.cumulative_r2));
  o.rows.push_back(mk(tag("upsilon", "rate", rep.rate), kNan, kNan,
                      rep.upsilon_at_rate.value, 0.0, rep.upsilon_at_rate.tail_bound));
  o.rows.push_back(mk("supineq_holds", kNan, kNan, rep.supineq_holds ? 1.0 : 0.0));
  return o;
}

Outcome run_simulate(const Settings& s)
{
  const RunConfig cfg = make_run(s);
  const auto ens = run_ensemble(cfg);
  Outcome o;
  o.replicas_requested = ens.requested;
  o.blowups = ens.blowups;
  o.replicas_used = ens.requested - ens.blowups.size();
  if (o.replicas_used < 2)
    throw NumericalError("fewer than two replicas survived");
  const auto mk = row_maker(s, cfg.exponent, o.replicas_used);
  for (const auto& set : ens.sets) {
    const auto sum = summarize(set.values);
    std::vector<double> sq(set.values.size());
    std::transform(set.values.begin(), set.values.end(), sq.begin(),
                   [](double v) { return v * v; });
    const auto sq_sum = summarize(sq);
    o.rows.push_back(mk("u_mean", set.t, set.x, sum.mean, sum.mean_se));
    o.rows.push_back(mk("u_variance", set.t, set.x, sum.variance, sum.variance_se));
    o.rows.push_back(mk("u_second_moment", set.t, set.x, sq_sum.mean, sq_sum.mean_se));
    o.rows.push_back(mk("u_skewness", set.t, set.x, sum.skewness, sum.skewness_se));
    if (s.raw("sigma") == "const" && set.t > 0.0) {
      const double a = s.real("sigma_a");
      const auto w = walsh_variance(cfg.exponent, set.t);
      o.rows.push_back(mk("isometry_variance", set.t, set.x, a * a * w.value, 0.0,
                          a * a * w.tail_bound));
    }
  }
  o.rows.push_back(mk("blowup_count", kNan, kNan, static_cast<double>(ens.blowups.size())));
  return o;
}

Outcome run_picard(const Settings& s)
{
  const RunConfig cfg = make_run(s);
  const auto rep = picard_sequence(cfg, s.integer("n_max"), s.real("rate"), s.real("p"));
  Outcome o;
  o.replicas_requested = cfg.replicas;
  o.replicas_used = rep.replicas_used;
  o.blowups = rep.blowups;
  const auto mk = row_maker(s, cfg.exponent, rep.replicas_used);
  char name[64];
  for (const auto& r : rep.rows) {
    std::snprintf(name, sizeof name, "picard_diff_n%02zu", r.n);
    o.rows.push_back(mk(name, r.t, r.x, r.norm, r.std_error));
    if (r.n > 0) {
      std::snprintf(name, sizeof name, "picard_ratio_n%02zu", r.n);
      o.rows.push_back(mk(name, kNan, kNan, r.ratio, kNan));
    }
  }
  const double up_rate = 2.0 * rep.rate / rep.p;
  if (up_rate > 0.0) {
    const auto u = upsilon(cfg.exponent, up_rate);
    o.rows.push_back(mk(tag("upsilon", "rate", up_rate), kNan, kNan, u.value, 0.0,
                        u.tail_bound));
  }
  o.rows.push_back(mk("sigma_lipschitz", kNan, kNan, cfg.sigma.lip));
  return o;
}

Outcome run_malliavin(const Settings& s)
{
  const RunConfig cfg = make_run(s);
  const auto deltas = s.reals("deltas");
  const std::size_t nd = deltas.size();
  const std::size_t np = cfg.probes.size();
  const std::size_t per_probe = 1 + nd;
  const double moment_p = s.real("moment_p");
  const double floor = s.real("floor");

  std::vector<std::optional<std::vector<double>>> slot(cfg.replicas);
  std::vector<std::optional<BlowUpRecord>> failed(cfg.replicas);
  parallel_for(
    cfg.replicas, cfg.workers, [&] { return SchemeOperator(cfg.exponent, cfg.grid); },
    [&](SchemeOperator& op, std::size_t r) {
      try {
        const auto noise = sample_noise(cfg.grid, cfg.seed, r);
        const auto path = solve_path(cfg, noise, op);
        std::vector<double> v;
        for (const auto& p : cfg.probes) {
          const auto h = hnorm_adjoint(path, noise, op, cfg.sigma, p, deltas);
          v.push_back(h.hnorm_sq);
          for (const auto& t : h.tails)
            v.push_back(t.value);
        }
        slot[r] = std::move(v);
      } catch (const BlowUpError& e) {
        failed[r] = BlowUpRecord{ r, e.step(), e.max_abs() };
      }
    });

  Outcome o;
  o.replicas_requested = cfg.replicas;
  std::vector<std::vector<double>> cols(np * per_probe);
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    if (failed[r]) {
      o.blowups.push_back(*failed[r]);
      continue;
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
      cols[j].push_back((*slot[r])[j]);
  }
  o.replicas_used = cfg.replicas - o.blowups.size();
  if (o.replicas_used == 0)
    throw NumericalError("every replica blew up");
  const auto mk = row_maker(s, cfg.exponent, o.replicas_used);

  const auto mean_se = [](const std::vector<double>& v) {
    if (v.size() < 2)
      return std::pair{ v.at(0), kNan };
    const auto sum = summarize(v);
    return std::pair{ sum.mean, sum.mean_se };
  };

  for (std::size_t pi = 0; pi < np; ++pi) {
    const auto& p = cfg.probes[pi];
    const double t = cfg.grid.t(p.k);
    const double x = cfg.grid.x(p.i);
    const auto& h = cols[pi * per_probe];
    const auto [hm, hse] = mean_se(h);
    o.rows.push_back(mk("hnorm_sq", t, x, hm, hse));
    for (std::size_t d = 0; d < nd; ++d) {
      const auto [tm, tse] = mean_se(cols[pi * per_probe + 1 + d]);
      o.rows.push_back(mk(tag("hnorm_tail", "delta", deltas[d]), t, x, tm, tse));
    }
    if (h.size() >= 2 && p.k > 0) {
      const auto nm = negative_moment_estimate(h, moment_p, floor);
      const std::string q = tag("neg_moment", "p", moment_p);
      o.rows.push_back(mk(q, t, x, nm.value, nm.std_error));
      o.rows.push_back(mk(q + "_floor_x10", t, x, nm.value_floor_up, kNan));
      o.rows.push_back(mk(q + "_floor_div10", t, x, nm.value_floor_down, kNan));
      o.rows.push_back(mk(q + "_floored_fraction", t, x, nm.floored_fraction, kNan));
      o.rows.push_back(mk(q + "_unreliable", t, x, nm.unreliable ? 1.0 : 0.0, kNan));
    }
  }

  const std::size_t stride = s.integer("stride");
  const bool gradient = s.flag("gradient_check");
  if ((stride > 0 || gradient) && !failed.empty() && !failed[0]) {
    SchemeOperator op(cfg.exponent, cfg.grid);
    const auto noise = sample_noise(cfg.grid, cfg.seed, 0);
    const auto path = solve_path(cfg, noise, op);
    for (const auto& p : cfg.probes) {
      const double t = cfg.grid.t(p.k);
      const double x = cfg.grid.x(p.i);
      if (stride > 0) {
        const auto f = hnorm_forward(path, noise, op, cfg.sigma, p, stride, {});
        o.rows.push_back(mk(tag("hnorm_forward_r0", "stride", static_cast<double>(stride)), t,
                            x, f.hnorm_sq, kNan));
        o.rows.push_back(mk(tag("hnorm_forward_r0", "stride",
                                static_cast<double>(std::max<std::size_t>(1, stride / 2))),
                            t, x, f.hnorm_sq_half_stride, kNan));
        const auto a = hnorm_adjoint(path, noise, op, cfg.sigma, p, {});
        o.rows.push_back(mk("hnorm_adjoint_r0", t, x, a.hnorm_sq, kNan));
      }
      if (gradient) {
        const auto field = derivative_field_adjoint(path, noise, op, cfg.sigma, p);
        for (const auto& [st, sx] : s.points("sources")) {
          const auto cell = probe_at(cfg.grid, st, sx);
          if (cell.k >= cfg.grid.k_time)
            throw ConfigError("gradient source times must be below the horizon");
          const std::string src = "[src=" + format_double(st) + ":" + format_double(sx) + "]";
          const double fwd =
            propagate_derivative(path, noise, op, cfg.sigma, { cell.k, cell.i }, p.k)
              .values[p.i];
          const double adj = field[cell.k * cfg.grid.m_space + cell.i];
          const auto orc =
            noise_gradient_oracle(cfg, 0, { cell.k, cell.i }, p, s.real("oracle_h"));
          const double scale = std::max(std::abs(orc.value), 1e-300);
          o.rows.push_back(mk("gradient_forward" + src, t, x, fwd, kNan));
          o.rows.push_back(mk("gradient_adjoint" + src, t, x, adj, kNan));
          o.rows.push_back(mk("gradient_oracle" + src, t, x, orc.value,
                              std::abs(orc.quotient_h - orc.quotient_half)));
          o.rows.push_back(mk("gradient_rel_err" + src, t, x,
                              orc.value == 0.0 && fwd == 0.0 ? 0.0
                                                             : std::abs(fwd - orc.value) / scale,
                              kNan));
          o.rows.push_back(
            mk("gradient_consistent" + src, t, x, orc.consistent ? 1.0 : 0.0, kNan));
        }
      }
    }
  }
  return o;
}

Outcome run_smallball(const Settings& s)
{
  RunConfig cfg = make_run(s);
  const GridProbe probe = cfg.probes.front();
  if (probe.k == 0)
    throw ConfigError("small-ball probe needs t > 0");
  const auto samples = hnorm_samples(cfg, probe);
  if (samples.values.empty())
    throw NumericalError("every replica blew up");

  auto eps = s.reals("eps");
  if (eps.empty()) {
    auto sorted = samples.values;
    std::sort(sorted.begin(), sorted.end());
    double lo = sorted[static_cast<std::size_t>(0.005 * static_cast<double>(sorted.size() - 1))];
    const double med = sorted[(sorted.size() - 1) / 2];
    double hi = med;
    if (!(lo > 0.0) || !(hi > lo * 1.000001)) {
      lo = 0.5 * med;
      hi = 2.0 * med;
    }
    for (int j = 0; j < 16; ++j)
      eps.push_back(lo * std::pow(hi / lo, j / 15.0));
  }
  auto rep = smallball_from_samples(samples.values, eps, cfg.exponent, cfg.sigma.kappa,
                                    cfg.grid.t(probe.k));
  Outcome o;
  o.replicas_requested = cfg.replicas;
  o.replicas_used = samples.values.size();
  o.blowups = samples.blowups;
  const auto mk = row_maker(s, cfg.exponent, o.replicas_used);
  const double t = cfg.grid.t(probe.k);
  const double x = cfg.grid.x(probe.i);
  for (const auto& r : rep.rows) {
    const double half = 0.5 * (r.ci_high - r.ci_low) / 1.959963984540054;
    o.rows.push_back(mk(tag("smallball_prob", "eps", r.eps), t, x, r.probability, half, kNan));
    o.rows.push_back(mk(tag("smallball_ci_low", "eps", r.eps), t, x, r.ci_low, kNan, kNan));
    o.rows.push_back(mk(tag("smallball_ci_high", "eps", r.eps), t, x, r.ci_high, kNan, kNan));
    o.rows.push_back(
      mk(tag("smallball_hits", "eps", r.eps), t, x, static_cast<double>(r.hits), kNan, kNan));
    o.rows.push_back(mk(tag("smallball_upper_bound_only", "eps", r.eps), t, x,
                        r.upper_bound_only ? 1.0 : 0.0, kNan, kNan));
    o.rows.push_back(mk(tag("smallball_delta", "eps", r.eps), t, x, r.delta, kNan, kNan));
    o.rows.push_back(
      mk(tag("smallball_jdelta_margin", "eps", r.eps), t, x, r.jdelta_margin, kNan, kNan));
  }
  o.rows.push_back(mk("smallball_c_constant", t, x, rep.c_constant, kNan, kNan));
  SlopeFit fit{ kNan, kNan, kNan };
  try {
    fit = smallball_fit(rep, s.integer("min_hits"));
  } catch (const ConfigError&) {
    // fewer than three resolvable levels
  }
  o.rows.push_back(mk("smallball_slope", t, x, fit.slope, kNan, kNan));
  o.rows.push_back(mk("smallball_r2", t, x, fit.r2, kNan, kNan));
  return o;
}

Outcome run_density(const Settings& s)
{
  const RunConfig cfg = make_run(s);
  const auto ens = run_ensemble(cfg);
  Outcome o;
  o.replicas_requested = ens.requested;
  o.blowups = ens.blowups;
  o.replicas_used = ens.requested - ens.blowups.size();
  if (o.replicas_used < 2)
    throw NumericalError("fewer than two replicas survived");
  const auto mk = row_maker(s, cfg.exponent, o.replicas_used);
  const auto scales = s.reals("bandwidth_scale");
  const std::size_t npts = s.integer("eval_points");
  for (const auto& set : ens.sets) {
    double base = 0.0;
    try {
      base = silverman_bandwidth(set.values);
    } catch (const DegenerateSampleError& e) {
      o.rows.push_back(mk("kde_point_mass", set.t, set.x, e.location(), kNan, kNan));
      continue;
    }
    const auto sum = summarize(set.values);
    for (double sc : scales) {
      if (!(sc > 0.0))
        throw ConfigError("bandwidth_scale entries must be positive");
      const double h = sc * base;
      const auto pts = default_eval_points(set.values, h, npts);
      const auto est = kde(set.values, h, pts);
      const auto sm = smoothness_report(est);
      double integral = 0.0;
      for (std::size_t j = 1; j < pts.size(); ++j)
        integral += 0.5 * (est.density[j] + est.density[j - 1]) * (pts[j] - pts[j - 1]);
      const std::string b = "[bw=" + format_double(sc);
      o.rows.push_back(mk("kde_bandwidth" + b + "]", set.t, set.x, h, kNan, kNan));
      o.rows.push_back(mk("kde_integral" + b + "]", set.t, set.x, integral, kNan, kNan));
      o.rows.push_back(mk("kde_max_d1" + b + "]", set.t, set.x, sm.max_abs_d1, kNan, kNan));
      o.rows.push_back(mk("kde_max_d2" + b + "]", set.t, set.x, sm.max_abs_d2, kNan, kNan));
      o.rows.push_back(mk("kde_d2_sign_changes" + b + "]", set.t, set.x,
                          static_cast<double>(sm.d2_sign_changes), kNan, kNan));
      o.rows.push_back(
        mk("kde_oscillating" + b + "]", set.t, set.x, sm.oscillating ? 1.0 : 0.0, kNan, kNan));
      o.rows.push_back(mk("kde_ks_normal" + b + "]", set.t, set.x,
                          kolmogorov_distance_to_normal(set.values, h, sum.mean,
                                                        std::sqrt(sum.variance), pts),
                          kNan, kNan));
      char j_tag[32];
      for (std::size_t j = 0; j < pts.size(); ++j) {
        std::snprintf(j_tag, sizeof j_tag, ";j=%04zu]", j);
        o.rows.push_back(mk("kde_z" + b + j_tag, set.t, set.x, pts[j], kNan, kNan));
        o.rows.push_back(mk("kde_density" + b + j_tag, set.t, set.x, est.density[j], kNan, kNan));
        o.rows.push_back(mk("kde_d1" + b + j_tag, set.t, set.x, est.d1[j], kNan, kNan));
        o.rows.push_back(mk("kde_d2" + b + j_tag, set.t, set.x, est.d2[j], kNan, kNan));
      }
    }
  }
  return o;
}

void write_outputs(const Settings& s, const Outcome& o)
{
  namespace fs = std::filesystem;
  const std::string dir = s.raw("output");
  const std::string id = s.raw("run_id");
  const Format fmt = parse_format(s.raw("format"));
  const std::string table = id + (fmt == Format::csv ? ".csv" : ".json");
  const std::string meta_name = id + ".metadata.json";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError(dir, "cannot create output directory (" + ec.message() + ")");

  Json meta;
  meta["tool"] = "levyshe";
  meta["version"] = kVersion;
  meta["subcommand"] = s.subcommand();
  meta["seed"] = s.integer("seed");
  meta["seed_source"] = s.source("seed") == "env" ? std::string("env:") + kSeedEnvVar
                                                   : s.source("seed");
  meta["rng"] = kRngDescription;
  meta["bandwidth_rule"] = kBandwidthRule;
  Json config = Json::object();
  Json sources = Json::object();
  for (const auto& k : s.schema()) {
    if (k.name == "workers")
      continue;
    config[k.name] = s.raw(k.name);
    sources[k.name] = s.source(k.name);
  }
  meta["config"] = config;
  meta["config_sources"] = sources;
  meta["replicas_requested"] = o.replicas_requested;
  meta["replicas_used"] = o.replicas_used;
  meta["blowup_count"] = o.blowups.size();
  meta["blowups"] = blowup_json(o.blowups);
  meta["outputs"] = Json::array({ table, meta_name });
  for (const auto& [k, v] : o.extra.items())
    meta[k] = v;

  emit(o.rows, fmt, (fs::path(dir) / table).string());
  write_text((fs::path(dir) / meta_name).string(), meta.dump(2) + "\n");
}

std::string dashed(std::string name)
{
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

const char* kFooter = R"(Configuration
  --config FILE reads flat "key = value" lines; '#' starts a comment. Every
  key of a subcommand can also be given as a flag (--m-space or --m_space).
  Precedence, lowest first: built-in default, config file, flag, and the
  LEVYSHE_SEED environment variable for the seed. Unknown keys or flags are
  configuration errors and nothing is written.

Outputs
  <output>/<run_id>.csv (or .json) with columns
    run_id,seed,replica_count,alpha,beta,t,x,quantity,value,stderr,tail_bound
  preceded by the version line "# levyshe-csv v1", rows sorted by
  (quantity, t, x); and <output>/<run_id>.metadata.json holding the effective
  configuration, seed and its source, code version, RNG and bandwidth rule,
  and blow-up counts. The worker count is not recorded: it never changes
  output bytes. check-exponent prints to standard output only.

Exit codes
  0 success, 1 configuration error, 2 numerical failure (blow-up,
  non-finite values), 3 I/O error. Errors are printed to standard error as
  "error:<config|numerical|io>: message".)";

const std::map<std::string, std::string>& descriptions()
{
  static const std::map<std::string, std::string> d{
    { "kernel", "kernel L2 norms, cumulative integrals, fitted slopes and Upsilon" },
    { "simulate", "ensemble moments of u at probe points" },
    { "picard", "successive Picard differences in the weighted norm" },
    { "malliavin", "H-norms of the Malliavin derivative, negative moments, gradient check" },
    { "smallball", "small-ball probabilities of the H-norm with Wilson intervals" },
    { "density", "kernel density estimates of u and smoothness diagnostics" },
    { "check-exponent", "theta and admissibility of (alpha, beta)" },
  };
  return d;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "levyshe: stochastic heat equation with a Levy generator on the torus" };
  app.footer(kFooter);
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);

  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::map<std::string, CLI::Option*>> flag_opts;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : subcommand_names()) {
    auto* sub = app.add_subcommand(name, descriptions().at(name));
    subs[name] = sub;
    if (name != "check-exponent")
      sub->add_option("--config", config_paths[name], "flat key = value config file");
    for (const auto& k : schema_for(name)) {
      std::string names = "--" + k.name;
      if (dashed(k.name) != k.name)
        names = "--" + dashed(k.name) + "," + names;
      std::string help = k.help + " (default: " +
                         (k.default_value.empty() ? std::string("empty") : k.default_value) + ")";
      flag_opts[name][k.name] = sub->add_option(names, flag_values[name][k.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e, out, err);
    err << "error:config: " << e.what() << "\n";
    return 1;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    Settings settings(name);
    if (!config_paths[name].empty())
      load_config_file(settings, config_paths[name]);
    for (const auto& [key, opt] : flag_opts[name])
      if (opt->count() > 0)
        settings.set(key, flag_values[name][key], "flag");

    if (name == "check-exponent") {
      const auto c = check_exponent_condition(settings.real("alpha"), settings.real("beta"));
      out << "theta=" << format_double(c.theta)
          << ", admissible=" << (c.admissible ? "true" : "false")
          << ", boundary=" << (c.boundary ? "true" : "false")
          << ", threshold=" << format_double(c.threshold) << "\n";
      return 0;
    }

    if (const char* env = std::getenv(kSeedEnvVar))
      settings.set("seed", env, "env");
    if (settings.integer("workers") < 1)
      throw ConfigError("workers must be at least 1");

    Outcome o;
    if (name == "kernel")
      o = run_kernel(settings);
    else if (name == "simulate")
      o = run_simulate(settings);
    else if (name == "picard")
      o = run_picard(settings);
    else if (name == "malliavin")
      o = run_malliavin(settings);
    else if (name == "smallball")
      o = run_smallball(settings);
    else
      o = run_density(settings);
    write_outputs(settings, o);
    return 0;
  } catch (const ConfigError& e) {
    err << "error:config: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "error:io: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "error:numerical: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error:config: " << e.what() << "\n";
    return 1;
  }
}

} // namespace levyshe
