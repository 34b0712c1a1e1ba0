#include "equidist/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "equidist/diophantine.hpp"
#include "equidist/discrepancy.hpp"
#include "equidist/experiments.hpp"
#include "equidist/fourier_decomp.hpp"
#include "equidist/lattice_seq.hpp"
#include "equidist/parallel.hpp"
#include "equidist/phi.hpp"

namespace equidist {

using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json complex_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json alpha_json(const AlphaVec& a) {
  json arr = json::array();
  for (int i = 0; i < a.dim(); ++i) arr.push_back(to_hex(a[i]));
  return arr;
}

std::string alpha_csv(const AlphaVec& a) {
  std::string s;
  for (int i = 0; i < a.dim(); ++i) s += (i ? ";" : "") + to_hex(a[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::string> split_commas(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

UnitFrac parse_alpha_token(const std::string& t) {
  if (t == "golden") return golden_frac();
  if (t == "silver") return silver_frac();
  if (t.rfind("0x", 0) == 0 || t.rfind("0X", 0) == 0) return parse_hex_frac(t);
  return parse_decimal_frac(t);
}

// Options shared by every subcommand.
struct Common {
  int threads = 0;
  bool json_out = false;
  std::string format;
  bool no_timing = false;
  std::uint64_t budget = kDefaultPointBudget;

  void attach(CLI::App* app) {
    app->add_option("--threads", threads, "worker threads (0: EQUIDIST_THREADS, else all cores)")
        ->default_val(0)
        ->check(CLI::NonNegativeNumber);
    app->add_flag("--json", json_out, "emit JSON (same as --format json)");
    app->add_option("--format", format, "csv or json (default depends on the subcommand)")
        ->check(CLI::IsMember({"csv", "json"}));
    app->add_flag("--no-timing", no_timing, "write 0 into every wall-time field");
    app->add_option("--budget", budget, "maximum number of generated points")->default_val(kDefaultPointBudget);
  }
  int effective_threads() const { return threads > 0 ? threads : default_threads(); }
  bool want_json(bool default_json) const {
    if (json_out) return true;
    if (format.empty()) return default_json;
    return format == "json";
  }
};

struct AlphaOpt {
  std::vector<std::string> tokens;
  int d = 0;  // 0: inferred from the literal list, 1 for random:<seed>

  void attach(CLI::App* app, bool required = true) {
    auto* o = app->add_option("--alpha", tokens, "coordinates: decimal, 0x word, golden, silver, or random:<seed>");
    if (required) o->required();
    app->add_option("--d", d, "dimension for random:<seed> (default 1)")->check(CLI::PositiveNumber);
  }
  AlphaVec resolve() const {
    auto a = parse_alpha(tokens, d > 0 ? d : 1);
    if (d > 0 && a.dim() != d) throw std::invalid_argument("--d does not match the number of --alpha coordinates");
    return a;
  }
};

struct FourierOpt {
  std::optional<int> s;
  std::optional<std::int64_t> cutoff;
  int K = 32;
  bool relaxed = false;

  void attach(CLI::App* app) {
    app->add_option("--s", s, "small-divisor exponent s (default (d+2)d+4)");
    app->add_option("--cutoff", cutoff, "|n_1| cutoff for the full series (default floor(N^2 (log N)^2))");
    app->add_option("--K", K, "axis window half-width")->default_val(32)->check(CLI::PositiveNumber);
    app->add_flag("--relaxed", relaxed, "allow s below (d+2)d+4");
  }
  FourierParams resolve(int d, std::int64_t N) const {
    FourierParams p = FourierParams::defaults(d, N);
    if (s) p.s_exponent = *s;
    if (cutoff) p.cutoff_n1 = *cutoff;
    p.tail_window = K;
    p.relaxed = relaxed;
    p.validate(d);
    return p;
  }
};

json fourier_config(const FourierParams& p) {
  return json{{"s", p.s_exponent}, {"cutoff_n1", p.cutoff_n1}, {"K", p.tail_window}, {"relaxed", p.relaxed}};
}

json report_json(const ComponentReport& r) {
  json j{{"component", r.id}};
  if (r.mask) j["mask"] = r.mask->label();
  j["value"] = complex_json(r.value);
  j["term_count"] = r.term_count;
  j["tail_bound"] = r.tail_bound;
  if (r.step_difference) j["step_difference"] = *r.step_difference;
  return j;
}

void emit_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void csv_meta(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) out << "# " << k << '=' << v << '\n';
}

}  // namespace

AlphaVec parse_alpha(const std::vector<std::string>& tokens, int d) {
  const auto parts = split_commas(tokens);
  if (parts.empty()) throw std::invalid_argument("--alpha needs at least one coordinate");
  if (parts.size() == 1 && parts[0].rfind("random:", 0) == 0) {
    const std::string seed_text = parts[0].substr(7);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(seed_text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad random seed: " + seed_text);
    }
    if (used != seed_text.size()) throw std::invalid_argument("bad random seed: " + seed_text);
    return AlphaVec::random(seed, d);
  }
  std::vector<UnitFrac> c;
  for (const auto& p : parts) {
    if (p.rfind("random:", 0) == 0) throw std::invalid_argument("random:<seed> must be the only --alpha token");
    c.push_back(parse_alpha_token(p));
  }
  return AlphaVec(std::move(c));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrepancy of linear-form sequences: evaluation, Fourier decomposition and small-divisor scans",
               "equidist"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  Common common;
  AlphaOpt alpha_opt;
  FourierOpt fourier_opt;
  std::int64_t N = 0;
  std::optional<double> x_opt;
  double x = 0.0;

  // discrepancy
  auto* disc = app.add_subcommand("discrepancy", "max discrepancy Δ(α;N), or D(α,x;N) with --x");
  common.attach(disc);
  alpha_opt.attach(disc);
  disc->add_option("--N", N, "points per axis")->required()->check(CLI::PositiveNumber);
  disc->add_option("--x", x_opt, "evaluate D at this x in [0,1] instead of maximizing");

  // average
  std::string avg_mode = "exact";
  std::uint64_t samples = 1'000'000;
  std::uint64_t mc_seed = 0;
  auto* average = app.add_subcommand("average", "roof-averaged discrepancy by direct integration");
  common.attach(average);
  alpha_opt.attach(average);
  average->add_option("--N", N, "points per axis")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 31));
  average->add_option("--x", x, "interval end x in [0,1]")->required();
  average->add_option("--mode", avg_mode, "exact or mc")->default_val("exact")->check(CLI::IsMember({"exact", "mc"}));
  average->add_option("--samples", samples, "Monte Carlo samples")->default_val(1'000'000);
  average->add_option("--seed", mc_seed, "Monte Carlo seed")->default_val(0);

  // fourier
  std::string component = "D";
  std::vector<std::string> masks;
  double template_c = 1.0;
  auto* fourier = app.add_subcommand("fourier", "Fourier series of the averaged discrepancy and its component sums");
  common.attach(fourier);
  alpha_opt.attach(fourier);
  fourier_opt.attach(fourier);
  fourier->add_option("--N", N, "points per axis")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 20));
  fourier->add_option("--x", x, "interval end x in [0,1]")->required();
  fourier->add_option("--component", component, "D, D1..D6, all, or pairs")
      ->default_val("D")
      ->check(CLI::IsMember({"D", "D1", "D2", "D3", "D4", "D5", "D6", "all", "pairs"}));
  fourier->add_option("--mask", masks, "0/1 mask(s) for D6 (default: all masks)");
  fourier->add_option("--template-c", template_c, "constant c in the pair bound c·δ_N^{d+2}")->default_val(1.0);

  // spectrum
  std::int64_t M = 0;
  std::string phi_text = "power:1.5";
  auto* spectrum = app.add_subcommand("spectrum", "small-divisor spectrum buckets S(p,v) for 2 <= n <= M");
  common.attach(spectrum);
  alpha_opt.attach(spectrum);
  spectrum->add_option("--M", M, "scan limit")->required()->check(CLI::Range(std::int64_t(1), std::int64_t(1'000'000'000)));
  spectrum->add_option("--phi", phi_text, "power:<c> or loglog:<eta>")->default_val("power:1.5");

  // boxes
  std::string grid_text = "geometric";
  double min_expected = 0.0;
  auto* boxes = app.add_subcommand("boxes", "observed vs expected bucket counts");
  common.attach(boxes);
  alpha_opt.attach(boxes);
  boxes->add_option("--N", N, "points per axis")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 14));
  boxes->add_option("--grid", grid_text, "geometric or dyadic")
      ->default_val("geometric")
      ->check(CLI::IsMember({"geometric", "dyadic"}));
  boxes->add_option("--min-expected", min_expected, "skip buckets with a smaller expected count")->default_val(0.0);

  // census
  std::string census_mask;
  auto* census = app.add_subcommand("census", "special lines and ε-big bucket vectors");
  common.attach(census);
  alpha_opt.attach(census);
  fourier_opt.attach(census);
  census->add_option("--N", N, "points per axis")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1024)));
  census->add_option("--x", x, "interval end x in [0,1]")->default_val(0.5);
  census->add_option("--mask", census_mask, "0/1 mask of the linear form (default 1 followed by zeros)");

  // growth
  int growth_d = 1;
  int seeds = 1;
  std::uint64_t seed_base = 0;
  std::int64_t nmin = 16;
  std::int64_t nmax = 0;
  std::optional<int> exponent;
  auto* growth = app.add_subcommand("growth", "Δ(α;N) against (log N)^d φ^e(log log N) over seeds and N = powers of 2");
  common.attach(growth);
  growth->add_option("--d", growth_d, "dimension")->default_val(1)->check(CLI::PositiveNumber);
  growth->add_option("--seeds", seeds, "number of seeds")->default_val(1)->check(CLI::PositiveNumber);
  growth->add_option("--seed-base", seed_base, "first seed")->default_val(0);
  growth->add_option("--nmin", nmin, "smallest N (power of 2)")->default_val(16)->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 40));
  growth->add_option("--nmax", nmax, "largest N")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 40));
  growth->add_option("--phi", phi_text, "power:<c> or loglog:<eta>")->default_val("power:1.5");
  growth->add_option("--exponent", exponent, "exponent e of φ (default max(3,d))")->check(CLI::PositiveNumber);

  // validate
  std::uint64_t validate_samples = 200'000;
  auto* validate = app.add_subcommand("validate", "cross-check direct and Fourier evaluations and every component");
  common.attach(validate);
  alpha_opt.attach(validate);
  fourier_opt.attach(validate);
  validate->add_option("--N", N, "points per axis")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1) << 12));
  validate->add_option("--x", x, "interval end x in [0,1]")->required();
  validate->add_option("--samples", validate_samples, "Monte Carlo samples when N > 64 or d > 2")->default_val(200'000);
  validate->add_option("--phi", phi_text, "power:<c> or loglog:<eta>")->default_val("power:1.5");
  validate->add_option("--exponent", exponent, "exponent e in the D4-Dbar normalizer (default max(3,d))")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store;
  argv_store.push_back("equidist");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    const int threads = common.effective_threads();

    if (disc->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      json cfg{{"alpha", alpha_json(a)}, {"d", a.dim()}, {"N", N}, {"budget", common.budget}};
      if (x_opt) {
        cfg["x"] = *x_opt;
        const double D = discrepancy_at(a, *x_opt, N, common.budget, threads);
        if (common.want_json(true)) {
          emit_json(out, json{{"command", "discrepancy"}, {"config", cfg}, {"result", {{"D", D}}}});
        } else {
          csv_meta(out, {{"command", "discrepancy"}, {"alpha", alpha_csv(a)}, {"N", std::to_string(N)}, {"x", fmt17(*x_opt)}});
          out << "x,D\n" << fmt17(*x_opt) << ',' << fmt17(D) << '\n';
        }
        return kExitOk;
      }
      const DiscrepancyResult r = max_discrepancy(a, N, common.budget, threads);
      if (common.want_json(true)) {
        emit_json(out, json{{"command", "discrepancy"},
                            {"config", cfg},
                            {"result",
                             {{"delta", r.delta},
                              {"argmax_x", r.argmax_x},
                              {"argmax_word", to_hex(r.argmax_word)},
                              {"side", to_string(r.side)},
                              {"jump_index", r.jump_index},
                              {"points", r.points}}}});
      } else {
        csv_meta(out, {{"command", "discrepancy"}, {"alpha", alpha_csv(a)}, {"N", std::to_string(N)}});
        out << "delta,argmax_x,argmax_word,side,jump_index,points\n"
            << fmt17(r.delta) << ',' << fmt17(r.argmax_x) << ',' << to_hex(r.argmax_word) << ',' << to_string(r.side)
            << ',' << r.jump_index << ',' << r.points << '\n';
      }
      return kExitOk;
    }

    if (average->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      AverageOptions o;
      o.mode = avg_mode == "exact" ? AverageMode::exact_sweep : AverageMode::monte_carlo;
      o.samples = samples;
      o.seed = mc_seed;
      const AveragedResult r = averaged_discrepancy_direct(a, x, N, o, threads);
      if (common.want_json(true)) {
        json cfg{{"alpha", alpha_json(a)}, {"d", a.dim()}, {"N", N}, {"x", x}, {"mode", avg_mode}};
        if (o.mode == AverageMode::monte_carlo) {
          cfg["samples"] = samples;
          cfg["seed"] = mc_seed;
        }
        emit_json(out, json{{"command", "average"},
                            {"config", cfg},
                            {"result", {{"value", r.value}, {"error_bound", r.error_bound}, {"evaluations", r.evaluations}}}});
      } else {
        csv_meta(out, {{"command", "average"}, {"alpha", alpha_csv(a)}, {"N", std::to_string(N)}, {"x", fmt17(x)},
                       {"mode", avg_mode}, {"samples", std::to_string(samples)}, {"seed", std::to_string(mc_seed)}});
        out << "value,error_bound,evaluations\n"
            << fmt17(r.value) << ',' << fmt17(r.error_bound) << ',' << r.evaluations << '\n';
      }
      return kExitOk;
    }

    if (fourier->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      const FourierParams p = fourier_opt.resolve(a.dim(), N);
      json cfg{{"alpha", alpha_json(a)}, {"d", a.dim()}, {"N", N}, {"x", x}, {"component", component}};
      cfg["params"] = fourier_config(p);
      if (component == "pairs") {
        cfg["template_c"] = template_c;
        const PairReport rep = pair_cancellation_report(a, x, N, p, template_c, threads);
        json pairs = json::array();
        for (const auto& pr : rep.pairs) {
          pairs.push_back(json{{"l", pr.l},
                               {"eps_plus", pr.eps_plus},
                               {"eps_minus", pr.eps_minus},
                               {"count_plus", pr.count_plus},
                               {"count_minus", pr.count_minus},
                               {"sum_plus", pr.sum_plus},
                               {"sum_minus", pr.sum_minus},
                               {"paired_sum", pr.paired_sum},
                               {"bound", pr.bound},
                               {"flagged", pr.flagged}});
        }
        emit_json(out, json{{"command", "fourier"},
                            {"config", cfg},
                            {"result",
                             {{"delta_N", rep.delta_N},
                              {"d5", rep.d5},
                              {"residual", rep.residual},
                              {"residual_terms", rep.residual_terms},
                              {"flagged", rep.flagged},
                              {"pair_count", rep.pairs.size()},
                              {"pairs", pairs}}}});
        return kExitOk;
      }
      std::vector<ComponentReport> reports;
      if (component == "all") {
        reports = decomposition(a, x, N, p, threads);
      } else if (component == "D6") {
        std::vector<LinearFormMask> ms;
        if (masks.empty()) {
          ms = all_masks(a.dim());
        } else {
          for (const auto& m : split_commas(masks)) ms.push_back(LinearFormMask::parse(m));
        }
        cfg["masks"] = json::array();
        for (const auto& m : ms) {
          cfg["masks"].push_back(m.label());
          reports.push_back(component_sum(Component::D6, a, x, N, p, m, threads));
        }
      } else {
        reports.push_back(component_sum(parse_component(component), a, x, N, p, std::nullopt, threads));
      }
      if (common.want_json(true)) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(report_json(r));
        emit_json(out, json{{"command", "fourier"}, {"config", cfg}, {"result", {{"components", arr}}}});
      } else {
        csv_meta(out, {{"command", "fourier"}, {"alpha", alpha_csv(a)}, {"N", std::to_string(N)}, {"x", fmt17(x)},
                       {"s", std::to_string(p.s_exponent)}, {"cutoff_n1", std::to_string(p.cutoff_n1)},
                       {"K", std::to_string(p.tail_window)}, {"relaxed", p.relaxed ? "true" : "false"}});
        out << "component,mask,re,im,term_count,tail_bound,step_difference\n";
        for (const auto& r : reports) {
          out << r.id << ',' << (r.mask ? r.mask->label() : "") << ',' << fmt17(r.value.real()) << ','
              << fmt17(r.value.imag()) << ',' << r.term_count << ',' << fmt17(r.tail_bound) << ','
              << (r.step_difference ? fmt17(*r.step_difference) : "") << '\n';
        }
      }
      return kExitOk;
    }

    if (spectrum->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      const PhiSpec phi = PhiSpec::parse(phi_text);
      const auto recs = spectrum_scan(a, M, phi, threads);
      if (common.want_json(false)) {
        json arr = json::array();
        for (const auto& r : recs)
          arr.push_back(json{{"p", r.p},
                             {"v", r.v},
                             {"count", r.count},
                             {"min_product", r.min_product},
                             {"argmin", r.argmin},
                             {"sublemma_ratio", r.sublemma_ratio}});
        emit_json(out, json{{"command", "spectrum"},
                            {"config", {{"alpha", alpha_json(a)}, {"d", a.dim()}, {"M", M}, {"phi", phi.describe()}}},
                            {"result", {{"buckets", arr}}}});
      } else {
        csv_meta(out, {{"command", "spectrum"}, {"alpha", alpha_csv(a)}, {"M", std::to_string(M)}, {"phi", phi.describe()}});
        out << "p,v,count,min_product,argmin,sublemma_ratio\n";
        for (const auto& r : recs)
          out << r.p << ',' << r.v << ',' << r.count << ',' << fmt17(r.min_product) << ',' << r.argmin << ','
              << fmt17(r.sublemma_ratio) << '\n';
      }
      return kExitOk;
    }

    if (boxes->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      const Grid grid = grid_text == "dyadic" ? Grid::dyadic : Grid::geometric;
      const auto buckets = grid == Grid::dyadic ? dyadic_buckets(a.dim(), N, min_expected)
                                                : geometric_buckets(a.dim(), N, min_expected);
      const auto recs = box_counts(a, N, buckets, threads);
      const BucketGeometry geom(grid, a.dim(), N);
      if (common.want_json(false)) {
        json arr = json::array();
        for (const auto& r : recs)
          arr.push_back(json{{"l", r.bucket.l},
                             {"eps", r.bucket.eps},
                             {"observed", r.observed},
                             {"expected", r.expected},
                             {"relative_error", r.relative_error}});
        emit_json(out, json{{"command", "boxes"},
                            {"config",
                             {{"alpha", alpha_json(a)},
                              {"d", a.dim()},
                              {"N", N},
                              {"grid", grid_text},
                              {"delta_N", geom.delta()},
                              {"min_expected", min_expected}}},
                            {"result", {{"buckets", arr}}}});
      } else {
        csv_meta(out, {{"command", "boxes"}, {"alpha", alpha_csv(a)}, {"N", std::to_string(N)}, {"grid", grid_text},
                       {"delta_N", fmt17(geom.delta())}, {"min_expected", fmt17(min_expected)}});
        out << "l,eps,observed,expected,relative_error\n";
        for (const auto& r : recs)
          out << join_ints(r.bucket.l) << ',' << join_ints(r.bucket.eps) << ',' << r.observed << ','
              << fmt17(r.expected) << ',' << fmt17(r.relative_error) << '\n';
      }
      return kExitOk;
    }

    if (census->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      const FourierParams p = fourier_opt.resolve(a.dim(), N);
      std::string mask_text = census_mask;
      if (mask_text.empty()) mask_text = "1" + std::string(static_cast<std::size_t>(a.dim()), '0');
      const LinearFormMask mask = LinearFormMask::parse(mask_text);
      const LineCensus c = line_census(a, x, N, p, mask, threads);
      json lines = json::array();
      for (const auto& l : c.lines)
        lines.push_back(json{{"start", l.start},
                             {"length", l.length},
                             {"occupied", l.occupied},
                             {"big", l.big},
                             {"big_total", l.big_total}});
      json cfg{{"alpha", alpha_json(a)}, {"d", a.dim()}, {"N", N}, {"x", x}, {"mask", mask.label()}};
      cfg["params"] = fourier_config(p);
      emit_json(out, json{{"command", "census"},
                          {"config", cfg},
                          {"result",
                           {{"step", c.step},
                            {"pair_signs", c.pair_signs},
                            {"line_count", c.lines.size()},
                            {"total_big", c.total_big},
                            {"lines_with_multiple", c.lines_with_multiple},
                            {"lines", lines}}}});
      return kExitOk;
    }

    if (growth->parsed()) {
      GrowthConfig g;
      g.d = growth_d;
      if (nmax < nmin) throw std::invalid_argument("--nmax must be >= --nmin");
      for (std::int64_t n = nmin; n <= nmax; n *= 2) g.schedule.push_back(n);
      for (int k = 0; k < seeds; ++k) g.seeds.push_back(seed_base + static_cast<std::uint64_t>(k));
      g.phi = PhiSpec::parse(phi_text);
      g.exponent = exponent;
      g.budget = common.budget;
      g.threads = threads;
      g.timing = !common.no_timing;
      const auto recs = run_growth_experiment(g);
      if (common.want_json(false)) {
        json arr = json::array();
        for (const auto& r : recs)
          arr.push_back(json{{"alpha_seed", r.alpha_seed},
                             {"alpha", alpha_json(AlphaVec::random(r.alpha_seed, r.d))},
                             {"d", r.d},
                             {"N", r.N},
                             {"delta", r.delta},
                             {"normalizer", r.normalizer},
                             {"ratio", r.ratio},
                             {"exponent", r.exponent},
                             {"wall_ms", r.wall_ms},
                             {"degenerate", r.degenerate}});
        json maxes = json::array();
        for (const auto& [n, v] : max_ratio_by_N(recs)) maxes.push_back(json{{"N", n}, {"max_ratio", v}});
        emit_json(out, json{{"command", "growth"},
                            {"config",
                             {{"d", g.d},
                              {"schedule", g.schedule},
                              {"seeds", g.seeds},
                              {"phi", g.phi.describe()},
                              {"exponent", g.effective_exponent()}}},
                            {"result", {{"records", arr}, {"max_ratio_by_N", maxes}}}});
      } else {
        std::string seed_list;
        for (std::size_t k = 0; k < g.seeds.size(); ++k) seed_list += (k ? ";" : "") + std::to_string(g.seeds[k]);
        csv_meta(out, {{"command", "growth"}, {"d", std::to_string(g.d)}, {"seeds", seed_list},
                       {"phi", g.phi.describe()}, {"exponent", std::to_string(g.effective_exponent())}});
        write_growth_csv(recs, out);
      }
      return kExitOk;
    }

    if (validate->parsed()) {
      const AlphaVec a = alpha_opt.resolve();
      const FourierParams p = fourier_opt.resolve(a.dim(), N);
      CrossValidationOptions o;
      o.phi = PhiSpec::parse(phi_text);
      o.exponent = exponent;
      o.mc_samples = validate_samples;
      const CrossValidation cv = cross_validate(a, x, N, p, o, threads);
      json comps = json::array();
      for (const auto& r : cv.components) comps.push_back(report_json(r));
      json rows = json::array();
      for (const auto& r : cv.normalized)
        rows.push_back(json{{"name", r.name}, {"measured", r.measured}, {"normalizer", r.normalizer}, {"ratio", r.ratio}});
      json cfg{{"alpha", alpha_json(a)}, {"d", a.dim()}, {"N", N}, {"x", x}, {"phi", o.phi.describe()},
               {"exponent", o.exponent.value_or(std::max(3, a.dim()))}, {"samples", validate_samples}};
      cfg["params"] = fourier_config(p);
      emit_json(out, json{{"command", "validate"},
                          {"config", cfg},
                          {"result",
                           {{"D_direct", cv.D_direct},
                            {"Dbar_direct", {{"value", cv.Dbar_direct.value},
                                             {"error_bound", cv.Dbar_direct.error_bound},
                                             {"exact", cv.Dbar_exact}}},
                            {"Dbar_fourier", report_json(cv.Dbar_fourier)},
                            {"components", comps},
                            {"recombination",
                             {{"D4", complex_json(cv.components[3].value)},
                              {"rebuilt", complex_json(cv.d4_recombined)},
                              {"relative_error", cv.recombination_error},
                              {"pass", cv.recombination_ok}}},
                            {"dual_path",
                             {{"gap", cv.dual_path_gap}, {"allowance", cv.dual_path_allowance}, {"pass", cv.dual_path_ok}}},
                            {"normalized", rows}}}});
      return kExitOk;
    }
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace equidist
