// gts_cli: returns pipeline for the generalized tempered stable model.
//
//   stats  summary statistics of a price file (plus model moments with --params)
//   fit    maximum likelihood fit with trace
//   pdf    density / CDF table with a normal overlay
//   risk   VaR and AVaR tables (plus empirical columns with --input)
//   vol    realized volatility series
//   synth  seeded synthetic price file drawn from a parameter set
//
// Exit codes: 0 success, 2 input or validation error, 3 no convergence,
// 4 numeric failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gts/data.hpp"
#include "gts/density.hpp"
#include "gts/error.hpp"
#include "gts/io.hpp"
#include "gts/mle.hpp"
#include "gts/model.hpp"
#include "gts/risk.hpp"
#include "gts/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kInput = 2, kNoConvergence = 3, kNumeric = 4 };

class InputError : public gts::Error {
 public:
  using gts::Error::Error;
};

struct RunConfig {
  std::string input;
  std::string params;
  std::string init;
  gts::ColumnSpec columns;
  std::size_t grid_m = 8192;
  gts::FitOptions fit;
  std::vector<double> levels;
  std::string out = "out";
  std::uint64_t seed = 1;
  std::string window;
  std::size_t n = 4000;
};

json config_to_json(const RunConfig& c) {
  json j;
  j["input"] = c.input;
  j["params"] = c.params;
  j["init"] = c.init;
  j["columns"] = {{"date", c.columns.date}, {"price", c.columns.price}};
  j["grid_m"] = c.grid_m;
  j["fit"] = {{"max_iter", c.fit.max_iter}, {"grad_tol", c.fit.grad_tol}, {"step_damping", c.fit.step_damping}};
  j["levels"] = c.levels;
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["window"] = c.window;
  j["n"] = c.n;
  return j;
}

void apply_config_file(const std::string& path, RunConfig& c) {
  json j;
  try {
    j = json::parse(gts::read_file(path));
  } catch (const json::exception& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
  try {
    if (j.contains("input")) c.input = j["input"].get<std::string>();
    if (j.contains("params")) c.params = j["params"].get<std::string>();
    if (j.contains("init")) c.init = j["init"].get<std::string>();
    if (j.contains("columns")) {
      const auto& cj = j["columns"];
      if (cj.contains("date")) c.columns.date = cj["date"].get<std::string>();
      if (cj.contains("price")) c.columns.price = cj["price"].get<std::string>();
    }
    if (j.contains("grid_m")) c.grid_m = j["grid_m"].get<std::size_t>();
    if (j.contains("fit")) {
      const auto& fj = j["fit"];
      if (fj.contains("max_iter")) c.fit.max_iter = fj["max_iter"].get<int>();
      if (fj.contains("grad_tol")) c.fit.grad_tol = fj["grad_tol"].get<double>();
      if (fj.contains("step_damping")) c.fit.step_damping = fj["step_damping"].get<int>();
    }
    if (j.contains("levels")) c.levels = j["levels"].get<std::vector<double>>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("window")) c.window = j["window"].is_string() ? j["window"].get<std::string>()
                                                                 : std::to_string(j["window"].get<int>());
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw InputError("config '" + path + "': " + e.what());
  }
}

void validate_config(const RunConfig& c) {
  for (double l : c.levels) {
    if (!(l > 0.0 && l < 1.0) || l == 0.5) {
      std::ostringstream os;
      os << "risk level " << l << " must lie in (0, 1) and differ from 0.5";
      throw InputError(os.str());
    }
  }
  if (c.grid_m == 0) throw InputError("grid-m must be positive");
  if (c.fit.max_iter <= 0 || !(c.fit.grad_tol > 0) || c.fit.step_damping <= 0) {
    throw InputError("fit options must be positive");
  }
}

std::string require(const std::string& v, const char* flag) {
  if (v.empty()) throw InputError(std::string("missing required ") + flag);
  return v;
}

/// Output files are staged in memory and written only once the command has
/// finished, so a failure leaves no partial output behind.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(const std::string& name, const std::string& content) { files.emplace_back(name, content); }
};

void write_outputs(const RunConfig& c, const std::string& command, Outputs& out) {
  json manifest;
  manifest["tool"] = "gts_cli";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config_hash"] = gts::fnv1a64(config_to_json(c).dump());
  manifest["input_hash"] = c.input.empty() ? "" : gts::fnv1a64(gts::read_file(c.input));
  const std::string pfile = !c.params.empty() ? c.params : c.init;
  manifest["params_hash"] = pfile.empty() ? "" : gts::fnv1a64(gts::read_file(pfile));
  json names = json::array();
  for (const auto& [name, _] : out.files) names.push_back(name);
  manifest["outputs"] = names;
  out.add("manifest.json", manifest.dump(2) + "\n");

  fs::create_directories(c.out);
  for (const auto& [name, content] : out.files) {
    std::ofstream f(fs::path(c.out) / name, std::ios::binary);
    if (!f) throw InputError("cannot write " + (fs::path(c.out) / name).string());
    f << content;
  }
}

std::string fmt6(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

gts::ReturnSeries load_returns(const RunConfig& c) {
  return gts::log_returns(gts::load_price_csv(require(c.input, "--input"), c.columns));
}

// ------------------------------------------------------------------ commands

int cmd_stats(const RunConfig& c) {
  const auto prices = gts::load_price_csv(require(c.input, "--input"), c.columns);
  const auto r = gts::log_returns(prices);
  const auto s = gts::summary_stats(r);
  std::optional<gts::MomentStats> th;
  if (!c.params.empty()) th = gts::moment_stats(gts::load_params_json(c.params));

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "statistic,empirical" << (th ? ",theoretical" : "") << '\n';
  auto row = [&](const char* name, double e, std::optional<double> t) {
    csv << name << ',' << e;
    if (th) {
      csv << ',';
      if (t) csv << *t;
    }
    csv << '\n';
    std::cout << std::left << std::setw(20) << name << std::right << std::setw(14) << fmt6(e);
    if (t) std::cout << std::setw(14) << fmt6(*t);
    std::cout << '\n';
  };
  std::cout << std::left << std::setw(20) << "statistic" << std::right << std::setw(14) << "empirical";
  if (th) std::cout << std::setw(14) << "theoretical";
  std::cout << '\n';
  auto opt = [&](double v) { return th ? std::optional<double>(v) : std::nullopt; };
  row("n", static_cast<double>(s.n), std::nullopt);
  row("mean", s.mean, th ? opt(th->mean) : std::nullopt);
  row("std", s.std_dev, th ? opt(th->std_dev) : std::nullopt);
  row("cv", s.cv, th ? opt(th->cv) : std::nullopt);
  row("skewness", s.skewness, th ? opt(th->skewness) : std::nullopt);
  row("kurtosis", s.kurtosis, th ? opt(th->kurtosis) : std::nullopt);
  row("min", s.min, std::nullopt);
  row("max", s.max, std::nullopt);
  if (prices.dropped > 0) std::cout << "dropped rows: " << prices.dropped << '\n';

  Outputs out;
  out.add("summary.csv", csv.str());
  write_outputs(c, "stats", out);
  return kOk;
}

int cmd_fit(const RunConfig& c) {
  const auto r = load_returns(c);
  if (r.size() < 500) std::cerr << "warning: only " << r.size() << " observations (fewer than 500)\n";
  const gts::GtsParams init = c.init.empty() ? gts::default_init(r.returns) : gts::load_params_json(c.init);
  gts::FitOptions opt = c.fit;
  opt.grid_m = c.grid_m;

  Outputs out;
  int code = kOk;
  gts::FitResult res;
  try {
    res = gts::fit(r.returns, init, opt);
  } catch (const gts::FitError& e) {
    std::ostringstream trace;
    gts::write_trace_csv(trace, e.trace());
    out.add("trace.csv", trace.str());
    write_outputs(c, "fit", out);
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  std::ostringstream trace;
  gts::write_trace_csv(trace, res.trace);
  out.add("trace.csv", trace.str());
  out.add("params.json", gts::params_to_json(res.params).dump(2) + "\n");
  const auto& last = res.trace.rows.back();
  std::cout << "status: " << (res.status == gts::FitStatus::kConverged ? "converged" : "not converged")
            << "  iterations: " << last.iteration << "  log ML: " << fmt6(last.log_ml)
            << "  |score|: " << fmt6(last.grad_norm) << "  max eigenvalue: " << fmt6(last.max_eigenvalue) << '\n';
  const auto v = res.params.to_array();
  for (std::size_t i = 0; i < gts::kNumParams; ++i) std::cout << "  " << gts::kParamNames[i] << " = " << fmt6(v[i]) << '\n';
  if (res.status != gts::FitStatus::kConverged) code = kNoConvergence;
  write_outputs(c, "fit", out);
  return code;
}

int cmd_pdf(const RunConfig& c) {
  const auto p = gts::load_params_json(require(c.params, "--params"));
  const auto t = gts::density_table(p, c.grid_m, gts::DerivativeOrder::kFirst);
  const auto ms = gts::cumulants(p, 2);
  const double mean = ms(1), sd = std::sqrt(ms(2));
  std::vector<double> normal(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) normal[k] = gts::normal_pdf(t.x[k], mean, sd);
  std::ostringstream csv;
  gts::write_density_csv(csv, t, {{"normal", normal}});
  std::cout << "grid: m = " << t.grid.m << "  a = " << fmt6(t.grid.a) << "  span = [" << fmt6(t.grid.x_min()) << ", "
            << fmt6(t.grid.x_max()) << "]\n";
  std::cout << "mass: " << fmt6(gts::table_mass(t)) << "\n";
  std::cout << "P(-1.06 < X < 1.23) = " << fmt6(gts::prob_interval(t, -1.06, 1.23)) << '\n';
  Outputs out;
  out.add("density.csv", csv.str());
  write_outputs(c, "pdf", out);
  return kOk;
}

int cmd_risk(const RunConfig& c) {
  const auto p = gts::load_params_json(require(c.params, "--params"));
  std::optional<gts::ReturnSeries> r;
  if (!c.input.empty()) r = load_returns(c);
  std::vector<std::pair<double, gts::Tail>> levels;
  if (c.levels.empty()) {
    for (double a : gts::default_lower_levels()) levels.emplace_back(a, gts::Tail::kLower);
    for (double a : gts::default_upper_levels()) levels.emplace_back(a, gts::Tail::kUpper);
  } else {
    for (double a : c.levels) levels.emplace_back(a, a < 0.5 ? gts::Tail::kLower : gts::Tail::kUpper);
  }
  const auto t = gts::density_table(p, c.grid_m);
  std::vector<gts::RiskReport> rows;
  for (const auto& [a, side] : levels) {
    auto rep = gts::avar(p, t, a, side);
    if (r) {
      rep.empirical_var = gts::empirical_var(r->returns, a);
      rep.empirical_avar = gts::empirical_avar(r->returns, a, side);
    }
    rows.push_back(rep);
  }
  std::cout << std::left << std::setw(8) << "side" << std::right << std::setw(10) << "level" << std::setw(14) << "VaR"
            << std::setw(14) << "AVaR" << '\n';
  for (const auto& rep : rows) {
    std::cout << std::left << std::setw(8) << gts::tail_name(rep.side) << std::right << std::setw(10) << fmt6(rep.level)
              << std::setw(14) << fmt6(rep.var) << std::setw(14) << fmt6(rep.avar) << '\n';
  }
  std::ostringstream csv;
  gts::write_risk_csv(csv, rows);
  Outputs out;
  out.add("risk.csv", csv.str());
  write_outputs(c, "risk", out);
  return kOk;
}

int parse_window(const std::string& w) {
  if (w == "month") return gts::kWindowMonth;
  if (w == "year") return gts::kWindowYear;
  int v = 0;
  if (!gts::detail::parse_number(w, v) || v <= 0) throw InputError("window must be month, year or a positive integer");
  return v;
}

int cmd_vol(const RunConfig& c) {
  const auto r = load_returns(c);
  std::vector<std::pair<std::string, int>> windows;
  if (c.window.empty()) {
    windows = {{"month", gts::kWindowMonth}, {"year", gts::kWindowYear}};
  } else {
    windows = {{c.window, parse_window(c.window)}};
  }
  Outputs out;
  for (const auto& [name, T] : windows) {
    const auto v = gts::realized_vol(r, T);
    std::ostringstream csv;
    gts::write_vol_csv(csv, v);
    out.add("vol_" + name + ".csv", csv.str());
    double mean = 0;
    for (const auto& pt : v) mean += pt.vol;
    std::cout << "window " << name << " (T = " << T << "): " << v.size() << " rows, mean vol " << fmt6(mean / v.size())
              << '\n';
  }
  write_outputs(c, "vol", out);
  return kOk;
}

int cmd_synth(const RunConfig& c) {
  const auto p = gts::load_params_json(require(c.params, "--params"));
  if (c.n == 0) throw InputError("n must be positive");
  const auto t = gts::density_table(p, c.grid_m);
  const auto x = gts::sample(t, c.n, c.seed);
  std::ostringstream csv;
  csv << "Date,Adj Close\n" << std::setprecision(17);
  std::chrono::sys_days day = std::chrono::sys_days{std::chrono::year{2000} / 1 / 3};
  double price = 100.0;
  csv << gts::format_date(gts::Date{day}) << ',' << price << '\n';
  for (double v : x) {
    day += std::chrono::days{1};
    price *= std::exp(v / 100.0);
    csv << gts::format_date(gts::Date{day}) << ',' << price << '\n';
  }
  std::cout << "wrote " << c.n + 1 << " prices (seed " << c.seed << ")\n";
  Outputs out;
  out.add("prices.csv", csv.str());
  write_outputs(c, "synth", out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized tempered stable returns toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string levels_arg;
  std::optional<std::size_t> grid_m;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::string input, params, init, out, window;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out, "output directory");
  };
  auto* stats = app.add_subcommand("stats", "summary statistics of the input series");
  auto* fit = app.add_subcommand("fit", "maximum likelihood fit");
  auto* pdf = app.add_subcommand("pdf", "density and CDF table");
  auto* risk = app.add_subcommand("risk", "VaR and AVaR tables");
  auto* vol = app.add_subcommand("vol", "realized volatility");
  auto* synth = app.add_subcommand("synth", "seeded synthetic price file");
  for (auto* s : {stats, fit, pdf, risk, vol, synth}) add_common(s);
  for (auto* s : {stats, fit, risk, vol}) s->add_option("--input", input, "price CSV");
  for (auto* s : {stats, pdf, risk, synth}) s->add_option("--params", params, "parameter JSON");
  for (auto* s : {fit, pdf, risk, synth}) s->add_option("--grid-m", grid_m, "minimum number of Fourier nodes");
  fit->add_option("--init", init, "initial parameter JSON");
  risk->add_option("--levels", levels_arg, "comma separated levels; below 0.5 lower tail, above upper tail");
  vol->add_option("--window", window, "month, year or a number of days");
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--n", n, "number of returns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (!input.empty()) cfg.input = input;
    if (!params.empty()) cfg.params = params;
    if (!init.empty()) cfg.init = init;
    if (!out.empty()) cfg.out = out;
    if (!window.empty()) cfg.window = window;
    if (grid_m) cfg.grid_m = *grid_m;
    if (seed) cfg.seed = *seed;
    if (n) cfg.n = *n;
    if (!levels_arg.empty()) {
      cfg.levels.clear();
      std::stringstream ss(levels_arg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v = 0;
        if (!gts::detail::parse_number(item, v)) throw InputError("bad level '" + item + "'");
        cfg.levels.push_back(v);
      }
    }
    validate_config(cfg);

    if (*stats) return cmd_stats(cfg);
    if (*fit) return cmd_fit(cfg);
    if (*pdf) return cmd_pdf(cfg);
    if (*risk) return cmd_risk(cfg);
    if (*vol) return cmd_vol(cfg);
    if (*synth) return cmd_synth(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const gts::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const gts::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const gts::SpanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const gts::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const gts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kInput;
}
