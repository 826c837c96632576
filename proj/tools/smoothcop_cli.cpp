#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "smoothcop/changepoint.hpp"
#include "smoothcop/csv.hpp"
#include "smoothcop/errors.hpp"
#include "smoothcop/experiments.hpp"
#include "smoothcop/kernels.hpp"

using namespace smoothcop;
using json = nlohmann::json;
namespace ex = smoothcop::experiments;

namespace {

const std::vector<std::string> kCommands{"draw",          "ci-kendall", "ci-frank", "mult-cov",
                                         "mult-quantile", "pd-imse",    "cpd",      "cpd-mc"};
const std::vector<std::string> kGlobalKeys{"seed", "workers", "out"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, ',');)
    if (!t.empty()) out.push_back(t);
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& t : split_list(s)) {
    std::istringstream is(t);
    is.imbue(std::locale::classic());
    T v;
    if (!(is >> v) || !is.eof()) throw ConfigError(std::string("bad value '") + t + "' in --" + what);
    out.push_back(v);
  }
  return out;
}

std::vector<SmoothingFamily> parse_families(const std::string& s) {
  std::vector<SmoothingFamily> out;
  for (const auto& t : split_list(s)) out.push_back(SmoothingFamily::parse(t));
  return out;
}

std::string json_token(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += ',';
      s += json_token(e, key);
    }
    return s;
  }
  throw ConfigError("config key '" + key + "' has an unsupported value type");
}

// Splices the entries of a JSON config file into the argument list right
// after the subcommand (globals before it), so that flags given on the command
// line come later and win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError(path + ": expected a JSON object of option names");
  std::vector<std::string> global, local;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string& key = it.key();
    auto& dst = std::find(kGlobalKeys.begin(), kGlobalKeys.end(), key) != kGlobalKeys.end() ? global : local;
    if (it->is_boolean()) {
      if (it->get<bool>()) dst.push_back("--" + key);
      continue;
    }
    if (it->is_null()) continue;
    dst.push_back("--" + key);
    dst.push_back(json_token(*it, key));
  }
  auto cmd = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
  });
  if (cmd == args.end()) return args;
  std::size_t pos = cmd - args.begin();
  args.insert(args.begin() + pos + 1, local.begin(), local.end());
  args.insert(args.begin() + pos, global.begin(), global.end());
  return args;
}

struct Globals {
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out;
  std::string config;
};

json options_json(const CLI::App* sub) {
  json j = json::object();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
    const std::string name = o->get_lnames()[0];
    if (o->get_type_size() == 0) {
      j[name] = o->count() > 0;
      continue;
    }
    if (o->count() > 0)
      j[name] = o->results().back();
    else if (!o->get_default_str().empty())
      j[name] = o->get_default_str();
  }
  return j;
}

class Runner {
 public:
  Runner(const Globals& g, const CLI::App* sub) : g_(g), sub_(sub), start_(std::chrono::steady_clock::now()) {}

  void emit(const std::string& content) const {
    if (g_.out.empty()) {
      std::cout << content;
      return;
    }
    write_file_atomic(g_.out, content);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["command"] = sub_->get_name();
    m["options"] = options_json(sub_);
    m["seed"] = g_.seed;
    m["workers"] = worker_count();
    m["version"] = SMOOTHCOP_VERSION;
    m["wall_time_s"] = wall;
    m["output"] = g_.out;
    write_file_atomic(g_.out + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  const Globals& g_;
  const CLI::App* sub_;
  std::chrono::steady_clock::time_point start_;
};

CopulaModel model_for(const std::string& copula, double tau, std::size_t d) {
  return CopulaModel::from_tau(parse_copula_family(copula), tau, d);
}

ChangePointOptions cp_options(const std::string& scale) {
  if (scale == "m+1") return ChangePointOptions{1};
  if (scale == "m") return ChangePointOptions{0};
  throw ConfigError("--dirac-scale must be m or m+1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth empirical copulas: bootstrap, multiplier replicates, partial derivatives, change points",
               "smoothcop"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", SMOOTHCOP_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Output file (stdout when omitted); a manifest goes to <out>.manifest.json");
  app.add_option("--config", g.config, "JSON file of option values; command-line flags override it");

  // draw
  auto* draw = app.add_subcommand("draw", "Draw from a fitted smooth empirical copula");
  std::string d_family = "bin", d_copula = "clayton", d_input;
  double d_tau = 0.5;
  std::size_t d_n = 20, d_d = 2, d_size = 0;
  draw->add_option("--family", d_family, "bin or betab4")->capture_default_str();
  draw->add_option("--copula", d_copula, "Copula of the simulated data")->capture_default_str();
  draw->add_option("--tau", d_tau)->capture_default_str();
  draw->add_option("--n", d_n, "Size of the simulated data")->capture_default_str();
  draw->add_option("--d", d_d)->capture_default_str();
  draw->add_option("--size", d_size, "Number of draws (default n)");
  draw->add_option("--input", d_input, "Fit to this CSV instead of simulated data");

  // confidence intervals
  struct CiOpts {
    std::string copula, tau = "0.5", n = "80", family = "bin,betab4", interval = "percentile";
    std::size_t B = 250, reps = 100;
    double level = 0.95;
  };
  CiOpts ck{"clayton"}, cf{"frank", "0.75"};
  auto add_ci = [&](CLI::App* s, CiOpts& o) {
    s->add_option("--copula", o.copula)->capture_default_str();
    s->add_option("--tau", o.tau, "Comma separated list")->capture_default_str();
    s->add_option("--n", o.n, "Comma separated list")->capture_default_str();
    s->add_option("--family", o.family, "Comma separated list of bin, betab4")->capture_default_str();
    s->add_option("--B", o.B, "Bootstrap samples")->capture_default_str();
    s->add_option("--reps", o.reps, "Monte Carlo replications")->capture_default_str();
    s->add_option("--level", o.level)->capture_default_str();
    s->add_option("--interval", o.interval, "percentile or basic")->capture_default_str();
  };
  auto* cik = app.add_subcommand("ci-kendall", "Coverage of smooth bootstrap intervals for Kendall's tau");
  add_ci(cik, ck);
  auto* cif = app.add_subcommand("ci-frank", "Coverage of smooth bootstrap intervals for the Frank parameter");
  add_ci(cif, cf);

  // multiplier experiments
  struct MultOpts {
    std::string copula = "clayton", n = "20,40,80,160", target = "dirac,bin,betab4", replicate = "dirac,bin,betab4";
    std::string functional = "ks";
    double tau = 0.25, q = 0.95;
    std::size_t B = 300, reps = 300, target_samples = 0, d = 2;
  };
  MultOpts mc, mq;
  auto add_mult = [&](CLI::App* s, MultOpts& o) {
    s->add_option("--copula", o.copula)->capture_default_str();
    s->add_option("--tau", o.tau)->capture_default_str();
    s->add_option("--n", o.n, "Comma separated list")->capture_default_str();
    s->add_option("--target", o.target, "Families of the estimators being resampled")->capture_default_str();
    s->add_option("--replicate", o.replicate, "Families used in the replicates")->capture_default_str();
    s->add_option("--B", o.B, "Multiplier replicates")->capture_default_str();
    s->add_option("--reps", o.reps, "Monte Carlo replications")->capture_default_str();
    s->add_option("--target-samples", o.target_samples, "Samples behind the Monte Carlo target");
  };
  auto* mcov = app.add_subcommand("mult-cov", "Covariance estimation by multiplier replicates");
  add_mult(mcov, mc);
  auto* mquant = app.add_subcommand("mult-quantile", "Quantiles of KS/CvM functionals by multiplier replicates");
  add_mult(mquant, mq);
  mquant->add_option("--functional", mq.functional, "ks or cvm")->capture_default_str();
  mquant->add_option("--q", mq.q)->capture_default_str();
  mquant->add_option("--d", mq.d)->capture_default_str();

  // partial derivatives
  auto* pdi = app.add_subcommand("pd-imse", "Integrated mean squared error of partial derivative estimators");
  std::string p_est = "dirac-nabla,dirac-delta,bin-delta,betab4-delta", p_copula = "clayton", p_n = "40";
  double p_tau = 0.5, p_L = 1.0;
  std::size_t p_d = 2, p_reps = 100, p_grid = 0, p_j = 1;
  pdi->add_option("--estimator", p_est, "Comma separated presets")->capture_default_str();
  pdi->add_option("--L", p_L, "Constant of the fixed bandwidth rule")->capture_default_str();
  pdi->add_option("--copula", p_copula)->capture_default_str();
  pdi->add_option("--tau", p_tau)->capture_default_str();
  pdi->add_option("--d", p_d)->capture_default_str();
  pdi->add_option("--n", p_n, "Comma separated list")->capture_default_str();
  pdi->add_option("--reps", p_reps)->capture_default_str();
  pdi->add_option("--grid", p_grid, "Points per axis (default 47 for d=2, 21 for d=3)");
  pdi->add_option("--j", p_j, "Margin, 1-based")->capture_default_str();

  // change points
  struct CpdOpts {
    double beta = 0.0, tau = 0.33, t = 0.5, level = 0.05;
    std::optional<double> tau2;
    std::string copula = "frank", family = "bin", scale = "m+1", input, replicates;
    std::size_t n = 100, B = 250, reps = 100;
    std::optional<std::size_t> ell;
    bool iid = false;
  };
  CpdOpts cp, cm;
  cm.family = "dirac,bin";
  auto add_cpd = [&](CLI::App* s, CpdOpts& o) {
    s->add_option("--beta", o.beta, "AR(1) coefficient")->capture_default_str();
    s->add_option("--copula", o.copula)->capture_default_str();
    s->add_option("--tau", o.tau)->capture_default_str();
    s->add_option("--tau2", o.tau2, "Kendall's tau after the change");
    s->add_option("--t", o.t, "Change after floor(n t)")->capture_default_str();
    s->add_option("--n", o.n)->capture_default_str();
    s->add_option("--B", o.B, "Multiplier replicates")->capture_default_str();
    s->add_option("--ell", o.ell, "Dependent multiplier bandwidth (default floor(1.25 n^(1/3)))");
    s->add_flag("--iid-multipliers", o.iid, "Rademacher multipliers instead of dependent ones");
    s->add_option("--dirac-scale", o.scale, "Rank scaling of the Dirac statistic: m+1 or m")->capture_default_str();
  };
  auto* cpd = app.add_subcommand("cpd", "Change-point test on one data set");
  add_cpd(cpd, cp);
  cpd->add_option("--family", cp.family, "dirac, bin or betab4")->capture_default_str();
  cpd->add_option("--input", cp.input, "CSV data; simulated from the AR(1) flags otherwise");
  cpd->add_option("--replicates", cp.replicates, "Write the replicate statistics to this CSV");
  auto* cpdmc = app.add_subcommand("cpd-mc", "Rejection rates of the change-point tests");
  add_cpd(cpdmc, cm);
  cpdmc->add_option("--family", cm.family, "Comma separated list")->capture_default_str();
  cpdmc->add_option("--reps", cm.reps)->capture_default_str();
  cpdmc->add_option("--level", cm.level)->capture_default_str();

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (g.workers > 0) set_worker_count(g.workers);
    const SeedStreams master(g.seed);

    if (draw->parsed()) {
      Runner run(g, draw);
      auto fam = SmoothingFamily::parse(d_family);
      Sample x = d_input.empty() ? [&] {
        Rng rng = master.child(1).child(0).engine();
        return sample(model_for(d_copula, d_tau, d_d), d_n, rng);
      }()
                                 : read_sample_csv(std::filesystem::path(d_input));
      SmoothEmpiricalCopula cop(compute_ranks(x), fam);
      Rng rng = master.child(2).child(0).engine();
      run.emit(sample_to_csv(BootstrapSampler(cop).sample(d_size ? d_size : x.n(), rng)));
    } else if (cik->parsed() || cif->parsed()) {
      const bool frank = cif->parsed();
      Runner run(g, frank ? cif : cik);
      const CiOpts& o = frank ? cf : ck;
      auto fams = parse_families(o.family);
      CsvWriter csv({"tau", "n", "family", "coverage", "avg_length"});
      for (double tau : parse_list<double>(o.tau, "tau"))
        for (std::size_t n : parse_list<std::size_t>(o.n, "n"))
          for (const auto& f : fams) {
            ex::CiConfig cfg;
            cfg.target = frank ? ex::CiTarget::Frank : ex::CiTarget::Kendall;
            cfg.copula = parse_copula_family(o.copula);
            cfg.tau = tau;
            cfg.n = n;
            cfg.B = o.B;
            cfg.reps = o.reps;
            cfg.level = o.level;
            cfg.interval = parse_interval_kind(o.interval);
            auto s = ex::run_ci(cfg, f, g.seed);
            csv.cell(tau).cell(static_cast<long long>(n)).cell(f.name()).cell(s.coverage).cell(s.avg_length);
            csv.end_row();
          }
      run.emit(csv.str());
    } else if (mcov->parsed()) {
      Runner run(g, mcov);
      auto targets = parse_families(mc.target), reps = parse_families(mc.replicate);
      CsvWriter csv({"n", "target", "replicate", "mse_x1e4"});
      for (std::size_t n : parse_list<std::size_t>(mc.n, "n")) {
        ex::MultCovConfig cfg;
        cfg.copula = parse_copula_family(mc.copula);
        cfg.tau = mc.tau;
        cfg.n = n;
        cfg.B = mc.B;
        cfg.reps = mc.reps;
        if (mc.target_samples) cfg.target_samples = mc.target_samples;
        for (const auto& t : targets) {
          auto cov = ex::target_covariance(cfg, t, g.seed);
          auto mse = ex::run_mult_cov(cfg, cov, reps, g.seed);
          for (std::size_t f = 0; f < reps.size(); ++f) {
            csv.cell(static_cast<long long>(n)).cell(t.name()).cell(reps[f].name()).cell(mse[f] * 1e4);
            csv.end_row();
          }
        }
      }
      run.emit(csv.str());
    } else if (mquant->parsed()) {
      Runner run(g, mquant);
      auto targets = parse_families(mq.target), reps = parse_families(mq.replicate);
      CsvWriter csv({"n", "d", "functional", "q", "target", "replicate", "mse_x1e4"});
      for (std::size_t n : parse_list<std::size_t>(mq.n, "n")) {
        ex::MultQuantileConfig cfg;
        cfg.copula = parse_copula_family(mq.copula);
        cfg.tau = mq.tau;
        cfg.d = mq.d;
        cfg.n = n;
        cfg.B = mq.B;
        cfg.reps = mq.reps;
        cfg.functional = parse_functional(mq.functional);
        cfg.q = mq.q;
        if (mq.target_samples) cfg.target_samples = mq.target_samples;
        for (const auto& t : targets) {
          double tq = ex::target_functional_quantile(cfg, t, g.seed);
          auto mse = ex::run_mult_quantile(cfg, tq, reps, g.seed);
          for (std::size_t f = 0; f < reps.size(); ++f) {
            csv.cell(static_cast<long long>(n)).cell(static_cast<long long>(mq.d)).cell(mq.functional).cell(mq.q);
            csv.cell(t.name()).cell(reps[f].name()).cell(mse[f] * 1e4);
            csv.end_row();
          }
        }
      }
      run.emit(csv.str());
    } else if (pdi->parsed()) {
      Runner run(g, pdi);
      if (p_j < 1 || p_j > p_d) throw ConfigError("--j must lie in 1..d");
      const std::size_t grid = p_grid ? p_grid : (p_d == 2 ? 47 : 21);
      auto model = model_for(p_copula, p_tau, p_d);
      auto names = split_list(p_est);
      CsvWriter csv({"n", "estimator", "imse"});
      for (std::size_t n : parse_list<std::size_t>(p_n, "n"))
        for (const auto& name : names) {
          // same data for every estimator
          auto r = imse(PdEstimatorSpec::parse(name, p_L), model, p_j - 1, n, p_reps, grid, master.child(1));
          csv.cell(static_cast<long long>(n)).cell(name).cell(r.imse);
          csv.end_row();
        }
      run.emit(csv.str());
    } else if (cpd->parsed()) {
      Runner run(g, cpd);
      ex::CpdConfig cfg;
      cfg.beta = cp.beta;
      cfg.copula = parse_copula_family(cp.copula);
      cfg.tau = cp.tau;
      cfg.tau2 = cp.tau2;
      cfg.t = cp.t;
      cfg.n = cp.n;
      cfg.ell = cp.ell;
      cfg.iid_multipliers = cp.iid;
      auto fam = SmoothingFamily::parse(cp.family);
      Sample x = cp.input.empty() ? [&] {
        Rng rng = master.child(1).child(0).engine();
        return generate_ar1(ex::make_ar1(cfg), rng);
      }()
                                  : read_sample_csv(std::filesystem::path(cp.input));
      cfg.n = x.n();
      auto res = run_test(x, fam, cp.B, ex::make_multipliers(cfg), master.child(2).child(0), std::nullopt,
                          cp_options(cp.scale));
      if (!cp.replicates.empty()) {
        CsvWriter rc({"b", "replicate_statistic"});
        for (std::size_t b = 0; b < res.replicate_values.size(); ++b) {
          rc.cell(static_cast<long long>(b + 1)).cell(res.replicate_values[b]);
          rc.end_row();
        }
        write_file_atomic(cp.replicates, rc.str());
      }
      json j;
      j["statistic"] = res.statistic;
      j["p_value"] = res.p_value;
      j["argmax_s"] = res.argmax_s;
      j["n"] = x.n();
      j["B"] = cp.B;
      j["family"] = fam.name();
      run.emit(j.dump(2) + "\n");
    } else if (cpdmc->parsed()) {
      Runner run(g, cpdmc);
      ex::CpdConfig cfg;
      cfg.beta = cm.beta;
      cfg.copula = parse_copula_family(cm.copula);
      cfg.tau = cm.tau;
      cfg.tau2 = cm.tau2;
      cfg.t = cm.t;
      cfg.n = cm.n;
      cfg.B = cm.B;
      cfg.reps = cm.reps;
      cfg.ell = cm.ell;
      cfg.iid_multipliers = cm.iid;
      cfg.level = cm.level;
      cfg.options = cp_options(cm.scale);
      auto fams = parse_families(cm.family);
      auto rates = ex::run_cpd_mc(cfg, fams, g.seed);
      CsvWriter csv({"beta", "tau", "tau2", "t", "n", "family", "rejection_pct"});
      for (std::size_t f = 0; f < fams.size(); ++f) {
        csv.cell(cm.beta).cell(cm.tau);
        if (cm.tau2)
          csv.cell(*cm.tau2).cell(cm.t);
        else
          csv.cell("").cell("");
        csv.cell(static_cast<long long>(cm.n)).cell(fams[f].name()).cell(100.0 * rates[f]);
        csv.end_row();
      }
      run.emit(csv.str());
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    // bad settings; IoError and friends fall through to exit 1
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const RangeError*>(&e) || dynamic_cast<const WindowError*>(&e) ||
        dynamic_cast<const BandwidthError*>(&e) || dynamic_cast<const UnsupportedFamilyError*>(&e)) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
