// Command line front end: model/sample file plumbing around the library.
// Every command prints line-oriented key=value text (or one JSON document
// with --json) carrying the seed and library version, so identical
// invocations are byte-identical.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gibbsfit/asymptotics.hpp"
#include "gibbsfit/hypothesis.hpp"
#include "gibbsfit/inference.hpp"
#include "gibbsfit/model_io.hpp"
#include "gibbsfit/models.hpp"
#include "gibbsfit/sampling.hpp"
#include "gibbsfit/thermo.hpp"
#include "gibbsfit/version.hpp"

namespace {

using gibbsfit::ModelFile;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class Report {
 public:
  void add(const std::string& key, double v) {
    lines_.push_back(key + "=" + num(v));
    json_[key] = v;
  }
  void add(const std::string& key, long v) {
    lines_.push_back(key + "=" + std::to_string(v));
    json_[key] = v;
  }
  void add(const std::string& key, int v) { add(key, static_cast<long>(v)); }
  void add(const std::string& key, std::uint64_t v) {
    lines_.push_back(key + "=" + std::to_string(v));
    json_[key] = v;
  }
  void add(const std::string& key, bool v) {
    lines_.push_back(key + "=" + (v ? "true" : "false"));
    json_[key] = v;
  }
  void add(const std::string& key, const std::string& v) {
    lines_.push_back(key + "=" + v);
    json_[key] = v;
  }
  void add(const std::string& key, const char* v) { add(key, std::string(v)); }
  void add(const std::string& key, const Eigen::VectorXd& v) {
    std::string joined;
    std::vector<double> arr;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) joined += ",";
      joined += num(v[i]);
      arr.push_back(v[i]);
    }
    lines_.push_back(key + "=" + joined);
    json_[key] = arr;
  }

  void print(bool as_json, std::ostream& out) const {
    if (as_json) {
      out << json_.dump(2) << "\n";
    } else {
      for (const std::string& l : lines_) out << l << "\n";
    }
  }

 private:
  std::vector<std::string> lines_;
  nlohmann::ordered_json json_;
};

Eigen::VectorXd parse_theta_list(const std::string& text) {
  std::vector<double> vals;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw std::invalid_argument("--theta: '" + item + "' is not a number");
    vals.push_back(v);
  }
  if (vals.empty()) throw std::invalid_argument("--theta: empty list");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// Flag value if given, else the model file's theta line, else zeros.
Eigen::VectorXd resolve_theta(const ModelFile& model, const std::string& theta_flag) {
  if (!theta_flag.empty()) {
    Eigen::VectorXd t = parse_theta_list(theta_flag);
    if (t.size() != model.family.dim())
      throw std::invalid_argument("--theta: expected " + std::to_string(model.family.dim()) +
                                  " values");
    return t;
  }
  if (model.has_theta()) return model.theta;
  return Eigen::VectorXd::Zero(model.family.dim());
}

struct Options {
  std::string model_path, data_path, out_path, theta, theta0, theta1;
  std::uint64_t seed = 0, stream = 0;
  int n = 0, reps = 0, k = 1, grid_starts = 0, threads = 1;
  double alpha = 0.1, eta = 0.0, c = 0.0, level = 0.0, lo = 0.0, hi = 1.0, tol = 1e-10;
  bool json = false;
};

gibbsfit::MleConfig fit_config(const ModelFile& model, const Options& opt) {
  gibbsfit::MleConfig cfg;
  cfg.eta = opt.eta;
  cfg.grid_starts = opt.grid_starts;
  if (model.has_box()) {
    cfg.box_lower = model.box_lower;
    cfg.box_upper = model.box_upper;
  }
  return cfg;
}

void add_provenance(Report& rep, const Options& opt) {
  rep.add("seed", opt.seed);
  rep.add("version", gibbsfit::version_string);
}

int cmd_simulate(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const Eigen::VectorXd theta = resolve_theta(model, opt.theta);
  if (opt.n < 1) throw std::invalid_argument("simulate: --n must be positive");
  const gibbsfit::GibbsSystem sys(model.spec, model.family, theta);
  const gibbsfit::SampleSeq path = gibbsfit::sample_path(sys, opt.n, opt.seed, opt.stream);

  std::vector<std::string> header;
  header.push_back(std::string("gibbsfit ") + gibbsfit::version_string);
  header.push_back("seed=" + std::to_string(opt.seed) + " stream=" + std::to_string(opt.stream));
  std::string theta_txt = "theta=";
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    theta_txt += (i ? "," : "") + num(theta[i]);
  header.push_back(theta_txt);
  gibbsfit::save_sample(opt.out_path, path.symbols, header);

  Report rep;
  rep.add("command", "simulate");
  rep.add("n", opt.n);
  rep.add("theta", theta);
  rep.add("stream", opt.stream);
  rep.add("out", opt.out_path);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_fit(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  const gibbsfit::MleConfig cfg = fit_config(model, opt);
  const gibbsfit::EstimationResult res = gibbsfit::mle(model.spec, model.family, data, cfg);

  Report rep;
  rep.add("command", "fit");
  rep.add("theta_hat", res.theta_hat);
  rep.add("loglik", res.loglik);
  rep.add("converged", res.converged);
  rep.add("constraint_active", res.constraint_active);
  rep.add("n_used", res.n_used);
  rep.add("eta", opt.eta > 0 ? opt.eta : gibbsfit::default_eta(res.n_used));
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_mpe(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  const gibbsfit::MleConfig cfg = fit_config(model, opt);
  const gibbsfit::MpeResult res = gibbsfit::mpe(model.spec, model.family, data, cfg);

  Report rep;
  rep.add("command", "mpe");
  rep.add("theta_tilde", res.theta_tilde);
  rep.add("objective", res.objective);
  rep.add("newton_iters", res.newton_iters);
  rep.add("rank_deficient", res.rank_deficient);
  rep.add("hit_box", res.hit_box);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

void add_test_result(Report& rep, const gibbsfit::TestResult& res) {
  rep.add("statistic", res.statistic);
  rep.add("critical_value", res.critical_value);
  rep.add("reject", res.reject);
  rep.add("alpha", res.alpha);
  rep.add("z", res.z_used);
  if (res.theta_null_hat) rep.add("theta_null_hat", *res.theta_null_hat);
}

int cmd_test_simple(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  if (opt.theta0.empty()) throw std::invalid_argument("test-simple: --theta0 is required");
  Eigen::VectorXd theta0 = parse_theta_list(opt.theta0);
  const int reps = opt.reps > 0 ? opt.reps : 100000;
  const gibbsfit::TestResult res =
      gibbsfit::lr_test_simple(model.spec, model.family, data, theta0, opt.alpha,
                               fit_config(model, opt), reps, opt.seed, opt.threads);

  Report rep;
  rep.add("command", "test-simple");
  add_test_result(rep, res);
  rep.add("reps", reps);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_test_influence(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  const int reps = opt.reps > 0 ? opt.reps : 100000;
  const gibbsfit::TestResult res =
      gibbsfit::lr_test_influence(model.spec, model.family, data, opt.k, opt.alpha,
                                  fit_config(model, opt), reps, opt.seed, opt.threads);

  Report rep;
  rep.add("command", "test-influence");
  rep.add("k", opt.k);
  add_test_result(rep, res);
  rep.add("reps", reps);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_np_test(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  if (opt.theta0.empty() || opt.theta1.empty())
    throw std::invalid_argument("np-test: --theta0 and --theta1 are required");
  Eigen::VectorXd theta0 = parse_theta_list(opt.theta0);
  Eigen::VectorXd theta1 = parse_theta_list(opt.theta1);

  double c = opt.c;
  bool calibrated = false;
  if (!(c > 0.0)) {
    if (!(opt.level > 0.0 && opt.level < 1.0))
      throw std::invalid_argument("np-test: give --c, or --level to calibrate by Monte Carlo");
    const int reps = opt.reps > 0 ? opt.reps : 2000;
    c = gibbsfit::np_calibrate(model.spec, model.family, theta0, theta1, data.size(),
                               opt.level, reps, opt.seed, {}, opt.threads);
    calibrated = true;
  }
  const gibbsfit::TestResult res =
      gibbsfit::np_test(model.spec, model.family, data, theta0, theta1, c);

  Report rep;
  rep.add("command", "np-test");
  rep.add("statistic", res.statistic);
  rep.add("critical_value", res.critical_value);
  rep.add("reject", res.reject);
  rep.add("calibrated", calibrated);
  if (calibrated) rep.add("level", opt.level);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_ci(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const gibbsfit::Word data = gibbsfit::load_sample(opt.data_path);
  const gibbsfit::MleConfig cfg = fit_config(model, opt);
  const gibbsfit::EstimationResult fit = gibbsfit::mle(model.spec, model.family, data, cfg);
  const gibbsfit::GibbsSystem sys(model.spec, model.family, fit.theta_hat);
  const Eigen::MatrixXd sigma_hat = gibbsfit::asymptotic_covariance(sys);
  const int reps = opt.reps > 0 ? opt.reps : 100000;
  const gibbsfit::ConfidenceRegion region = gibbsfit::confidence_region(
      fit.theta_hat, sigma_hat, data.size(), opt.alpha, reps, opt.seed, opt.threads);

  Report rep;
  rep.add("command", "ci");
  rep.add("theta_hat", fit.theta_hat);
  rep.add("alpha", opt.alpha);
  Eigen::VectorXd lower(fit.theta_hat.size()), upper(fit.theta_hat.size());
  for (Eigen::Index i = 0; i < fit.theta_hat.size(); ++i) {
    lower[i] = region.lower_bound(static_cast<int>(i));
    upper[i] = region.upper_bound(static_cast<int>(i));
  }
  rep.add("lower", lower);
  rep.add("upper", upper);
  rep.add("lower_offset", region.lower_offset);
  rep.add("upper_offset", region.upper_offset);
  rep.add("n", data.size());
  rep.add("reps", reps);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_pressure(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const Eigen::VectorXd theta = resolve_theta(model, opt.theta);
  const gibbsfit::GibbsSystem sys(model.spec, model.family, theta);

  Report rep;
  rep.add("command", "pressure");
  rep.add("theta", theta);
  rep.add("pressure", sys.pressure());
  rep.add("lambda", sys.lambda());
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_dimroot(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const double root =
      gibbsfit::pressure_root(model.spec, model.family, opt.lo, opt.hi, opt.tol);
  const double residual =
      gibbsfit::pressure(model.spec, model.family, Eigen::VectorXd::Constant(1, root));

  Report rep;
  rep.add("command", "dimroot");
  rep.add("root", root);
  rep.add("pressure_at_root", residual);
  rep.add("tol", opt.tol);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_limit_sample(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const Eigen::VectorXd theta = resolve_theta(model, opt.theta);
  const gibbsfit::GibbsSystem sys(model.spec, model.family, theta);
  const Eigen::MatrixXd sigma = gibbsfit::asymptotic_covariance(sys);
  const int reps = opt.reps > 0 ? opt.reps : 100000;
  const gibbsfit::LimitSample sample =
      gibbsfit::limit_law_sample(sigma, reps, opt.seed, opt.threads);

  Report rep;
  rep.add("command", "limit-sample");
  rep.add("theta", theta);
  rep.add("reps", reps);
  rep.add("rejected_count", sample.rejected_count);
  const Eigen::Index d = sigma.rows();
  std::vector<double> coord(sample.draws.size());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < sample.draws.size(); ++k) coord[k] = sample.draws[k][i];
    const std::string base = "coord" + std::to_string(i + 1);
    rep.add(base + "_q05", gibbsfit::quantile(coord, 0.05));
    rep.add(base + "_q50", gibbsfit::quantile(coord, 0.50));
    rep.add(base + "_q95", gibbsfit::quantile(coord, 0.95));
  }
  rep.add("xi_q50", gibbsfit::quantile(sample.xi_draws, 0.50));
  rep.add("xi_q90", gibbsfit::quantile(sample.xi_draws, 0.90));

  if (!opt.out_path.empty()) {
    std::ofstream csv(opt.out_path);
    if (!csv) throw std::runtime_error(opt.out_path + ": cannot open for writing");
    for (Eigen::Index i = 0; i < d; ++i) csv << "draw" << (i + 1) << ",";
    csv << "xi\n";
    for (std::size_t k = 0; k < sample.draws.size(); ++k) {
      for (Eigen::Index i = 0; i < d; ++i) csv << num(sample.draws[k][i]) << ",";
      csv << num(sample.xi_draws[k]) << "\n";
    }
    rep.add("out", opt.out_path);
  }
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  return 0;
}

int cmd_validate_model(const Options& opt) {
  const ModelFile model = gibbsfit::load_model(opt.model_path);
  const Eigen::VectorXd theta = resolve_theta(model, opt.theta);
  const gibbsfit::CohomologyReport coh =
      gibbsfit::cohomology_independence_check(model.spec, model.family, theta);

  Report rep;
  rep.add("command", "validate-model");
  rep.add("alphabet", model.spec.alphabet_size());
  rep.add("dim", model.family.dim());
  rep.add("common_depth", model.family.common_depth());
  rep.add("theta", theta);
  rep.add("cohomology_min_eigenvalue", coh.min_eigenvalue);
  rep.add("cohomology_independent", coh.independent);
  add_provenance(rep, opt);
  rep.print(opt.json, std::cout);
  if (!coh.independent) {
    std::cerr << "error category=validation: directions are cohomologically dependent "
                 "(min covariance eigenvalue "
              << num(coh.min_eigenvalue) << ")\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Gibbs-family inference on subshifts of finite type"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_data) {
    sub->add_option("--model", opt.model_path, "Model definition file")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_data)
      sub->add_option("--data", opt.data_path, "Sample file (1-based symbols)")
          ->required()
          ->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--threads", opt.threads, "Worker cap for Monte Carlo loops");
    sub->add_flag("--json", opt.json, "Emit one JSON document instead of key=value lines");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Draw a sample path from mu_theta");
  add_common(simulate, false);
  simulate->add_option("--n", opt.n, "Sample length")->required();
  simulate->add_option("--stream", opt.stream, "RNG stream id");
  simulate->add_option("--theta", opt.theta, "Comma-separated parameter values");
  simulate->add_option("--out", opt.out_path, "Sample output path")->required();

  CLI::App* fit = app.add_subcommand("fit", "Maximum likelihood estimate");
  add_common(fit, true);
  fit->add_option("--eta", opt.eta, "Feasibility control parameter (default n^-1/4 rule)");
  fit->add_option("--grid-starts", opt.grid_starts, "Multi-start budget");

  CLI::App* mpe = app.add_subcommand("mpe", "Maximum potential estimate");
  add_common(mpe, true);
  mpe->add_option("--eta", opt.eta, "Box scale when the model has none");

  CLI::App* tsimple = app.add_subcommand("test-simple", "Likelihood-ratio test of theta=theta0");
  add_common(tsimple, true);
  tsimple->add_option("--theta0", opt.theta0, "Null parameter (comma-separated)")->required();
  tsimple->add_option("--alpha", opt.alpha, "Test level");
  tsimple->add_option("--reps", opt.reps, "Draws behind the quantile");
  tsimple->add_option("--eta", opt.eta, "Feasibility control parameter");

  CLI::App* tinfl = app.add_subcommand("test-influence", "Test of theta_k = 0");
  add_common(tinfl, true);
  tinfl->add_option("--k", opt.k, "Coordinate under test (1-based)")->required();
  tinfl->add_option("--alpha", opt.alpha, "Test level");
  tinfl->add_option("--reps", opt.reps, "Draws behind the quantile");
  tinfl->add_option("--eta", opt.eta, "Feasibility control parameter");

  CLI::App* nptest = app.add_subcommand("np-test", "Fixed-alternative likelihood-ratio test");
  add_common(nptest, true);
  nptest->add_option("--theta0", opt.theta0, "Null parameter")->required();
  nptest->add_option("--theta1", opt.theta1, "Alternative parameter")->required();
  nptest->add_option("--c", opt.c, "Rejection threshold");
  nptest->add_option("--level", opt.level, "Target level for Monte Carlo calibration");
  nptest->add_option("--reps", opt.reps, "Calibration replications");

  CLI::App* ci = app.add_subcommand("ci", "Per-coordinate confidence region around the MLE");
  add_common(ci, true);
  ci->add_option("--alpha", opt.alpha, "Nominal level");
  ci->add_option("--reps", opt.reps, "Limit-law draws");
  ci->add_option("--eta", opt.eta, "Feasibility control parameter");

  CLI::App* pressure = app.add_subcommand("pressure", "Topological pressure at theta");
  add_common(pressure, false);
  pressure->add_option("--theta", opt.theta, "Comma-separated parameter values");

  CLI::App* dimroot = app.add_subcommand("dimroot", "Root of theta -> P(F_theta)");
  add_common(dimroot, false);
  dimroot->add_option("--lo", opt.lo, "Bracket lower end")->required();
  dimroot->add_option("--hi", opt.hi, "Bracket upper end")->required();
  dimroot->add_option("--tol", opt.tol, "Pressure tolerance at the root");

  CLI::App* lsample = app.add_subcommand("limit-sample", "Monte Carlo limit-law draws");
  add_common(lsample, false);
  lsample->add_option("--theta", opt.theta, "Comma-separated parameter values");
  lsample->add_option("--reps", opt.reps, "Number of draws");
  lsample->add_option("--out", opt.out_path, "CSV output of draws");

  CLI::App* vmodel = app.add_subcommand("validate-model", "Parse and sanity-check a model");
  add_common(vmodel, false);
  vmodel->add_option("--theta", opt.theta, "Checkpoint parameter values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*fit) return cmd_fit(opt);
    if (*mpe) return cmd_mpe(opt);
    if (*tsimple) return cmd_test_simple(opt);
    if (*tinfl) return cmd_test_influence(opt);
    if (*nptest) return cmd_np_test(opt);
    if (*ci) return cmd_ci(opt);
    if (*pressure) return cmd_pressure(opt);
    if (*dimroot) return cmd_dimroot(opt);
    if (*lsample) return cmd_limit_sample(opt);
    if (*vmodel) return cmd_validate_model(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error category=invalid-argument: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error category=runtime: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error category=internal: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
