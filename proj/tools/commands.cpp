#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mvcorr/bootstrap.hpp"
#include "mvcorr/boundlab.hpp"
#include "mvcorr/covariance.hpp"
#include "mvcorr/metrics.hpp"
#include "mvcorr/network.hpp"
#include "mvcorr/objective.hpp"
#include "mvcorr/synthdata.hpp"
#include "mvcorr/tensor_io.hpp"

namespace mvcorr::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace {

constexpr const char* kDatasetFile = "dataset.mvt";
constexpr const char* kSignalFile = "signal.mvt";
constexpr const char* kLabelsFile = "labels.txt";
constexpr const char* kModelFile = "model.mvcm";

void write_json(const fs::path& path, const json& j) {
  io::atomic_write(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw io::IoError(dir, "cannot create output directory");
}

void require_usage(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

Matrix centered_samples(const Matrix& features_by_samples) {
  // samples × features, each feature centered
  return cov::center_columns(features_by_samples).transpose();
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Section& cfg, const fs::path& out, std::ostream& log) {
  synth::SynthParams p;
  p.n = cfg.get_long("n", p.n);
  p.dim = cfg.get_long("dim", p.dim);
  p.k = cfg.get_long("k", p.k);
  p.m_views = cfg.get_int("views", p.m_views);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.beta = cfg.get_double("beta", p.beta);
  p.classes = cfg.get_int("classes", p.classes);
  p.class_separation = cfg.get_double("class_separation", p.class_separation);
  p.noise_sigma = cfg.get_double("noise_sigma", p.noise_sigma);
  p.seed = cfg.get_u64("seed", p.seed);
  cfg.reject_unused();
  try {
    synth::validate(p);
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }

  const synth::SyntheticDataset data = synth::generate(p);
  ensure_dir(out);
  io::atomic_write(out / kDatasetFile, [&](std::ostream& o) { io::write_tensor(o, io::tensor_from_views(data.measurements)); });
  io::atomic_write(out / kSignalFile, [&](std::ostream& o) { io::write_tensor(o, io::tensor_from_views(data.signal)); });
  io::atomic_write(out / kLabelsFile, [&](std::ostream& o) { io::write_labels(o, data.labels); });

  json manifest = {{"command", "simulate"},
                   {"n", p.n},
                   {"dim", p.dim},
                   {"k", p.k},
                   {"views", p.m_views},
                   {"alpha", p.alpha},
                   {"beta", p.beta},
                   {"classes", p.classes},
                   {"class_separation", p.class_separation},
                   {"noise_sigma", p.noise_sigma},
                   {"seed", p.seed},
                   {"files", {{"dataset", kDatasetFile}, {"signal", kSignalFile}, {"labels", kLabelsFile}}}};
  write_json(out / "manifest.json", manifest);
  log << "simulate: wrote " << p.n << " samples x " << p.m_views << " views x " << p.dim << " features to "
      << out.string() << '\n';
  return kSuccess;
}

// ------------------------------------------------------------------- train

int cmd_train(const Section& cfg, const fs::path& out, std::ostream& log) {
  const fs::path dataset_dir = cfg.require_string("dataset");
  const int d = cfg.get_int("d", 10);
  const std::vector<int> hidden = cfg.get_int_list("hidden", {64, 32});
  int m = cfg.get_int("m", 0);
  const long long input_dim = cfg.get_long("input_dim", 0);
  const long long batch = cfg.get_long("batch", 0);
  nn::TrainConfig tc;
  tc.lr = cfg.get_double("lr", tc.lr);
  tc.momentum = cfg.get_double("momentum", tc.momentum);
  tc.decay = cfg.get_double("decay", tc.decay);
  tc.nu = cfg.get_double("nu", tc.nu);
  tc.max_epochs = cfg.get_int("max_epochs", tc.max_epochs);
  tc.early_stop_delta = cfg.get_double("early_stop_delta", tc.early_stop_delta);
  tc.early_stop_patience = cfg.get_int("early_stop_patience", tc.early_stop_patience);
  tc.seed = cfg.get_u64("seed", tc.seed);
  cfg.reject_unused();

  require_usage(d >= 2, "train: d must be at least 2");
  require_usage(batch >= 0, "train: batch must be non-negative");
  for (int w : hidden) require_usage(w >= 1, "train: hidden widths must be positive");
  if (m == 0) m = bootstrap::max_subnetworks(d, bootstrap::BudgetMode::Practical);
  require_usage(m >= 2, "train: m must be at least 2");
  require_usage(tc.lr >= 0.0 && tc.momentum >= 0.0 && tc.momentum < 1.0 && tc.nu >= 0.0 && tc.nu <= 1.0 &&
                    tc.max_epochs >= 1,
                "train: invalid optimizer settings");
  if (batch > 0) tc.batch = static_cast<std::size_t>(batch);

  const io::Tensor tensor = io::load_tensor(dataset_dir / kDatasetFile);
  std::vector<int> labels;
  if (fs::exists(dataset_dir / kLabelsFile)) labels = io::load_labels(dataset_dir / kLabelsFile);
  if (input_dim > 0 && input_dim != tensor.d)
    throw UsageError("train: config input_dim=" + std::to_string(input_dim) + " but dataset " +
                     (dataset_dir / kDatasetFile).string() + " has D=" + std::to_string(tensor.d));
  const bootstrap::MultiViewDataset data = io::dataset_from_tensor(tensor, labels);

  std::vector<int> widths = hidden;
  widths.push_back(d);
  nn::MultiViewModel model = nn::init_model(m, widths, tensor.d, tc.seed);
  const nn::TrainReport report = nn::train(model, data, tc);

  ensure_dir(out);
  io::atomic_write(out / kModelFile, [&](std::ostream& o) { nn::save_checkpoint(model, o); });
  io::atomic_write(out / "history.csv", [&](std::ostream& o) {
    o << "epoch,loss,rho\n";
    for (std::size_t e = 0; e < model.history.size(); ++e)
      o << e + 1 << ',' << fmt(model.history[e].loss) << ',' << fmt(model.history[e].rho) << '\n';
  });
  json manifest = {{"command", "train"},
                   {"dataset", dataset_dir.string()},
                   {"m", m},
                   {"d", d},
                   {"hidden", hidden},
                   {"input_dim", tensor.d},
                   {"lr", tc.lr},
                   {"momentum", tc.momentum},
                   {"decay", tc.decay},
                   {"nu", tc.nu},
                   {"max_epochs", tc.max_epochs},
                   {"early_stop_delta", tc.early_stop_delta},
                   {"early_stop_patience", tc.early_stop_patience},
                   {"batch", report.batch_size},
                   {"batches_per_epoch", report.batches_per_epoch},
                   {"epochs_run", report.epochs_run},
                   {"stopped_early", report.stopped_early},
                   {"seed", tc.seed}};
  write_json(out / "train_manifest.json", manifest);
  log << "train: " << report.epochs_run << " epochs, final loss " << model.history.back().loss << '\n';
  return kSuccess;
}

// -------------------------------------------------------------------- eval

int cmd_eval(const Section& cfg, const fs::path& out, std::ostream& log) {
  const fs::path dataset_dir = cfg.require_string("dataset");
  const fs::path model_path = cfg.require_string("model");
  const std::vector<std::string> wanted = cfg.get_string_list("metrics", {"clustering", "affinity", "nn_match"});
  const int clusters = cfg.get_int("clusters", 0);
  const int subnet = cfg.get_int("subnet", -1);
  const int restarts = cfg.get_int("restarts", 10);
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  cfg.reject_unused();
  const std::set<std::string> known{"clustering", "affinity", "nn_match"};
  for (const auto& w : wanted) require_usage(known.count(w) != 0, "eval: unknown metric '" + w + "'");
  require_usage(restarts >= 1, "eval: restarts must be positive");
  require_usage(clusters >= 0, "eval: clusters must be non-negative");

  nn::MultiViewModel model;
  {
    std::ifstream in(model_path, std::ios::binary);
    if (!in) throw io::IoError(model_path, "cannot open for reading");
    try {
      model = nn::load_checkpoint(in);
    } catch (const io::FormatError& e) {
      throw io::IoError(model_path, e.what());
    }
  }
  const io::Tensor tensor = io::load_tensor(dataset_dir / kDatasetFile);
  if (tensor.d != model.input_dim())
    throw UsageError("eval: model expects input dimension " + std::to_string(model.input_dim()) + " but dataset has D=" +
                     std::to_string(tensor.d));
  require_usage(subnet < model.m(), "eval: subnet index out of range");
  const int chosen = subnet >= 0 ? subnet : nn::pick_subnet(model, seed);

  const std::vector<Matrix> views = io::views_from_tensor(tensor);
  std::vector<Matrix> embeddings;  // samples × d, centered
  for (const Matrix& v : views) embeddings.push_back(centered_samples(nn::embed(model, v, chosen)));

  json report = {{"command", "eval"}, {"seed", seed}, {"subnet", chosen}, {"m", model.m()}, {"d", model.d()}};
  json warnings = json::array();

  std::vector<int> labels;
  const bool have_labels = fs::exists(dataset_dir / kLabelsFile);
  if (have_labels) labels = io::load_labels(dataset_dir / kLabelsFile);
  auto want = [&](const char* name) { return std::find(wanted.begin(), wanted.end(), name) != wanted.end(); };

  if (want("clustering")) {
    if (!have_labels) {
      report["clustering"] = nullptr;
      warnings.push_back("clustering skipped: no labels file");
    } else {
      Matrix points(tensor.n * tensor.m, model.d());
      std::vector<int> truth;
      for (Index v = 0; v < tensor.m; ++v) {
        points.middleRows(v * tensor.n, tensor.n) = embeddings[static_cast<std::size_t>(v)];
        truth.insert(truth.end(), labels.begin(), labels.end());
      }
      const int k = clusters > 0 ? clusters : static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
      const metrics::KMeansResult km = metrics::kmeans(points, k, seed, restarts);
      const metrics::ClusterEval ce = metrics::hungarian_accuracy(km.assignments, truth);
      report["clustering"] = {{"k", k}, {"accuracy", ce.accuracy}, {"inertia", km.inertia}, {"restarts", restarts}};
    }
  }

  if (want("affinity")) {
    std::vector<Matrix> emb_for_aff = embeddings;
    report["r_s"] = tensor.m >= 2 ? json(metrics::inter_set_affinity(emb_for_aff)) : json(nullptr);
    if (fs::exists(dataset_dir / kSignalFile)) {
      const io::Tensor signal = io::load_tensor(dataset_dir / kSignalFile);
      if (signal.n != tensor.n || signal.m != tensor.m) throw UsageError("eval: signal file does not match dataset shape");
      std::vector<Matrix> truth;
      for (const Matrix& s : io::views_from_tensor(signal)) truth.push_back(centered_samples(s));
      const metrics::AffinityReport ar = metrics::affinity_report(truth, emb_for_aff);
      report["r_a"] = ar.r_a;
      report["r_a_per_view"] = ar.per_view;
    } else {
      report["r_a"] = nullptr;
      warnings.push_back("r_a skipped: no ground-truth signal file");
    }
  }

  if (want("nn_match")) {
    if (!have_labels || tensor.m < 2) {
      report["nn_match"] = nullptr;
      warnings.push_back("nn_match skipped: needs labels and at least 2 views");
    } else {
      Matrix probes((tensor.m - 1) * tensor.n, model.d());
      std::vector<int> probe_labels;
      for (Index v = 1; v < tensor.m; ++v) {
        probes.middleRows((v - 1) * tensor.n, tensor.n) = embeddings[static_cast<std::size_t>(v)];
        probe_labels.insert(probe_labels.end(), labels.begin(), labels.end());
      }
      report["nn_match"] = metrics::nn_match(embeddings[0], labels, probes, probe_labels);
    }
  }
  report["warnings"] = warnings;

  ensure_dir(out);
  write_json(out / "metrics.json", report);
  log << "eval: wrote " << (out / "metrics.json").string() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------- covcheck

json CovcheckReport::to_json() const {
  return {{"identity_batches", identity_batches},
          {"bound_batches", bound_batches},
          {"identical_batches", identical_batches},
          {"max_identity_residual", max_identity_residual},
          {"max_asymmetry", max_asymmetry},
          {"max_rho", max_rho},
          {"max_rho_gev_diff", max_rho_gev_diff},
          {"max_identical_deviation", max_identical_deviation},
          {"passed", passed()},
          {"failures", failures}};
}

namespace {

struct BatchShape {
  int m;
  Index d;
  Index n;
};

BatchShape random_shape(Rng& rng) {
  const int m = 2 + static_cast<int>(rng.index(7));
  const Index d = 2 + static_cast<Index>(rng.index(15));
  return {m, d, 4 * d};
}

}  // namespace

CovcheckReport run_covcheck(const CovcheckConfig& cfg) {
  CovcheckReport r;
  const Rng root(cfg.seed);

  for (int b = 0; b < cfg.batches_identity; ++b) {
    Rng rng = root.split(static_cast<std::uint64_t>(b));
    const BatchShape s = random_shape(rng);
    std::vector<Matrix> views;
    for (int l = 0; l < s.m; ++l) views.push_back(cov::center_columns(rng.normal_matrix(s.d, s.n)));
    Matrix r_b = cov::between_view_cov(cov::total_view_cov(views), cov::within_view_cov(views));
    if (cfg.inject_asymmetry && b == 0) r_b(0, s.d - 1) += 1e-3 * linalg::max_abs(r_b);

    Matrix pairwise = Matrix::Zero(s.d, s.d);
    for (int l = 0; l < s.m; ++l)
      for (int k = 0; k < s.m; ++k)
        if (l != k) pairwise += views[static_cast<std::size_t>(l)] * views[static_cast<std::size_t>(k)].transpose();
    pairwise /= static_cast<double>(s.m);

    const double residual = linalg::max_abs(r_b - pairwise) / linalg::max_abs(pairwise);
    const double asym = linalg::max_abs(r_b - r_b.transpose()) / std::max(1e-300, linalg::max_abs(r_b));
    r.max_identity_residual = std::max(r.max_identity_residual, residual);
    r.max_asymmetry = std::max(r.max_asymmetry, asym);
    ++r.identity_batches;
    if (!(residual <= 1e-10) || !(asym <= linalg::kSymmetryTol))
      r.failures.push_back({{"suite", "identity"}, {"batch", b}, {"m", s.m}, {"d", s.d}, {"n", s.n},
                            {"residual", residual}, {"asymmetry", asym}});
  }

  for (int b = 0; b < cfg.batches_bound; ++b) {
    Rng rng = root.split(0x100000ULL + static_cast<std::uint64_t>(b));
    const BatchShape s = random_shape(rng);
    std::vector<Matrix> views;
    const int kind = b % 4;
    if (kind == 0) {
      for (int l = 0; l < s.m; ++l) views.push_back(rng.normal_matrix(s.d, s.n));
    } else if (kind == 1) {
      // Nearly rank-deficient: rank-r signal plus 1e-9 noise.
      const Index rank = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(std::max<Index>(1, s.d / 2))));
      for (int l = 0; l < s.m; ++l)
        views.push_back(rng.normal_matrix(s.d, rank) * rng.normal_matrix(rank, s.n) + 1e-9 * rng.normal_matrix(s.d, s.n));
    } else if (kind == 2) {
      // Almost identical views.
      const Matrix base = rng.normal_matrix(s.d, s.n);
      for (int l = 0; l < s.m; ++l) views.push_back(base + 1e-6 * rng.normal_matrix(s.d, s.n));
    } else {
      // Fewer samples than dimensions after centering.
      for (int l = 0; l < s.m; ++l) views.push_back(rng.normal_matrix(s.d, std::max<Index>(2, s.d / 2)));
    }
    const cov::CovarianceSet c = cov::estimate(views, 0.2);
    const objective::MvCorrResult res = objective::mv_corr(c, true);
    const double gev_mean = res.subspace->values.sum() / (static_cast<double>(c.dim()) * (c.m - 1));
    const double diff = std::abs(res.rho - gev_mean);
    r.max_rho = std::max(r.max_rho, res.rho);
    r.max_rho_gev_diff = std::max(r.max_rho_gev_diff, diff);
    ++r.bound_batches;
    if (!(res.rho <= 1.0 + 1e-8) || !(diff <= 1e-8))
      r.failures.push_back({{"suite", "bound"}, {"batch", b}, {"kind", kind}, {"m", s.m}, {"d", s.d},
                            {"n", views[0].cols()}, {"rho", res.rho}, {"gev_mean", gev_mean}});
  }

  for (int b = 0; b < cfg.batches_identical; ++b) {
    Rng rng = root.split(0x200000ULL + static_cast<std::uint64_t>(b));
    const BatchShape s = random_shape(rng);
    const Matrix x = rng.normal_matrix(s.d, s.n);
    const std::vector<Matrix> views(static_cast<std::size_t>(s.m), x);
    const double rho = objective::mv_corr(cov::estimate(views, 0.0)).rho;
    const double dev = std::abs(rho - 1.0);
    r.max_identical_deviation = std::max(r.max_identical_deviation, dev);
    ++r.identical_batches;
    if (!(dev <= 1e-10))
      r.failures.push_back({{"suite", "identical"}, {"batch", b}, {"m", s.m}, {"d", s.d}, {"rho", rho}});
  }
  return r;
}

int cmd_covcheck(const Section& cfg, const fs::path& out, std::ostream& log) {
  CovcheckConfig c;
  c.batches_identity = cfg.get_int("batches_identity", c.batches_identity);
  c.batches_bound = cfg.get_int("batches_bound", c.batches_bound);
  c.batches_identical = cfg.get_int("batches_identical", c.batches_identical);
  c.seed = cfg.get_u64("seed", c.seed);
  c.inject_asymmetry = cfg.get_bool("inject_asymmetry", c.inject_asymmetry);
  cfg.reject_unused();
  require_usage(c.batches_identity >= 0 && c.batches_bound >= 0 && c.batches_identical >= 0,
                "covcheck: batch counts must be non-negative");

  const CovcheckReport r = run_covcheck(c);
  const json j = r.to_json();
  ensure_dir(out);
  write_json(out / "covcheck.json", j);
  log << "covcheck: " << (r.passed() ? "PASS" : "FAIL") << " identity_batches=" << r.identity_batches
      << " bound_batches=" << r.bound_batches << " max_identity_residual=" << r.max_identity_residual
      << " max_rho=" << fmt(r.max_rho) << " max|rho-rho_gev|=" << r.max_rho_gev_diff << '\n';
  if (!r.passed()) {
    log << "first failure: " << r.failures.front().dump() << '\n';
    return kViolation;
  }
  return kSuccess;
}

// -------------------------------------------------------------- boundcheck

int cmd_boundcheck(const Section& cfg, const fs::path& out, std::ostream& log) {
  bound::PoolParams pp;
  pp.n = cfg.get_long("n", pp.n);
  pp.d = cfg.get_long("d", pp.d);
  pp.k = cfg.get_long("k", pp.k);
  pp.m_views = cfg.get_int("views", pp.m_views);
  pp.alpha = cfg.get_double("alpha", pp.alpha);
  pp.beta = cfg.get_double("beta", pp.beta);
  bound::GridConfig gc;
  gc.m_grid = cfg.get_int_list("m_grid", gc.m_grid);
  gc.trials = cfg.get_int("trials", gc.trials);
  gc.nu = cfg.get_double("nu", gc.nu);
  gc.t_nominal = cfg.get_double("t", gc.t_nominal);
  const std::string sampling = cfg.get_string("sampling", "with");
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  cfg.reject_unused();
  pp.seed = seed;
  gc.seed = seed;
  require_usage(sampling == "with" || sampling == "without", "boundcheck: sampling must be 'with' or 'without'");
  gc.sampling = sampling == "with" ? bound::Sampling::WithReplacement : bound::Sampling::WithoutReplacement;
  require_usage(pp.n >= 2 && pp.d >= 2 && pp.k >= 1 && pp.k < pp.d && pp.m_views >= 2, "boundcheck: invalid pool shape");
  require_usage(gc.trials >= 1 && !gc.m_grid.empty(), "boundcheck: need trials >= 1 and a nonempty m_grid");
  for (int m : gc.m_grid) require_usage(m >= 2 && m <= pp.m_views, "boundcheck: every m must lie in [2, views]");

  const bound::ViewPool pool = bound::make_pool(pp);
  const bound::DeviationReport report = bound::run_grid(pool, gc);

  ensure_dir(out);
  io::atomic_write(out / "bounds.csv", [&](std::ostream& o) { bound::write_csv(o, report); });
  io::atomic_write(out / "bounds_summary.csv", [&](std::ostream& o) {
    o << "m,mean_delta_w,mean_delta_t,max_delta_t_over_Nm,mean_rho_m,rho_full,gap\n";
    for (const auto& s : report.summary)
      o << s.m << ',' << fmt(s.mean_delta_w) << ',' << fmt(s.mean_delta_t) << ',' << fmt(s.max_delta_t_ratio) << ','
        << fmt(s.mean_rho_m) << ',' << fmt(report.rho_full) << ',' << fmt(s.gap) << '\n';
  });
  double max_rho = 0.0;
  for (const auto& row : report.rows) max_rho = std::max(max_rho, row.rho_m);
  const json summary = {{"command", "boundcheck"},
                        {"n", pp.n},
                        {"d", pp.d},
                        {"k", pp.k},
                        {"views", pp.m_views},
                        {"alpha", pp.alpha},
                        {"beta", pp.beta},
                        {"m_grid", gc.m_grid},
                        {"trials", gc.trials},
                        {"nu", gc.nu},
                        {"sampling", sampling},
                        {"seed", seed},
                        {"t", report.t_nominal},
                        {"rho_full", report.rho_full},
                        {"max_rho_m", max_rho},
                        {"slope_delta_w", report.slope_delta_w},
                        {"slope_in_expected_range", report.slope_delta_w >= -1.3 && report.slope_delta_w <= -0.7},
                        {"delta_t_bound_holds", report.delta_t_bound_holds}};
  write_json(out / "summary.json", summary);
  log << "boundcheck: slope(log mean delta_w vs log m)=" << report.slope_delta_w
      << " delta_t<=N*m on every trial: " << (report.delta_t_bound_holds ? "yes" : "NO") << '\n';
  if (!report.delta_t_bound_holds || max_rho > 1.0 + 1e-8) return kViolation;
  return kSuccess;
}

// --------------------------------------------------------------------- CLI

int run_cli(int argc, char** argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Multi-view correlation learning with view bootstrapping"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "key=value config file with one [section] per command");
  app.add_option("--set", overrides, "override a config key (key=value or section.key=value)");
  app.add_option("--seed", seed, "override every seed of the command");
  app.add_option("--out", out_dir, "output directory");
  const std::vector<std::string> verbs{"simulate", "train", "eval", "covcheck", "boundcheck"};
  for (const auto& v : verbs) app.add_subcommand(v)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  try {
    Section section(verb);
    if (!config_path.empty()) {
      auto sections = load_config(config_path);
      if (auto it = sections.find(verb); it != sections.end()) section = it->second;
    }
    for (const auto& o : overrides) apply_override(section, o);
    if (seed) section.set("seed", std::to_string(*seed));

    const fs::path out(out_dir);
    if (verb == "simulate") return cmd_simulate(section, out, log);
    if (verb == "train") return cmd_train(section, out, log);
    if (verb == "eval") return cmd_eval(section, out, log);
    if (verb == "covcheck") return cmd_covcheck(section, out, log);
    return cmd_boundcheck(section, out, log);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kViolation;
  }
}

}  // namespace mvcorr::cli
