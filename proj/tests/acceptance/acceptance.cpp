// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only N]... [--workdir DIR]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mvcorr/bootstrap.hpp"
#include "mvcorr/boundlab.hpp"
#include "mvcorr/covariance.hpp"
#include "mvcorr/metrics.hpp"
#include "mvcorr/network.hpp"
#include "mvcorr/objective.hpp"
#include "mvcorr/synthdata.hpp"

namespace fs = std::filesystem;
using namespace mvcorr;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace {

// Pinned tolerances and budgets.
constexpr double kIdentityTol = 1e-10;
constexpr double kRhoBoundSlack = 1e-8;
constexpr double kIdenticalRhoTol = 1e-10;
constexpr double kObjectiveGradTol = 1e-5;
constexpr double kNetworkGradTol = 1e-4;
constexpr double kFdStepObjective = 1e-5;
constexpr double kFdStepNetwork = 1e-6;
constexpr double kSlopeLo = -1.3;
constexpr double kSlopeHi = -0.7;
constexpr double kGapConfidence = 0.95;
constexpr double kClusterMargin = 0.15;
// simulate 4, train 3, eval 1, boundcheck 3
constexpr int kDeterminismFiles = 11;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome(const fs::path&)> run;
};

std::string num(double x, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

std::vector<Matrix> random_views(int m, Index d, Index n, Rng& rng) {
  std::vector<Matrix> v;
  for (int l = 0; l < m; ++l) v.push_back(rng.normal_matrix(d, n));
  return v;
}

// ----------------------------------------------------------------------- 1

Outcome total_covariance_identity(const fs::path&) {
  Rng root(101);
  double worst = 0.0;
  for (int b = 0; b < 500; ++b) {
    Rng rng = root.split(static_cast<std::uint64_t>(b));
    const int m = 2 + static_cast<int>(rng.index(7));
    const Index d = 2 + static_cast<Index>(rng.index(15));
    std::vector<Matrix> views = random_views(m, d, 4 * d, rng);
    for (auto& v : views) v = cov::center_columns(v);
    Matrix pairwise = Matrix::Zero(d, d);
    for (int l = 0; l < m; ++l)
      for (int k = 0; k < m; ++k)
        if (l != k)
          for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
              for (Index s = 0; s < 4 * d; ++s) pairwise(i, j) += views[l](i, s) * views[k](j, s);
    pairwise /= static_cast<double>(m);
    const Matrix rb = cov::total_view_cov(views) - cov::within_view_cov(views);
    worst = std::max(worst, max_abs(rb - pairwise) / max_abs(pairwise));
  }
  return {worst <= kIdentityTol, "500 batches, max relative residual " + num(worst) + " (tol " + num(kIdentityTol) + ")"};
}

// ----------------------------------------------------------------------- 2

Outcome boundedness(const fs::path&) {
  Rng root(202);
  double max_rho = -1.0;
  int adversarial = 0;
  for (int b = 0; b < 1000; ++b) {
    Rng rng = root.split(static_cast<std::uint64_t>(b));
    const int m = 2 + static_cast<int>(rng.index(7));
    const Index d = 2 + static_cast<Index>(rng.index(15));
    const Index n = 4 * d;
    std::vector<Matrix> views;
    switch (b % 4) {
      case 0:
        views = random_views(m, d, n, rng);
        break;
      case 1: {  // rank-1 signal plus 1e-9 noise
        const Matrix u = rng.normal_matrix(d, 1);
        for (int l = 0; l < m; ++l) views.push_back(u * rng.normal_matrix(1, n) + 1e-9 * rng.normal_matrix(d, n));
        ++adversarial;
        break;
      }
      case 2: {  // nearly identical views
        const Matrix x = rng.normal_matrix(d, n);
        for (int l = 0; l < m; ++l) views.push_back(x + 1e-7 * rng.normal_matrix(d, n));
        ++adversarial;
        break;
      }
      default: {  // fewer samples than dimensions
        views = random_views(m, d, std::max<Index>(2, d / 2), rng);
        ++adversarial;
      }
    }
    max_rho = std::max(max_rho, objective::mv_corr(cov::estimate(views, 0.2)).rho);
  }
  double max_dev = 0.0;
  for (int b = 0; b < 100; ++b) {
    Rng rng = root.split(0x10000ULL + static_cast<std::uint64_t>(b));
    const int m = 2 + static_cast<int>(rng.index(7));
    const Index d = 2 + static_cast<Index>(rng.index(15));
    const std::vector<Matrix> views(static_cast<std::size_t>(m), rng.normal_matrix(d, 4 * d));
    max_dev = std::max(max_dev, std::abs(objective::mv_corr(cov::estimate(views, 0.0)).rho - 1.0));
  }
  const bool pass = max_rho <= 1.0 + kRhoBoundSlack && max_dev <= kIdenticalRhoTol;
  return {pass, "1000 batches (" + std::to_string(adversarial) + " adversarial), max rho " + num(max_rho, 12) +
                    "; identical views max |rho-1| " + num(max_dev)};
}

// ----------------------------------------------------------------------- 3

Outcome gradient_correctness(const fs::path&) {
  Rng rng(303);
  // objective level: m=3, d=4, N=30
  std::vector<Matrix> h = random_views(3, 4, 30, rng);
  const auto analytic = objective::grad_loss(h, 0.2);
  double num_err = 0.0, scale = 0.0;
  for (std::size_t l = 0; l < h.size(); ++l)
    for (Index j = 0; j < h[l].cols(); ++j)
      for (Index i = 0; i < h[l].rows(); ++i) {
        const double x0 = h[l](i, j);
        h[l](i, j) = x0 + kFdStepObjective;
        const double up = objective::loss_value(h, 0.2);
        h[l](i, j) = x0 - kFdStepObjective;
        const double down = objective::loss_value(h, 0.2);
        h[l](i, j) = x0;
        const double fd = (up - down) / (2 * kFdStepObjective);
        num_err = std::max(num_err, std::abs(fd - analytic[l](i, j)));
        scale = std::max(scale, std::abs(fd));
      }
  const double obj_rel = num_err / scale;

  // network level: D=6, widths (5,4), m=3, N=20, 10 random parameters
  nn::MultiViewModel model = nn::init_model(3, {5, 4}, 6, 304);
  bootstrap::ViewBatch batch;
  for (int s = 0; s < 3; ++s) batch.slots.push_back(rng.normal_matrix(6, 20));
  batch.instance_ids.assign(20, 0);
  const nn::BatchGradient g = nn::batch_gradient(model, batch, 0.2);
  double diff2 = 0.0, ref2 = 0.0;
  for (int p = 0; p < 10; ++p) {
    const std::size_t s = rng.index(3), k = rng.index(2);
    nn::Layer& layer = model.subnets[s].layers[k];
    const Index i = static_cast<Index>(rng.index(static_cast<std::size_t>(layer.weight.rows())));
    const Index j = static_cast<Index>(rng.index(static_cast<std::size_t>(layer.weight.cols() + 1)));
    double& theta = j < layer.weight.cols() ? layer.weight(i, j) : layer.bias(i);
    const auto& gl = g.grads[s][k];
    const double an = j < layer.weight.cols() ? gl.weight(i, j) : gl.bias(i);
    const double x0 = theta;
    theta = x0 + kFdStepNetwork;
    const double up = nn::batch_loss(model, batch, 0.2);
    theta = x0 - kFdStepNetwork;
    const double down = nn::batch_loss(model, batch, 0.2);
    theta = x0;
    const double fd = (up - down) / (2 * kFdStepNetwork);
    diff2 += (fd - an) * (fd - an);
    ref2 += fd * fd;
  }
  const double net_rel = std::sqrt(diff2 / ref2);
  return {obj_rel < kObjectiveGradTol && net_rel < kNetworkGradTol,
          "objective rel err " + num(obj_rel) + " (tol " + num(kObjectiveGradTol) + "), network rel err " +
              num(net_rel) + " (tol " + num(kNetworkGradTol) + ")"};
}

// ---------------------------------------------------------- shared training

struct TrainedEmbedding {
  std::vector<Matrix> embeddings;  // per view, samples × d, centered
  double first_loss = 0.0;
  double last_loss = 0.0;
  int epochs = 0;
};

TrainedEmbedding train_and_embed(const synth::SyntheticDataset& data, int m, int d, const std::vector<int>& hidden,
                                 std::size_t batch, int max_epochs, std::uint64_t seed) {
  const bootstrap::MultiViewDataset mv = synth::to_multiview_dataset(data);
  std::vector<int> widths = hidden;
  widths.push_back(d);
  nn::MultiViewModel model = nn::init_model(m, widths, data.params.dim, seed);
  nn::TrainConfig cfg;
  cfg.batch = batch;
  cfg.max_epochs = max_epochs;
  cfg.seed = seed;
  const nn::TrainReport report = nn::train(model, mv, cfg);
  const int subnet = nn::pick_subnet(model, seed);
  TrainedEmbedding out;
  for (const Matrix& x : data.measurements)
    out.embeddings.push_back(cov::center_columns(nn::embed(model, x, subnet)).transpose());
  out.first_loss = model.history.front().loss;
  out.last_loss = model.history.back().loss;
  out.epochs = report.epochs_run;
  return out;
}

// ----------------------------------------------------------------------- 4

Outcome affinity_peak(const fs::path&) {
  synth::SynthParams p;
  p.n = 20000;
  p.dim = 64;
  p.k = 10;
  p.m_views = 4;
  p.alpha = 0.5;
  p.beta = 0.7;
  p.seed = 1;
  const synth::SyntheticDataset data = synth::generate(p);
  std::vector<Matrix> truth;
  for (const Matrix& s : data.signal) truth.push_back(cov::center_columns(s).transpose());

  const std::vector<int> grid{5, 10, 15, 20, 40};
  std::vector<double> ra, rs;
  bool loss_decreased = true;
  std::ostringstream detail;
  for (int d : grid) {
    const TrainedEmbedding t = train_and_embed(data, 4, d, {64, 32}, 400, 100, 41);
    const metrics::AffinityReport r = metrics::affinity_report(truth, t.embeddings);
    ra.push_back(r.r_a);
    rs.push_back(r.r_s);
    loss_decreased = loss_decreased && t.last_loss < t.first_loss;
    detail << " d=" << d << ":R_a=" << num(r.r_a, 4) << ",R_s=" << num(r.r_s, 4) << ",epochs=" << t.epochs;
  }
  const auto argmax = static_cast<std::size_t>(std::max_element(ra.begin(), ra.end()) - ra.begin());
  bool rs_non_increasing = true;
  for (std::size_t i = 2; i < grid.size(); ++i) rs_non_increasing = rs_non_increasing && rs[i] <= rs[i - 1];
  const bool pass = grid[argmax] == 10 && rs_non_increasing && loss_decreased;
  return {pass, "argmax R_a at d=" + std::to_string(grid[argmax]) + " (want 10), R_s non-increasing from d=10: " +
                    (rs_non_increasing ? "yes" : "no") + ", loss decreased: " + (loss_decreased ? "yes" : "no") +
                    ";" + detail.str()};
}

// ----------------------------------------------------------------------- 5

Outcome concentration_rates(const fs::path&) {
  const bound::ViewPool pool = bound::make_pool(bound::PoolParams{});
  const bound::DeviationReport r = bound::run_grid(pool, bound::GridConfig{});
  double worst_ratio = 0.0;
  bool holds = true;
  for (const auto& row : r.rows) {
    const double limit = static_cast<double>(row.n) * row.m;
    holds = holds && row.delta_t <= limit;
    worst_ratio = std::max(worst_ratio, row.delta_t / limit);
  }
  const bool slope_ok = r.slope_delta_w >= kSlopeLo && r.slope_delta_w <= kSlopeHi;
  return {slope_ok && holds, "slope of log mean delta_w vs log m = " + num(r.slope_delta_w, 4) + " (want [" +
                                 num(kSlopeLo) + ", " + num(kSlopeHi) + "]); delta_t <= N*m on all " +
                                 std::to_string(r.rows.size()) + " trials: " + (holds ? "yes" : "no") +
                                 " (max delta_t/(N m) = " + num(worst_ratio, 4) + ")"};
}

// ----------------------------------------------------------------------- 6

Outcome bootstrap_consistency(const fs::path&) {
  bound::PoolParams p;
  p.m_views = 16;
  const bound::ViewPool pool = bound::make_pool(p);
  const auto gaps = bound::rho_gap(pool, {2, 8}, 200, 606, 0.2, bound::Sampling::WithoutReplacement);
  const double confidence = bound::gap_order_confidence(gaps[0], gaps[1], 2000, 607);
  double max_rho = -1.0;
  for (const auto& g : gaps)
    for (double r : g.rho_m) max_rho = std::max(max_rho, r);
  const bool pass = gaps[1].gap < gaps[0].gap && confidence >= kGapConfidence && max_rho <= 1.0 + kRhoBoundSlack;
  return {pass, "gap m=2: " + num(gaps[0].gap) + ", gap m=8: " + num(gaps[1].gap) + ", bootstrap confidence " +
                    num(confidence, 4) + " (want >= " + num(kGapConfidence) + "), max rho_m " + num(max_rho)};
}

// ----------------------------------------------------------------------- 7

Outcome clustering(const fs::path&) {
  synth::SynthParams p;
  p.n = 3000;
  p.dim = 64;
  p.k = 5;
  p.m_views = 8;
  p.classes = 3;
  p.seed = 11;
  const synth::SyntheticDataset data = synth::generate(p);
  const TrainedEmbedding t = train_and_embed(data, 4, 5, {64, 32}, 400, 100, 71);

  const Index n = p.n;
  std::vector<int> truth;
  Matrix emb(n * p.m_views, 5), raw(n * p.m_views, p.dim);
  for (int v = 0; v < p.m_views; ++v) {
    emb.middleRows(v * n, n) = t.embeddings[static_cast<std::size_t>(v)];
    raw.middleRows(v * n, n) = data.measurements[static_cast<std::size_t>(v)].transpose();
    truth.insert(truth.end(), data.labels.begin(), data.labels.end());
  }
  const double acc_emb = metrics::hungarian_accuracy(metrics::kmeans(emb, 3, 72).assignments, truth).accuracy;
  const double acc_raw = metrics::hungarian_accuracy(metrics::kmeans(raw, 3, 72).assignments, truth).accuracy;
  const double chance = 1.0 / 3.0;
  const bool pass = acc_emb >= chance + kClusterMargin && acc_emb >= acc_raw + kClusterMargin &&
                    t.last_loss < t.first_loss;
  return {pass, "embedding accuracy " + num(acc_emb, 4) + ", raw-input accuracy " + num(acc_raw, 4) + ", chance " +
                    num(chance, 4) + " (margin " + num(kClusterMargin) + "), epochs " + std::to_string(t.epochs)};
}

// ----------------------------------------------------------------------- 8

Outcome budget_rules(const fs::path&) {
  const int m = bootstrap::max_subnetworks(64, bootstrap::BudgetMode::Theoretical);
  const std::size_t n = bootstrap::batch_size_for(64);
  return {m == 8 && n == 267, "max_subnetworks(64, theoretical) = " + std::to_string(m) +
                                  ", batch_size_for(64) = " + std::to_string(n)};
}

// ----------------------------------------------------------------------- 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mvcorr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream log, err;
  const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), log, err);
  if (rc != 0) std::cerr << err.str();
  return rc;
}

Outcome determinism(const fs::path& work) {
  const fs::path root = work / "determinism";
  fs::remove_all(root);
  std::vector<std::string> mismatches;
  int failures = 0;
  // Both runs use the same paths so the configs are identical; the first run is
  // moved aside before the second.
  const fs::path dir = root / "run";
  for (const char* snapshot : {"a", "b"}) {
    failures += invoke({"simulate", "--out", (dir / "data").string(), "--set", "n=600", "--set", "dim=16", "--set",
                        "k=4", "--set", "views=4", "--set", "classes=2", "--seed", "9"}) != 0;
    failures += invoke({"train", "--out", (dir / "model").string(), "--set", "dataset=" + (dir / "data").string(),
                        "--set", "d=4", "--set", "m=2", "--set", "hidden=16", "--set", "max_epochs=5", "--seed",
                        "9"}) != 0;
    failures += invoke({"eval", "--out", (dir / "eval").string(), "--set", "dataset=" + (dir / "data").string(),
                        "--set", "model=" + (dir / "model" / "model.mvcm").string(), "--seed", "9"}) != 0;
    failures += invoke({"boundcheck", "--out", (dir / "bounds").string(), "--set", "n=64", "--set", "views=16",
                        "--set", "m_grid=2,4,8", "--set", "trials=10", "--seed", "9"}) != 0;
    if (fs::exists(dir)) fs::rename(dir, root / snapshot);
  }
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    const fs::path twin = root / "b" / rel;
    ++compared;
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) mismatches.push_back(rel.string());
  }
  std::string detail = std::to_string(compared) + " output files compared, " + std::to_string(mismatches.size()) +
                       " differ, " + std::to_string(failures) + " command failures";
  for (const auto& m : mismatches) detail += " [" + m + "]";
  return {failures == 0 && mismatches.empty() && compared == kDeterminismFiles, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvcorr acceptance suite"};
  std::vector<int> only;
  std::string workdir = (fs::temp_directory_path() / "mvcorr_acceptance").string();
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--workdir", workdir, "scratch directory for file-based criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "total-covariance identity", 10, total_covariance_identity},
      {2, "boundedness of rho", 30, boundedness},
      {3, "gradient correctness", 60, gradient_correctness},
      {4, "affinity peak at the true signal dimension", 20 * 60, affinity_peak},
      {5, "concentration rates", 5 * 60, concentration_rates},
      {6, "bootstrap consistency", 5 * 60, bootstrap_consistency},
      {7, "downstream clustering", 15 * 60, clustering},
      {8, "budget rules", 1, budget_rules},
      {9, "determinism", 5 * 60, determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  fs::create_directories(workdir);

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(workdir);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s; runtime %.1fs (budget %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
