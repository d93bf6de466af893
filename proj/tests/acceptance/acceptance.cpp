// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Pass criterion names as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ltc/annotation.hpp"
#include "ltc/clustering.hpp"
#include "ltc/evaluation.hpp"
#include "ltc/features.hpp"
#include "ltc/models.hpp"
#include "ltc/pca.hpp"
#include "ltc/phrasing.hpp"
#include "ltc/report.hpp"
#include "ltc/sweep.hpp"
#include "ltc/synthgen.hpp"
#include "oracles.hpp"
#include "reference_table.hpp"

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Verdict metric_oracles() {
  std::mt19937_64 rng(20240501);
  double worst_auc = 0, worst_f1 = 0, metric_secs = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10000)(rng);
    const double rate = std::uniform_real_distribution<double>(0.02, 0.98)(rng);
    const int levels = std::uniform_int_distribution<int>(1, 4)(rng) == 1 ? 20 : 1000000;
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = std::bernoulli_distribution(rate)(rng);
      s[i] = std::uniform_int_distribution<int>(0, levels)(rng) / static_cast<double>(levels) + 0.3 * y[i];
    }
    y[0] = 1;
    y[1] = 0;
    const auto t0 = Clock::now();
    const double got = ltc::roc_auc(y, s);
    metric_secs += seconds_since(t0);
    worst_auc = std::max(worst_auc, std::abs(got - oracle::auc_pairwise(y, s)));
  }
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 10000)(rng);
    const double rate = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double flip = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = std::bernoulli_distribution(rate)(rng);
      p[i] = std::bernoulli_distribution(flip)(rng) ? 1 - y[i] : y[i];
    }
    const auto t0 = Clock::now();
    const double got = ltc::f1_score(y, p);
    metric_secs += seconds_since(t0);
    worst_f1 = std::max(worst_f1, std::abs(got - oracle::f1_confusion(y, p)));
  }
  Verdict v;
  v.pass = worst_auc <= 1e-12 && worst_f1 <= 1e-12 && metric_secs < 60.0;
  v.detail = "max |auc - pairwise| = " + fmt("%.3g", worst_auc) + ", max |f1 - confusion| = " + fmt("%.3g", worst_f1) +
             " over 1000 instances each; metric runtime " + fmt("%.3f", metric_secs) + "s (budget 60s, oracle time excluded)";
  return v;
}

Verdict table_arithmetic() {
  std::size_t ok = 0, total = 0;
  double worst = 0;
  Verdict v;
  for (const auto& row : reference::improvements())
    for (const auto& c : row.cells) {
      ++total;
      const double got = ltc::improvement_pct(row.base, c.value);
      const double err = std::abs(got - c.printed_pct);
      worst = std::max(worst, err);
      if (err <= 0.15) ++ok;
      else v.notes.push_back(row.product + " " + row.measure + ": computed " + ltc::format_pct_3sig(got) +
                             " vs printed " + fmt("%.3g", c.printed_pct));
    }
  v.pass = ok == 32 && total == 32;
  v.detail = std::to_string(ok) + "/" + std::to_string(total) + " improvements within 0.15pp (max deviation " +
             fmt("%.3f", worst) + "pp)";
  return v;
}

Verdict long_tail() {
  const std::vector<double> q_list{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  const std::string product = "business_account";
  const std::vector<ltc::ModelKind> kinds{ltc::ModelKind::kGbdt, ltc::ModelKind::kAuto};
  const std::vector<ltc::RankCriterion> crits{ltc::RankCriterion::kFrequency, ltc::RankCriterion::kRate};
  // [kind][criterion][q] summed over seeds
  std::vector<std::vector<std::vector<double>>> auc(2, std::vector<std::vector<double>>(2, std::vector<double>(q_list.size())));
  for (auto seed : kSeeds) {
    ltc::SynthConfig cfg;
    cfg.seed = seed;
    auto out = ltc::generate(cfg);
    auto reg = ltc::registry_from_truth(out.truth);
    auto ann = ltc::annotate_corpus(out.corpus, reg);
    auto table = ltc::build_features(out.corpus, product, out.embeddings, ann);
    for (std::size_t k = 0; k < kinds.size(); ++k)
      for (std::size_t c = 0; c < crits.size(); ++c) {
        auto ranking = ltc::rank_variables(out.corpus, ann, product, crits[c]);
        ltc::SweepConfig sc;
        sc.model.kind = kinds[k];
        sc.criterion = crits[c];
        sc.q_list = q_list;
        sc.folds = 10;
        sc.seed = seed;
        auto rep = ltc::sweep(table, ranking, sc);
        for (std::size_t i = 0; i < q_list.size(); ++i) auc[k][c][i] += rep.rows[i].auc.mean;
        std::cerr << "  long_tail seed " << seed << " " << ltc::to_string(kinds[k]) << "/" << ltc::to_string(crits[c])
                  << " auc(10)=" << fmt("%.4f", rep.rows[1].auc.mean) << " auc(100)=" << fmt("%.4f", rep.rows.back().auc.mean)
                  << std::endl;
      }
  }
  Verdict v;
  v.pass = true;
  const double n_seeds = static_cast<double>(std::size(kSeeds));
  for (std::size_t k = 0; k < kinds.size(); ++k)
    for (std::size_t c = 0; c < crits.size(); ++c) {
      std::vector<double> qs, mean;
      for (std::size_t i = 1; i < q_list.size(); ++i) {
        qs.push_back(q_list[i]);
        mean.push_back(auc[k][c][i] / n_seeds);
      }
      const double delta = mean.back() - mean.front();
      const double rho = oracle::spearman(qs, mean);
      const bool ok = delta >= 0.03 && rho >= 0.9;
      v.pass = v.pass && ok;
      std::string curve;
      for (double m : mean) curve += fmt(" %.4f", m);
      v.notes.push_back(ltc::to_string(kinds[k]) + "/" + ltc::to_string(crits[c]) + ": auc(100)-auc(10) = " +
                        fmt("%+.4f", delta) + ", spearman = " + fmt("%.3f", rho) + (ok ? "" : "  <-- below target") +
                        "; mean auc q=10..100:" + curve);
    }
  v.detail = "gbdt and auto x frequency and rate, 5 seeds, 10 folds, " + product;
  return v;
}

Verdict recovery() {
  std::size_t recovered = 0, considered = 0;
  Verdict v;
  for (auto seed : kSeeds) {
    ltc::SynthConfig cfg;
    cfg.seed = seed;
    auto out = ltc::generate(cfg);
    auto [clean, report] = ltc::clean_corpus(out.corpus);
    auto tokens = ltc::tokenize_corpus(clean);
    auto cands = ltc::filter_by_support(ltc::generate_candidates(clean, tokens), 50);
    ltc::count_product_outcomes(cands, clean, tokens);
    auto sig = ltc::select_significant(cands, clean);
    std::vector<std::vector<std::string>> sets;
    for (const auto& t : sig.texts()) sets.push_back({t});
    std::vector<std::size_t> eligible;
    for (const auto& pv : out.truth.variables) {
      double strongest = 0;
      for (double lo : pv.log_odds) strongest = std::max(strongest, std::abs(lo));
      if (strongest >= std::log(2.0) && pv.realized_frequency >= 50) eligible.push_back(pv.id);
    }
    auto r = ltc::score_recovery(sets, out.truth, &eligible);
    recovered += r.recovered;
    considered += r.considered;
    v.notes.push_back("seed " + std::to_string(seed) + ": " + std::to_string(r.recovered) + "/" +
                      std::to_string(r.considered) + " recovered (" + fmt("%.3f", r.recall) + "), " +
                      std::to_string(sig.size()) + " significant phrases");
  }
  const double recall = considered ? static_cast<double>(recovered) / static_cast<double>(considered) : 0.0;
  v.pass = recall >= 0.8;
  v.detail = "pooled recall " + fmt("%.3f", recall) + " (" + std::to_string(recovered) + "/" + std::to_string(considered) +
             ") at support >= 50, alpha = 0.01";
  return v;
}

Verdict clustering_equivalence() {
  std::mt19937_64 rng(777);
  std::size_t partitions = 0, mismatches = 0, silhouettes = 0;
  double worst_sil = 0;
  for (int f = 0; f < 20; ++f) {
    const std::size_t n = 25 * static_cast<std::size_t>(f + 1);
    const std::size_t dim = 2 + static_cast<std::size_t>(f % 4);
    Eigen::MatrixXd x;
    if (f % 2 == 0) {
      const std::size_t k = 2 + static_cast<std::size_t>(f % 5);
      x = fixture::blobs(k, n / k, dim, rng, 1.0 + 0.1 * (f % 3));
    } else {
      x = Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
      std::uniform_real_distribution<double> u(0.0, 10.0);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    }
    const auto rows = static_cast<std::size_t>(x.rows());
    auto check_sil = [&](const std::vector<int>& labels) {
      std::set<int> ids(labels.begin(), labels.end());
      ids.erase(-1);
      if (ids.size() < 2) return;
      ++silhouettes;
      worst_sil = std::max(worst_sil, std::abs(ltc::silhouette(x, labels) - oracle::silhouette(x, labels)));
    };
    for (const auto& cfg : ltc::default_cluster_grid(x)) {
      if (cfg.method != ltc::ClusterMethod::kDbscan) continue;
      auto got = ltc::dbscan(x, cfg.params.eps, cfg.params.min_pts);
      ++partitions;
      if (oracle::canonical(got.labels) != oracle::canonical(oracle::dbscan(x, cfg.params.eps, cfg.params.min_pts)))
        ++mismatches;
      check_sil(got.labels);
    }
    for (auto link : {ltc::Linkage::kAverage, ltc::Linkage::kComplete, ltc::Linkage::kWard}) {
      auto tree = ltc::agglomerative_tree(x, link);
      auto want = oracle::agglomerative(x, link == ltc::Linkage::kAverage    ? oracle::Link::kAverage
                                           : link == ltc::Linkage::kComplete ? oracle::Link::kComplete
                                                                             : oracle::Link::kWard);
      for (std::size_t k : {std::size_t{2}, std::size_t{3}, std::max<std::size_t>(2, rows / 20), std::max<std::size_t>(2, rows / 10)}) {
        auto cut = ltc::cut_tree(tree, k);
        ++partitions;
        if (oracle::canonical(cut.labels) != oracle::cut(want, rows, k)) ++mismatches;
        check_sil(cut.labels);
      }
    }
  }
  Verdict v;
  v.pass = mismatches == 0 && worst_sil <= 1e-9;
  v.detail = std::to_string(partitions - mismatches) + "/" + std::to_string(partitions) +
             " partitions identical on 20 fixtures (25..500 points); max silhouette deviation " + fmt("%.3g", worst_sil) +
             " over " + std::to_string(silhouettes) + " partitions";
  return v;
}

Verdict pca_checks() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double worst_rt = 0, worst_ev = 0;
  bool monotone = true;
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd mix(20, 20), x(100, 20);
    for (Eigen::Index i = 0; i < mix.size(); ++i) mix.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    x = x * mix;
    auto m = ltc::pca_fit(x, 20);
    auto back = ltc::pca_inverse_transform(m, ltc::pca_transform(m, x));
    worst_rt = std::max(worst_rt, (back - x).cwiseAbs().maxCoeff());
    auto ev = oracle::jacobi_eigenvalues(oracle::sample_covariance(x));
    for (std::size_t i = 0; i < 20; ++i) {
      worst_ev = std::max(worst_ev, std::abs(m.explained_variance(static_cast<Eigen::Index>(i)) - ev[i]));
      if (i && m.explained_variance(static_cast<Eigen::Index>(i)) > m.explained_variance(static_cast<Eigen::Index>(i - 1)))
        monotone = false;
    }
  }
  Verdict v;
  v.pass = worst_rt < 1e-8 && worst_ev <= 1e-6 && monotone;
  v.detail = "50 random 100x20 matrices: max round-trip error " + fmt("%.3g", worst_rt) +
             ", max variance deviation from Jacobi " + fmt("%.3g", worst_ev) + (monotone ? ", non-increasing" : ", NOT monotone");
  return v;
}

Verdict gradient_check() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.7);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  double worst_lr = 0, worst_fm = 0;
  auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
  };
  for (int point = 0; point < 50; ++point) {
    auto t = fixture::table(80, 4, 6, 1000 + static_cast<std::uint64_t>(point));
    std::vector<double> w(t.size());
    for (auto& x : w) x = u(rng);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(t.feature_dim() + 1));
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = g(rng);
    const double l2 = point % 2 ? 0.1 : 0.0;
    Eigen::VectorXd grad;
    ltc::logreg_loss_and_gradient(t, w, theta, l2, &grad);
    auto num = oracle::numeric_gradient(
        [&](const Eigen::VectorXd& th) { return ltc::logreg_loss_and_gradient(t, w, th, l2, nullptr); }, theta);
    worst_lr = std::max(worst_lr, rel(grad, num));

    ltc::FmModel m;
    m.w0 = g(rng);
    m.w = Eigen::VectorXd(static_cast<Eigen::Index>(t.feature_dim()));
    m.v = Eigen::MatrixXd(static_cast<Eigen::Index>(t.feature_dim()), 4);
    for (Eigen::Index i = 0; i < m.w.size(); ++i) m.w(i) = g(rng);
    for (Eigen::Index i = 0; i < m.v.size(); ++i) m.v.data()[i] = g(rng);
    ltc::fm_loss_and_gradient(t, w, m, l2, &grad);
    auto fnum = oracle::numeric_gradient(
        [&](const Eigen::VectorXd& th) {
          ltc::FmModel probe = m;
          probe.unflatten(th);
          return ltc::fm_loss_and_gradient(t, w, probe, l2, nullptr);
        },
        m.flatten());
    worst_fm = std::max(worst_fm, rel(grad, fnum));
  }
  Verdict v;
  v.pass = worst_lr <= 1e-5 && worst_fm <= 1e-5;
  v.detail = "50 points each: max relative error logreg " + fmt("%.3g", worst_lr) + ", fm " + fmt("%.3g", worst_fm);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

Verdict determinism() {
  fixture::TempDir dir("determinism");
  Verdict v;
#ifdef LTC_BINARY
  std::ofstream(dir / "run.ini") << "[run]\nseed = 7\n\n[synth]\nn_dialogues = 5000\nn_planted_variables = 40\n\n"
                                    "[phrasing]\nmin_support = 20\n\n[models]\nmodel = gbdt\n\n"
                                    "[evaluation]\nfolds = 5\n";
  std::vector<std::string> tables;
  for (const char* store : {"a", "b"}) {
    const std::string cmd = std::string(LTC_BINARY) + " report --auto --config " + (dir / "run.ini").string() +
                            " --store " + (dir / store).string() + " > " + (dir / (std::string(store) + ".log")).string() +
                            " 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      v.detail = "ltc run failed: " + slurp(dir / (std::string(store) + ".log"));
      return v;
    }
    tables.push_back(slurp(dir / store / "report" / "report.tsv") + "\n--\n" +
                     slurp(dir / store / "report" / "improvements.tsv"));
  }
  const auto rows = std::count(tables[0].begin(), tables[0].end(), '\n');
  v.pass = !tables[0].empty() && tables[0] == tables[1];
  v.detail = "two `ltc report --auto` runs into separate stores: report tables " +
             std::string(v.pass ? "byte-identical" : "DIFFER") + " (" + std::to_string(rows) + " lines)";
#else
  std::vector<std::string> tables;
  for (int run = 0; run < 2; ++run) {
    ltc::SynthConfig cfg;
    cfg.n_dialogues = 5000;
    cfg.n_planted_variables = 40;
    cfg.seed = 7;
    auto out = ltc::generate(cfg);
    auto ann = ltc::annotate_corpus(out.corpus, ltc::registry_from_truth(out.truth));
    auto table = ltc::build_features(out.corpus, "salary", out.embeddings, ann);
    ltc::SweepConfig sc;
    sc.folds = 5;
    auto rep = ltc::sweep(table, ltc::rank_variables(out.corpus, ann, "salary", sc.criterion), sc);
    ltc::write_report_table({rep}, dir / "t.tsv");
    tables.push_back(slurp(dir / "t.tsv"));
  }
  v.pass = tables[0] == tables[1];
  v.detail = std::string("in-process synth -> sweep -> report twice: ") + (v.pass ? "byte-identical" : "DIFFER");
#endif
  return v;
}

Verdict quantile_laws() {
  std::mt19937_64 rng(31337);
  std::size_t violations = 0;
  for (int t = 0; t < 200; ++t) {
    ltc::VariableRanking r;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 500)(rng);
    for (std::uint32_t v = 0; v < n; ++v) r.entries.push_back({static_cast<std::uint32_t>((v * 7919u) % 100003u), 0, 0, 0, false});
    std::vector<double> qs{0, 100};
    for (int i = 0; i < 8; ++i) qs.push_back(std::uniform_real_distribution<double>(0, 100)(rng));
    std::sort(qs.begin(), qs.end());
    std::vector<std::uint32_t> prev;
    for (double q : qs) {
      auto cur = ltc::select_quantile(r, q);
      if (cur.size() != static_cast<std::size_t>(std::floor(q * static_cast<double>(n) / 100.0 + 1e-9))) ++violations;
      if (cur.size() < prev.size() || !std::equal(prev.begin(), prev.end(), cur.begin())) ++violations;
      prev = cur;
    }
    if (prev.size() != n) ++violations;

    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(k, 5000)(rng);
    const double rate = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    std::vector<int> y(m);
    for (auto& v : y) v = std::bernoulli_distribution(rate)(rng);
    auto folds = ltc::kfold_split(y, k, rng());
    std::vector<int> seen(m, 0);
    std::vector<std::size_t> pos(k, 0), neg(k, 0);
    for (std::size_t f = 0; f < k; ++f)
      for (auto i : folds[f]) {
        ++seen[i];
        (y[i] ? pos : neg)[f]++;
      }
    for (int s : seen)
      if (s != 1) ++violations;
    auto spread = [](const std::vector<std::size_t>& c) {
      return *std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end());
    };
    if (spread(pos) > 1 || spread(neg) > 1) ++violations;
  }
  Verdict v;
  v.pass = violations == 0;
  v.detail = "200 random cases: quantile prefixes nested with floor counts, folds disjoint, covering and "
             "stratified; " + std::to_string(violations) + " violations";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"metric_oracles", metric_oracles},
      {"table_arithmetic", table_arithmetic},
      {"long_tail", long_tail},
      {"pipeline_recovery", recovery},
      {"clustering_equivalence", clustering_equivalence},
      {"pca_checks", pca_checks},
      {"gradient_check", gradient_check},
      {"determinism", determinism},
      {"quantile_laws", quantile_laws},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " [" << fmt("%.1f", secs) << "s]"
              << std::endl;
    for (const auto& n : v.notes) std::cout << "    " << n << std::endl;
    if (!v.pass) ++failed;
  }
  return failed ? 1 : 0;
}
