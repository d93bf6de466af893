#include <iostream>

#include "CLI11.hpp"
#include "ltc/common.hpp"
#include "pipeline/config.hpp"
#include "pipeline/stages.hpp"
#include "pipeline/store.hpp"

namespace {

int fail(const std::string& code, const std::string& message) {
  std::cerr << "error[" << code << "]: " << message << std::endl;
  return code == "usage" || code == "config" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-tail context mining and evaluation pipeline"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", ltc::cli::kToolVersion);

  std::string config_path, store_dir, product, criterion, model, q_list;
  std::optional<long long> seed;
  std::optional<std::size_t> folds;
  std::optional<int> port;
  bool auto_upstream = false;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--store", store_dir, "artifact store directory")->envname("LTC_STORE");
  app.add_option("--seed", seed, "run seed");
  app.add_flag("--auto", auto_upstream, "run missing or stale upstream stages first");
  app.add_option("--product", product, "product id to train or evaluate");
  app.add_option("--criterion", criterion, "ranking criterion")->check(CLI::IsMember({"frequency", "rate"}));
  app.add_option("--model", model, "model kind")->check(CLI::IsMember({"logreg", "rf", "gbdt", "fm", "auto"}));
  app.add_option("--q-list", q_list, "comma-separated quantiles in percent");
  app.add_option("--folds", folds, "cross-validation folds");
  app.add_option("--port", port, "curation service port");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "load and validate a dialogue corpus"},
      {"clean", "drop short or contradictory dialogues and merge repeat calls"},
      {"phrases", "mine n-gram candidates and keep the significant ones"},
      {"embed", "embed candidate phrases"},
      {"cluster", "reduce with PCA and cluster phrase vectors"},
      {"stats", "compute and prune cluster statistics"},
      {"curate-serve", "serve the expert curation endpoints"},
      {"registry", "build the contextual variable registry from votes"},
      {"annotate", "compute context vectors for every dialogue"},
      {"train", "fit a propensity model on all context variables"},
      {"sweep", "run the quantile sweep with cross-validation"},
      {"report", "write metric tables and figures"},
      {"synth", "generate a synthetic corpus with ground truth"},
      {"config", "print the effective configuration"},
      {"verify", "check every manifest artifact against its hash"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto config = config_path.empty() ? ltc::cli::Config::defaults() : ltc::cli::Config::load(config_path);
    if (seed) config.set("run.seed", std::to_string(*seed));
    if (!product.empty()) {
      config.set("evaluation.products", product);
      config.set("models.product", product);
    }
    if (!criterion.empty()) config.set("evaluation.criteria", criterion);
    if (!model.empty()) config.set("models.model", model);
    if (!q_list.empty()) config.set("evaluation.q_list", q_list);
    if (folds) config.set("evaluation.folds", std::to_string(*folds));
    if (port) config.set("curation.port", std::to_string(*port));
    if (store_dir.empty()) store_dir = config.str("run.store");

    if (command == "config") {
      std::cout << config.to_ini();
      return 0;
    }
    ltc::cli::ArtifactStore store(store_dir);
    if (command == "verify") {
      const auto bad = store.verify();
      for (const auto& alias : bad) std::cout << "corrupt " << alias << "\n";
      if (!bad.empty()) return fail("corrupt_artifact", std::to_string(bad.size()) + " artifacts fail verification");
      std::cout << "ok " << store.records().size() << " stages verified\n";
      return 0;
    }
    ltc::cli::Pipeline pipeline(std::move(config), store, auto_upstream, std::cout);
    if (command == "curate-serve")
      pipeline.curate_serve();
    else
      pipeline.run(command);
    return 0;
  } catch (const ltc::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
