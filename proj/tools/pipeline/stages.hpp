#pragma once

#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "store.hpp"

namespace ltc::cli {

inline constexpr const char* kToolVersion = LTC_TOOL_VERSION;

struct StageOutcome {
  std::string stage;
  bool ran = false;
  double seconds = 0.0;
};

class Pipeline {
 public:
  // With auto_upstream, missing or stale inputs are produced by running the
  // upstream stages first; otherwise a missing input is an error.
  Pipeline(Config config, ArtifactStore& store, bool auto_upstream, std::ostream& log);

  void run(const std::string& stage);
  // Blocks serving the curation endpoints until the process is interrupted.
  void curate_serve();

  const std::vector<StageOutcome>& outcomes() const { return outcomes_; }
  const Config& config() const { return config_; }

  static const std::vector<std::string>& stage_names();

 private:
  struct Context;
  struct StageDef {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> sections;
    std::function<std::vector<std::pair<std::string, std::string>>(const Pipeline&)> external;
    std::function<void(Pipeline&, Context&)> body;
  };
  static const std::vector<StageDef>& stages();
  static const StageDef& stage(const std::string& name);

  std::string producer(const std::string& alias) const;
  void require(const std::string& alias);

  void synth(Context& ctx);
  void ingest(Context& ctx);
  void clean(Context& ctx);
  void phrases(Context& ctx);
  void embed(Context& ctx);
  void cluster(Context& ctx);
  void stats(Context& ctx);
  void registry(Context& ctx);
  void annotate(Context& ctx);
  void train(Context& ctx);
  void sweep(Context& ctx);
  void report(Context& ctx);

  std::filesystem::path votes_path() const;

  Config config_;
  ArtifactStore& store_;
  bool auto_upstream_;
  std::ostream& log_;
  std::set<std::string> visited_;
  std::vector<StageOutcome> outcomes_;
};

}  // namespace ltc::cli
