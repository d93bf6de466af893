#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "fixtures.hpp"
#include "httplib.h"
#include "json.hpp"
#include "ltc/curation_service.hpp"
#include "oracles.hpp"

namespace {

using nlohmann::json;

const std::vector<std::string> kRoster{"alice", "bob", "carol"};

std::vector<ltc::CurationCluster> fifty_clusters() {
  std::vector<ltc::CurationCluster> out;
  for (int c = 0; c < 50; ++c) {
    ltc::CurationCluster cc;
    cc.stats.cluster_id = c * 2 + 1;
    cc.stats.size = 2;
    cc.stats.avg_propensity_rate = 0.01 * c;
    cc.phrases = {"phrase " + std::to_string(c) + " a", "phrase " + std::to_string(c) + " b"};
    cc.stats.sample_phrases = cc.phrases;
    cc.significant_products = {"salary"};
    out.push_back(cc);
  }
  return out;
}

class Running {
 public:
  Running(std::vector<ltc::CurationCluster> clusters, ltc::CurationOptions opt)
      : service_(std::move(clusters), std::move(opt)) {
    port_ = service_.bind(0);
    thread_ = std::thread([this] { service_.serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100 && !client_->Get("/api/progress"); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }
  httplib::Client& client() { return *client_; }
  int port() const { return port_; }
  ltc::CurationService& service() { return service_; }

 private:
  ltc::CurationService service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

httplib::Result post_vote(httplib::Client& c, const std::string& e, int cluster, bool accept, const std::string& ts) {
  json body{{"expert_id", e}, {"cluster_id", cluster}, {"decision", accept ? "accept" : "reject"}, {"timestamp", ts}};
  return c.Post("/api/votes", body.dump(), "application/json");
}

TEST(Curation, ThreeExpertSessionFinalizesToMajority) {
  fixture::TempDir dir("cur");
  ltc::CurationOptions opt;
  opt.roster = kRoster;
  opt.votes_path = dir / "votes.tsv";
  opt.registry_path = dir / "registry.json";
  Running srv(fifty_clusters(), opt);

  auto list = srv.client().Get("/api/clusters?offset=0&limit=100");
  ASSERT_TRUE(list);
  ASSERT_EQ(list->status, 200);
  auto lj = json::parse(list->body);
  EXPECT_EQ(lj["total"], 50);
  std::vector<int> ids;
  for (const auto& c : lj["clusters"]) ids.push_back(c["cluster_id"]);
  ASSERT_EQ(ids.size(), 50u);

  std::mt19937_64 rng(42);
  std::bernoulli_distribution coin(0.5);
  std::map<std::string, std::map<int, bool>> latest;
  for (const auto& e : kRoster)
    for (int c : ids) {
      const bool a = coin(rng);
      auto r = post_vote(srv.client(), e, c, a, "2024-05-01T10:00:00.000Z");
      ASSERT_TRUE(r);
      ASSERT_EQ(r->status, 200) << r->body;
      latest[e][c] = a;
    }
  // Changed votes: the later timestamp wins, an older one is ignored.
  for (int c : {ids[0], ids[7], ids[19]}) {
    const bool flipped = !latest["bob"][c];
    ASSERT_EQ(post_vote(srv.client(), "bob", c, flipped, "2024-05-01T11:00:00.000Z")->status, 200);
    latest["bob"][c] = flipped;
    ASSERT_EQ(post_vote(srv.client(), "bob", c, !flipped, "2024-05-01T09:00:00.000Z")->status, 200);
  }

  auto prog = json::parse(srv.client().Get("/api/progress")->body);
  EXPECT_EQ(prog["votes"], 150);
  EXPECT_EQ(prog["expected"], 150);
  EXPECT_TRUE(prog["uncovered_clusters"].empty());

  auto fin = srv.client().Post("/api/finalize", "", "application/json");
  ASSERT_EQ(fin->status, 200);
  auto fj = json::parse(fin->body);
  EXPECT_EQ(fj["selected"].get<std::vector<int>>(), oracle::majority(latest, kRoster, ids));
  EXPECT_FALSE(fj.contains("warning"));
  auto reg = ltc::read_registry(opt.registry_path);
  EXPECT_EQ(reg.hash(), fj["registry_hash"].get<std::string>());

  // Votes were journalled: a fresh service over the same file agrees.
  ltc::CurationService again(fifty_clusters(), opt);
  EXPECT_EQ(json::parse(again.finalize().body)["selected"], fj["selected"]);
}

TEST(Curation, RejectsUnknownExpertAndBadPayloads) {
  ltc::CurationOptions opt;
  opt.roster = kRoster;
  Running srv(fifty_clusters(), opt);
  auto r = post_vote(srv.client(), "mallory", 1, true, "2024-01-01T00:00:00Z");
  ASSERT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "unknown_expert");
  r = post_vote(srv.client(), "alice", 2, true, "2024-01-01T00:00:00Z");
  EXPECT_EQ(json::parse(r->body)["error"], "unknown_cluster");
  r = srv.client().Post("/api/votes", "{\"expert_id\": 3}", "application/json");
  EXPECT_EQ(r->status, 400);
  r = srv.client().Post("/api/votes", R"({"expert_id":"alice","cluster_id":1,"decision":"maybe"})", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(srv.client().Get("/api/clusters?offset=x")->status, 400);
}

TEST(Curation, PaginationAndPerExpertView) {
  ltc::CurationOptions opt;
  opt.roster = kRoster;
  opt.hide_stats = true;
  Running srv(fifty_clusters(), opt);
  post_vote(srv.client(), "alice", 3, true, "2024-01-01T00:00:00Z");
  auto page = json::parse(srv.client().Get("/api/clusters?offset=1&limit=2&expert=alice")->body);
  ASSERT_EQ(page["clusters"].size(), 2u);
  EXPECT_EQ(page["clusters"][0]["cluster_id"], 3);
  EXPECT_EQ(page["clusters"][0]["my_vote"], "accept");
  EXPECT_TRUE(page["clusters"][1]["my_vote"].is_null());
  EXPECT_FALSE(page["clusters"][0].contains("stats"));
  EXPECT_EQ(json::parse(srv.client().Get("/api/clusters?offset=60")->body)["clusters"].size(), 0u);
}

TEST(Curation, MissingVotesWarnOnFinalize) {
  ltc::CurationOptions opt;
  opt.roster = kRoster;
  ltc::CurationService s(fifty_clusters(), opt);
  s.submit_vote(R"({"expert_id":"alice","cluster_id":1,"decision":"accept"})");
  auto fj = json::parse(s.finalize().body);
  EXPECT_TRUE(fj["selected"].empty());
  EXPECT_EQ(fj["warning"]["uncovered_clusters"].size(), 50u);
}

TEST(Curation, BusyPortIsReported) {
  ltc::CurationOptions opt;
  opt.roster = kRoster;
  Running srv(fifty_clusters(), opt);
  ltc::CurationService other(fifty_clusters(), opt);
  try {
    other.bind(srv.port());
    FAIL() << "bound a busy port";
  } catch (const ltc::Error& e) {
    EXPECT_EQ(e.code(), "port_busy");
  }
}

}  // namespace
