// Copyright 2026, The flipprint authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>
#include <set>

#include "flipprint/matching/birthday.hpp"
#include "flipprint/matching/store.hpp"
#include "oracles/oracles.hpp"

namespace fmx = flipprint::matching;
namespace fh = flipprint::hammering;
using flipprint::BitFlipDistribution;
using flipprint::ProbabilityDistribution;

namespace {

// Chunk `id` of a simulated device: a distinctive support so that different
// chunk ids never match each other.
fh::ChunkDistribution chunk(std::uint64_t id) {
  return {id, BitFlipDistribution({{100 * id, 3}, {100 * id + 1, 1}})};
}

fh::Fingerprint fingerprint(std::initializer_list<std::uint64_t> ids, std::string session = "s") {
  fh::Fingerprint fp;
  fp.session_id = std::move(session);
  for (auto id : ids) fp.chunks.push_back(chunk(id));
  return fp;
}

std::set<std::uint64_t> chunk_ids(const fmx::Reference& r) {
  std::set<std::uint64_t> s;
  for (const auto& c : r.chunks) s.insert(c.chunk_id);
  return s;
}

std::uint64_t ingest(fmx::ReferenceStore& store, const fh::Fingerprint& fp, double tau = 0.8) {
  auto d = fmx::match_fingerprints(fp, store, tau);
  return fmx::update_references(store, fp, d);
}

std::set<std::set<std::uint64_t>> partition(const fmx::ReferenceStore& store) {
  std::set<std::set<std::uint64_t>> p;
  for (const auto& [id, r] : store.references()) p.insert(chunk_ids(r));
  return p;
}

BitFlipDistribution random_distribution(std::mt19937_64& rng) {
  std::vector<BitFlipDistribution::Entry> e;
  const int n = 1 + static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) e.emplace_back(rng() % 24, 1 + rng() % 9);
  return BitFlipDistribution(std::move(e));
}

std::map<std::uint64_t, double> dense(const BitFlipDistribution& d) {
  std::map<std::uint64_t, double> m;
  for (const auto& [i, c] : d.entries()) m[i] = static_cast<double>(c);
  return m;
}

}  // namespace

TEST(Jsd, HandExamples) {
  const ProbabilityDistribution p({{0, 1.0}});
  const ProbabilityDistribution q({{0, 0.5}, {1, 0.5}});
  EXPECT_NEAR(fmx::js_divergence(p, q), 0.311278124, 1e-9);
  EXPECT_NEAR(fmx::js_divergence(p, q), oracle::jsd({{0, 1.0}}, {{0, 0.5}, {1, 0.5}}), 1e-12);
  EXPECT_DOUBLE_EQ(fmx::js_divergence(p, p), 0.0);
  EXPECT_DOUBLE_EQ(fmx::js_divergence(p, ProbabilityDistribution({{7, 1.0}})), 1.0);
}

TEST(Jsd, EmptyInputIsUndefined) {
  EXPECT_THROW(fmx::js_divergence(BitFlipDistribution(), BitFlipDistribution({{1, 1}})),
               flipprint::UndefinedInputError);
  EXPECT_THROW(fmx::js_divergence(BitFlipDistribution({{1, 1}}), BitFlipDistribution()),
               flipprint::UndefinedInputError);
}

TEST(Jsd, AxiomsAndOracleOnRandomDistributions) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const auto p = random_distribution(rng);
    const auto q = random_distribution(rng);
    const double pq = fmx::js_divergence(p, q);
    EXPECT_EQ(pq, fmx::js_divergence(q, p));
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
    EXPECT_NEAR(pq, oracle::jsd(dense(p), dense(q)), 1e-12);
    EXPECT_NEAR(fmx::js_divergence(p, p), 0.0, 1e-12);
  }
}

TEST(Jsd, CountsAndProbabilitiesAgree) {
  const BitFlipDistribution counts({{1, 2}, {5, 6}});
  const ProbabilityDistribution probs({{1, 0.25}, {5, 0.75}});
  EXPECT_NEAR(fmx::js_divergence(counts, probs), 0.0, 1e-15);
}

TEST(Match, EmptyStoreMeansNewDevice) {
  fmx::ReferenceStore store;
  const auto d = fmx::match_fingerprints(fingerprint({1}), store);
  EXPECT_EQ(d.verdict, fmx::Verdict::kNewDevice);
  EXPECT_FALSE(d.min_divergence.has_value());
}

TEST(Match, ExactDistributionsMatchAtZero) {
  fmx::ReferenceStore store;
  ingest(store, fingerprint({1, 2}));
  const auto d = fmx::match_fingerprints(fingerprint({2}), store);
  EXPECT_EQ(d.verdict, fmx::Verdict::kMatched);
  EXPECT_EQ(d.reference_id, 0U);
  EXPECT_DOUBLE_EQ(*d.min_divergence, 0.0);
  EXPECT_EQ(d.probe_chunk, 2U);
  EXPECT_EQ(d.reference_chunk, 2U);
}

TEST(Match, NoSignalIsUndefined) {
  fh::Fingerprint fp;
  fp.chunks.push_back({3, BitFlipDistribution()});
  fmx::ReferenceStore store;
  EXPECT_THROW(fmx::match_fingerprints(fp, store), flipprint::UndefinedInputError);
}

TEST(Match, TiesGoToLowestId) {
  fmx::ReferenceStore store;
  ingest(store, fingerprint({1}));
  ingest(store, fingerprint({2}));
  // Reference 2 holds the same chunk as reference 0.
  const auto id = store.create(std::nullopt);
  store.mutable_ref(id).absorb(chunk(1));
  const auto d = fmx::match_fingerprints(fingerprint({1}), store);
  EXPECT_EQ(d.reference_id, 0U);
  EXPECT_EQ(d.within_threshold, (std::vector<std::uint64_t>{0, 2}));
}

TEST(Update, NewDeviceGrowsTheStore) {
  fmx::ReferenceStore store;
  EXPECT_EQ(ingest(store, fingerprint({1})), 0U);
  EXPECT_EQ(ingest(store, fingerprint({5})), 1U);
  EXPECT_EQ(store.size(), 2U);
}

TEST(Update, MatchExtendsTheReference) {
  fmx::ReferenceStore store;
  ingest(store, fingerprint({1, 2}));
  ingest(store, fingerprint({2, 3}));
  ASSERT_EQ(store.size(), 1U);
  EXPECT_EQ(chunk_ids(store.at(0)), (std::set<std::uint64_t>{1, 2, 3}));
  // Counts on the shared chunk are summed.
  EXPECT_EQ(store.at(0).chunks[1].distribution.total(), 8U);
}

TEST(Update, BridgingFingerprintCollapsesReferences) {
  fmx::ReferenceStore store;
  ingest(store, fingerprint({1, 2}));
  ingest(store, fingerprint({3, 4}));
  ASSERT_EQ(store.size(), 2U);
  ingest(store, fingerprint({2, 3}, "bridge"));
  ASSERT_EQ(store.size(), 1U);
  EXPECT_EQ(chunk_ids(store.at(0)), (std::set<std::uint64_t>{1, 2, 3, 4}));
  ASSERT_EQ(store.merge_log().size(), 1U);
  EXPECT_EQ(store.merge_log()[0].into, 0U);
  EXPECT_EQ(store.merge_log()[0].absorbed, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(store.merge_log()[0].session_id, "bridge");
}

TEST(Update, CollapseIsOrderIndependentInEffect) {
  const std::vector<fh::Fingerprint> sessions{fingerprint({1, 2}), fingerprint({3, 4}), fingerprint({2, 3}),
                                              fingerprint({7, 8})};
  std::vector<std::size_t> order{0, 1, 2, 3};
  std::set<std::set<std::set<std::uint64_t>>> outcomes;
  do {
    fmx::ReferenceStore store;
    for (auto i : order) ingest(store, sessions[i]);
    outcomes.insert(partition(store));
  } while (std::next_permutation(order.begin(), order.end()));
  ASSERT_EQ(outcomes.size(), 1U);
  EXPECT_EQ(*outcomes.begin(), (std::set<std::set<std::uint64_t>>{{1, 2, 3, 4}, {7, 8}}));
}

TEST(Birthday, OverlapProbabilityEdgeCases) {
  EXPECT_NEAR(fmx::overlap_probability(512, 1), 1.0 / 512.0, 1e-15);
  EXPECT_EQ(fmx::overlap_probability(512, 257), 1.0);
  EXPECT_EQ(fmx::overlap_probability(10, 6), 1.0);
  EXPECT_THROW(fmx::overlap_probability(10, 11), flipprint::UsageError);
  EXPECT_THROW(fmx::overlap_probability(10, 0), flipprint::UsageError);
}

TEST(Birthday, OverlapProbabilityMatchesExactRational) {
  for (std::uint64_t n : {16ULL, 100ULL, 512ULL, 2000ULL})
    for (std::uint64_t d = 1; 2 * d <= n; d += 1 + d / 4)
      EXPECT_NEAR(fmx::overlap_probability(n, d), oracle::overlap_probability(n, d), 1e-12) << n << "," << d;
}

TEST(Birthday, OverlapProbabilityIncreasesInD) {
  double prev = 0.0;
  for (std::uint64_t d = 1; d <= 256; ++d) {
    const double p = fmx::overlap_probability(512, d);
    // Strict while the distance to 1 is still resolvable in a double.
    if (1.0 - prev > 1e-12) {
      EXPECT_GT(p, prev);
    } else {
      EXPECT_GE(p, prev);
    }
    prev = p;
  }
}

TEST(Birthday, OverlapProbabilityAgreesWithShuffling) {
  for (std::uint64_t d : {4ULL, 16ULL, 32ULL}) {
    const std::uint64_t trials = 20000;
    const double p = fmx::overlap_probability(512, d);
    const double mc = oracle::overlap_monte_carlo(512, d, trials, d);
    EXPECT_NEAR(mc, p, 3.0 * std::sqrt(p * (1 - p) / trials) + 1e-9) << d;
  }
}

TEST(Birthday, RequiredSampleSizeExamples) {
  EXPECT_THROW(fmx::required_sample_size(512, 0, 0.999), flipprint::UndefinedInputError);
  EXPECT_EQ(fmx::required_sample_size(512, 511, 0.999), 2U);
  const auto d = fmx::required_sample_size(512, 256, 0.999);
  EXPECT_TRUE(d == 9 || d == 10) << d;
  EXPECT_EQ(d, oracle::required_sample_size(512, 256, 999, 1000));
  EXPECT_THROW(fmx::required_sample_size(512, 512, 0.5), flipprint::UsageError);
  EXPECT_THROW(fmx::required_sample_size(512, 3, 1.0), flipprint::UsageError);
}

TEST(Birthday, RequiredSampleSizeMatchesExactOracleAndIsMonotone) {
  std::uint64_t prev = ~0ULL;
  for (std::uint64_t s = 1; s < 512; ++s) {
    const auto d = fmx::required_sample_size(512, s, 0.999);
    EXPECT_EQ(d, oracle::required_sample_size(512, s, 999, 1000)) << s;
    EXPECT_LE(d, prev);
    prev = d;
  }
  for (std::uint64_t s = 1; s < 200; s += 7)
    EXPECT_EQ(fmx::required_sample_size(200, s, 0.5), oracle::required_sample_size(200, s, 1, 2)) << s;
}
