#include <algorithm>
#include <random>

#include "doctest.h"
#include "simion/post.hpp"

using namespace simion;

namespace {

ChunkPtr at(const std::string& file, int start, int end) {
  auto c = std::make_shared<Chunk>();
  c->origin = ChunkOrigin{file, "f", start, end};
  c->id = file + ":" + std::to_string(start) + "-" + std::to_string(end);
  return c;
}

SimionGroup group(const std::string& tag, std::vector<ChunkPtr> cs) {
  SimionGroup g{md5(tag), {}};
  for (auto& c : cs) g.members.push_back({c, "__ret"});
  return g;
}

std::vector<std::string> tags(const std::vector<SimionGroup>& gs) {
  std::vector<std::string> out;
  for (const auto& g : gs) out.push_back(g.digest.hex());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("subsume") {
  auto outer = group("outer", {at("a", 1, 20), at("b", 1, 20)});
  SUBCASE("inner pair inside a matching outer pair") {
    auto inner = group("inner", {at("a", 3, 8), at("b", 5, 9)});
    auto r = subsume({inner, outer});
    REQUIRE(r.size() == 1);
    CHECK(r[0].digest == outer.digest);
  }
  SUBCASE("inner group larger than the outer survives") {
    auto inner = group("inner", {at("a", 3, 8), at("b", 5, 9), at("c", 1, 4)});
    CHECK(subsume({inner, outer}).size() == 2);
  }
  SUBCASE("two inner instances may not share one outer instance") {
    auto inner = group("inner", {at("a", 3, 8), at("a", 10, 12)});
    CHECK(subsume({inner, outer}).size() == 2);
  }
  SUBCASE("disjoint groups are unchanged") {
    auto other = group("other", {at("c", 1, 5), at("d", 1, 5)});
    CHECK(subsume({other, outer}).size() == 2);
  }
  SUBCASE("identical spans keep the smaller digest") {
    auto twin = group("twin", {at("a", 1, 20), at("b", 1, 20)});
    auto r = subsume({twin, outer});
    REQUIRE(r.size() == 1);
    CHECK(r[0].digest == std::min(twin.digest, outer.digest));
  }
}

TEST_CASE("subsume is idempotent and order independent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SimionGroup> gs;
    int n = 1 + static_cast<int>(rng() % 6);
    for (int g = 0; g < n; ++g) {
      std::vector<ChunkPtr> cs;
      int k = 2 + static_cast<int>(rng() % 3);
      for (int i = 0; i < k; ++i) {
        std::string file(1, static_cast<char>('a' + rng() % 3));
        int s = 1 + static_cast<int>(rng() % 10);
        cs.push_back(at(file, s, s + static_cast<int>(rng() % 10)));
      }
      gs.push_back(group("g" + std::to_string(trial) + "_" + std::to_string(g), cs));
    }
    auto once = subsume(gs);
    CHECK(tags(subsume(once)) == tags(once));
    auto shuffled = gs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(tags(subsume(shuffled)) == tags(once));
    // Groups with instances disjoint from every other group survive.
    for (std::size_t g = 0; g < gs.size(); ++g) {
      bool isolated = true;
      for (std::size_t h = 0; h < gs.size(); ++h) {
        if (h == g) continue;
        for (const auto& a : gs[g].members) {
          for (const auto& b : gs[h].members) {
            const auto& x = a.chunk->origin;
            const auto& y = b.chunk->origin;
            if (x.file == y.file && x.start_line <= y.end_line && y.start_line <= x.end_line) {
              isolated = false;
            }
          }
        }
      }
      if (isolated) {
        CHECK(std::count_if(once.begin(), once.end(),
                            [&](const SimionGroup& s) { return s.digest == gs[g].digest; }) == 1);
      }
    }
  }
}

TEST_CASE("phase stats") {
  std::array<std::size_t, kPhaseCount> counts{240, 230, 500, 400, 390, 300, 290, 280, 120, 110, 105};
  auto r = assemble_result({}, {}, counts);
  REQUIRE(r.phase_stats.rows.size() == kPhaseCount);
  CHECK(r.phase_stats.rows.front().name == "ChunkExtraction");
  CHECK(r.phase_stats.rows.front().rel == 100.0);
  CHECK(r.phase_stats.rows[2].rel == doctest::Approx(208.33));
  CHECK(r.phase_stats.rows.back().name == "Type3Clone");
  CHECK(r.phase_stats.rows.back().rel == 43.75);

  std::array<std::size_t, kPhaseCount> flat;
  flat.fill(17);
  for (const auto& row : make_phase_stats(flat).rows) CHECK(row.rel == 100.0);

  std::array<std::size_t, kPhaseCount> empty{};
  for (const auto& row : make_phase_stats(empty).rows) CHECK(row.rel == 0.0);

  CHECK(percent_of(1, 3) == 33.33);
  CHECK(percent_of(2, 3) == 66.67);
}
