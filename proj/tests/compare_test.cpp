#include <map>
#include <set>

#include "doctest.h"
#include "simion/compare.hpp"

using namespace simion;

namespace {

ModulePtr load(const std::string& text, const std::string& path = "k.mlg") {
  auto m = std::make_shared<Module>(parse(text, path));
  check_module(*m);
  return m;
}

ChunkPtr method(const ModulePtr& m, const std::string& name) {
  for (auto& c : extract_method(m)) {
    if (c.origin.function == name) return std::make_shared<Chunk>(std::move(c));
  }
  FAIL("missing " << name);
  return nullptr;
}

std::vector<InputVector> int_inputs(std::vector<std::vector<std::int64_t>> rows) {
  std::vector<InputVector> out;
  for (auto& r : rows) {
    InputVector v{out.size(), {}};
    for (auto x : r) v.values.emplace_back(x);
    out.push_back(std::move(v));
  }
  return out;
}

ExecutionRecord record_of(std::vector<std::optional<std::int64_t>> outs) {
  ExecutionRecord rec;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    Outcome o;
    if (outs[i]) {
      o.outputs.emplace_back(*outs[i]);
    } else {
      o.error = RunError::timeout;
    }
    rec.runs.push_back({i, o});
  }
  return rec;
}

}  // namespace

TEST_CASE("valid_count") {
  CHECK(valid_count(record_of({1, 2, std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                               std::nullopt, std::nullopt, std::nullopt, std::nullopt})) == 2);
  CHECK(valid_count(record_of({1, 2, 3})) == 3);
  CHECK(valid_count(record_of({std::nullopt, std::nullopt})) == 0);
}

TEST_CASE("identity and constant filters") {
  auto m = load(
      "fn id(x: int) -> int { return x; }\n"
      "fn swap(a: int, b: int) -> void { var t = a; a = b; b = t; }\n"
      "fn inc(x: int) -> int { return x + 1; }\n"
      "fn c42(x: int) -> int { return 42; }\n"
      "fn parity(x: int) -> int { return x % 2; }\n");
  ExecPolicy p;
  auto one = int_inputs({{0}, {1}, {2}});
  auto two = int_inputs({{0, 1}, {1, 5}, {2, 2}, {7, 3}});

  auto check = [&](const std::string& name, const std::vector<InputVector>& in, bool identity,
                   bool constant) {
    auto c = method(m, name);
    auto rec = run_chunk(*c, in, p);
    CHECK_MESSAGE(is_identity(rec, *c, in) == identity, name);
    CHECK_MESSAGE(is_constant(rec) == constant, name);
  };
  check("id", one, true, false);
  check("swap", two, true, false);
  check("inc", int_inputs({{0}, {1}}), false, false);
  check("c42", one, false, true);
  check("parity", int_inputs({{0}, {2}, {4}}), false, true);
  check("id", int_inputs({{0}, {1}}), true, false);
}

TEST_CASE("fingerprints") {
  auto m = load(
      "fn a(x: int) -> int { return x * 2; }\n"
      "fn b(y: int) -> int { var t = y; t = t + y; return t; }\n"
      "fn c(x: int) -> int { return x * 3; }\n"
      "fn d(x: int, y: int) -> int { return x * 2; }\n");
  auto in = int_inputs({{0}, {1}, {5}, {-4}});
  ExecPolicy p;
  auto fa = fingerprint(run_chunk(*method(m, "a"), in, p), method(m, "a"), "__ret");
  auto fa2 = fingerprint(run_chunk(*method(m, "a"), in, p), method(m, "a"), "__ret");
  auto fb = fingerprint(run_chunk(*method(m, "b"), in, p), method(m, "b"), "__ret");
  auto fc = fingerprint(run_chunk(*method(m, "c"), in, p), method(m, "c"), "__ret");
  CHECK(fa.digest == fa2.digest);
  CHECK(fa.digest == fb.digest);
  CHECK(fa.digest != fc.digest);

  // Same outputs under a different signature never match.
  auto d = method(m, "d");
  auto in2 = int_inputs({{0, 9}, {1, 9}, {5, 9}, {-4, 9}});
  auto fd = fingerprint(run_chunk(*d, in2, p), d, "__ret");
  CHECK(fd.digest != fa.digest);

  // Errors take part in the digest.
  auto r1 = record_of({1, 2, 3, std::nullopt});
  auto r2 = record_of({1, 2, 3, 4});
  auto ca = method(m, "a");
  CHECK(fingerprint(r1, ca, "__ret").digest != fingerprint(r2, ca, "__ret").digest);
  CHECK(fingerprint(r1, ca, "__ret").digest == fingerprint(record_of({1, 2, 3, std::nullopt}), ca, "__ret").digest);
}

TEST_CASE("group_by_fingerprint") {
  auto m1 = load("fn f(x: int) -> int { return x; }\nfn g(x: int) -> int { return x; }\n"
                 "fn h(x: int) -> int { return x; }\n", "a.mlg");
  auto f = method(m1, "f");
  auto g = method(m1, "g");
  auto h = method(m1, "h");
  Digest d1 = md5("one");
  Digest d2 = md5("two");
  Digest d3 = md5("three");
  SUBCASE("three sharing") {
    auto groups = group_by_fingerprint({{d1, "__ret", f}, {d1, "__ret", g}, {d1, "__ret", h}});
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].members.size() == 3);
  }
  SUBCASE("all distinct") {
    CHECK(group_by_fingerprint({{d1, "__ret", f}, {d2, "__ret", g}, {d3, "__ret", h}}).empty());
  }
  SUBCASE("two outputs of one chunk") {
    CHECK(group_by_fingerprint({{d1, "a", f}, {d1, "b", f}}).empty());
    auto groups = group_by_fingerprint({{d1, "a", f}, {d2, "b", f}, {d1, "p", g}, {d2, "q", g}});
    CHECK(groups.size() == 2);
  }
  SUBCASE("variants of one origin") {
    auto variant = std::make_shared<Chunk>(*f);
    variant->variant.permutation = 1;
    CHECK(group_by_fingerprint({{d1, "__ret", f}, {d1, "__ret", variant}}).empty());
  }
}

TEST_CASE("digest grouping equals brute-force comparison") {
  // A corpus of small arithmetic functions with deliberate collisions.
  std::string src;
  const char* bodies[] = {"x * 2", "x + x", "x * 3", "x - 1", "x + -1", "x % 5", "x / 2",
                          "x * x", "abs(x)", "max(x, 0)", "min(x, 0) * -1 + x", "2 * x"};
  int i = 0;
  for (const char* b : bodies) src += "fn f" + std::to_string(i++) + "(x: int) -> int { return " + b + "; }\n";
  src += "fn p(x: int, y: int) -> int { return x + y; }\nfn q(a: int, b: int) -> int { return b + a; }\n";
  auto m = load(src);
  std::vector<ChunkPtr> chunks;
  for (auto& c : extract_method(m)) chunks.push_back(std::make_shared<Chunk>(std::move(c)));

  GenPolicy gp;
  std::vector<ExecutionRecord> records;
  std::vector<std::vector<InputVector>> series;
  std::vector<Fingerprint> fps;
  for (const auto& c : chunks) {
    series.push_back(gen_input_series(signature_of(*c), gp));
    records.push_back(run_chunk(*c, series.back(), ExecPolicy{}));
    fps.push_back(fingerprint(records.back(), c, "__ret"));
  }
  std::set<std::pair<std::string, std::string>> by_digest;
  for (const auto& g : group_by_fingerprint(fps)) {
    for (const auto& a : g.members) {
      for (const auto& b : g.members) {
        if (a.chunk->id < b.chunk->id) by_digest.insert({a.chunk->id, b.chunk->id});
      }
    }
  }
  std::set<std::pair<std::string, std::string>> brute;
  for (std::size_t a = 0; a < chunks.size(); ++a) {
    for (std::size_t b = 0; b < chunks.size(); ++b) {
      if (!(chunks[a]->id < chunks[b]->id)) continue;
      if (signature_of(*chunks[a]).key() != signature_of(*chunks[b]).key()) continue;
      const auto& ra = records[a].runs;
      const auto& rb = records[b].runs;
      bool same = ra.size() == rb.size();
      for (std::size_t k = 0; same && k < ra.size(); ++k) {
        same = ra[k].outcome.ok() == rb[k].outcome.ok() &&
               (!ra[k].outcome.ok() || values_equal(ra[k].outcome.outputs[0], rb[k].outcome.outputs[0]));
      }
      if (same) brute.insert({chunks[a]->id, chunks[b]->id});
    }
  }
  CHECK(by_digest == brute);
  CHECK(brute.size() >= 4);
}
