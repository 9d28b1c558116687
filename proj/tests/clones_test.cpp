#include <random>

#include "doctest.h"
#include "simion/clones.hpp"

using namespace simion;

namespace {

std::vector<ChunkPtr> method_chunks(const std::string& text, const std::string& path = "c.mlg") {
  auto m = std::make_shared<Module>(parse(text, path));
  check_module(*m);
  std::vector<ChunkPtr> out;
  for (auto& c : extract_method(m)) out.push_back(std::make_shared<Chunk>(std::move(c)));
  return out;
}

ChunkPtr body_chunk(const std::string& body) {
  return method_chunks("fn f(a: int, b: int) -> void {\n" + body + "}\n")[0];
}

}  // namespace

TEST_CASE("type15_key") {
  auto cs = method_chunks(
      "fn f(x: int) -> int { var y = x * 2; return y + 1; }\n"
      "fn g(q: int) -> int {\n  # comment\n  var r = q * 2;\n\n  return r + 1;\n}\n"
      "fn h(x: int) -> int { var y = x * 2; return y + 2; }\n");
  CHECK(type15_key(*cs[0]) == type15_key(*cs[1]));
  CHECK(type15_key(*cs[0]) != type15_key(*cs[2]));
}

TEST_CASE("filter_type15") {
  SUBCASE("three renamed copies") {
    auto cs = method_chunks(
        "fn f(x: int) -> int { return x * 3 + 1; }\n"
        "fn g(y: int) -> int { return y * 3 + 1; }\n"
        "fn h(z: int) -> int { return z * 3 + 1; }\n");
    auto r = filter_type15(cs);
    REQUIRE(r.survivors.size() == 1);
    CHECK(r.survivors[0]->origin.function == "f");
    REQUIRE(r.classes.size() == 1);
    CHECK(r.classes[0].members.size() == 3);
    CHECK(r.classes[0].representative == cs[0]->id);
  }
  SUBCASE("all distinct") {
    auto cs = method_chunks(
        "fn f(x: int) -> int { return x * 3; }\n"
        "fn g(y: int) -> int { return y * 4; }\n");
    auto r = filter_type15(cs);
    CHECK(r.survivors.size() == 2);
    CHECK(r.classes.empty());
  }
  SUBCASE("two buckets of two plus a singleton") {
    auto cs = method_chunks(
        "fn f1(x: int) -> int { return x * 3; }\n"
        "fn g1(x: int) -> int { return x - 1; }\n"
        "fn f2(y: int) -> int { return y * 3; }\n"
        "fn g2(y: int) -> int { return y - 1; }\n"
        "fn s(y: int) -> int { return y / 5; }\n");
    auto r = filter_type15(cs);
    CHECK(r.survivors.size() == 3);
    CHECK(r.classes.size() == 2);
  }
}

TEST_CASE("stmt_edit_distance") {
  auto base = body_chunk("  a = a + 1;\n  b = b * 2;\n  a = a - b;\n");
  auto one_off = body_chunk("  a = a + 1;\n  b = b * 3;\n  a = a - b;\n");
  CHECK(stmt_edit_distance(*base, *base) == 0);
  CHECK(stmt_edit_distance(*base, *one_off) == 1);
  CHECK(edit_distance({}, {"s1", "s2"}) == 2);

  auto renamed = body_chunk("  b = b + 1;\n  a = a * 2;\n  b = b - a;\n");
  CHECK(stmt_edit_distance(*base, *renamed) == 0);
}

TEST_CASE("edit_distance is a metric") {
  std::mt19937_64 rng(7);
  auto random_seq = [&] {
    std::vector<std::string> s(rng() % 7);
    for (auto& x : s) x = std::string(1, static_cast<char>('a' + rng() % 3));
    return s;
  };
  for (int i = 0; i < 300; ++i) {
    auto a = random_seq();
    auto b = random_seq();
    auto c = random_seq();
    auto ab = edit_distance(a, b);
    CHECK(ab == edit_distance(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(edit_distance(a, c) <= ab + edit_distance(b, c));
  }
}

TEST_CASE("type-1.5 clones have distance zero") {
  auto cs = method_chunks(
      "fn f(x: int) -> int { var t = x; t = t * t; return t; }\n"
      "fn g(y: int) -> int { var u = y; u = u * u; return u; }\n");
  REQUIRE(type15_key(*cs[0]) == type15_key(*cs[1]));
  CHECK(stmt_edit_distance(*cs[0], *cs[1]) == 0);
}

TEST_CASE("filter_type3") {
  const std::string core = "  a = a + 1;\n  b = b * 2;\n";
  auto padded = [&](int extra) {
    std::string body = core;
    for (int i = 0; i < extra; ++i) body += "  a = a + " + std::to_string(100 + i) + ";\n";
    return body;
  };
  auto group_of = [](std::vector<ChunkPtr> cs) {
    SimionGroup g;
    for (auto& c : cs) g.members.push_back({c, "a"});
    return g;
  };
  auto a = method_chunks("fn f(a: int, b: int) -> void {\n" + padded(0) + "}\n", "a.mlg")[0];
  auto near = method_chunks("fn f(a: int, b: int) -> void {\n" + padded(4) + "}\n", "b.mlg")[0];
  auto far = method_chunks("fn f(a: int, b: int) -> void {\n" + padded(6) + "}\n", "c.mlg")[0];
  REQUIRE(stmt_edit_distance(*a, *near) == 4);
  REQUIRE(stmt_edit_distance(*a, *far) == 6);

  SUBCASE("distance 4 pair is removed") {
    auto r = filter_type3({group_of({a, near})});
    CHECK(r.groups.empty());
    REQUIRE(r.classes.size() == 1);
    CHECK(r.classes[0].kind == CloneKind::type3);
    CHECK(r.classes[0].representative == a->id);
  }
  SUBCASE("distance 6 pair survives") {
    auto r = filter_type3({group_of({a, far})});
    CHECK(r.groups.size() == 1);
    CHECK(r.classes.empty());
  }
  SUBCASE("component collapse") {
    auto other = method_chunks(
        "fn f(a: int, b: int) -> void {\n  while (a > b) { a = a - 3; }\n  b = len(itos(a));\n"
        "  a = a % 7;\n  b = b + a;\n  a = a * a;\n  b = -b;\n  a = a + b;\n}\n",
        "z.mlg")[0];
    auto r = filter_type3({group_of({a, near, other})});
    REQUIRE(r.groups.size() == 1);
    REQUIRE(r.groups[0].members.size() == 2);
    CHECK(r.groups[0].members[0].chunk == a);
    CHECK(r.groups[0].members[1].chunk == other);
  }
}
