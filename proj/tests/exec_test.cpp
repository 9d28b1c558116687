#include <algorithm>
#include <random>

#include "doctest.h"
#include "simion/exec.hpp"

using namespace simion;

namespace {

ModulePtr load(const std::string& text) {
  auto m = std::make_shared<Module>(parse(text, "e.mlg"));
  check_module(*m);
  return m;
}

Chunk method_chunk(const ModulePtr& m, const std::string& name) {
  for (auto& c : extract_method(m)) {
    if (c.origin.function == name) return c;
  }
  FAIL("no function " << name);
  return {};
}

std::vector<InputVector> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<InputVector> out;
  for (auto x : xs) out.push_back({out.size(), {Value(x)}});
  return out;
}

Value eval_fn(const std::string& src, std::vector<Value> args = {}) {
  auto m = load(src);
  Outcome o = call_function(*m, m->functions[0].name, args, ExecPolicy{});
  REQUIRE_MESSAGE(o.ok(), o.message);
  REQUIRE(o.outputs.size() == 1);
  return o.outputs[0];
}

}  // namespace

TEST_CASE("run_chunk basics") {
  auto m = load(
      "fn inc(x: int) -> int { return x + 1; }\n"
      "fn spin(x: int) -> int { while (true) { x = x + 1; } return x; }\n"
      "extern io fn write_file(path: string, data: string) -> void;\n"
      "fn save(x: int) -> int { write_file(\"out\", itos(x)); return x; }\n");
  ExecPolicy p;
  auto rec = run_chunk(method_chunk(m, "inc"), ints({0, 1, 2}), p);
  REQUIRE(rec.runs.size() == 3);
  for (std::int64_t i = 0; i < 3; ++i) {
    REQUIRE(rec.runs[static_cast<std::size_t>(i)].outcome.ok());
    CHECK(rec.runs[static_cast<std::size_t>(i)].outcome.outputs[0].as_int() == i + 1);
  }
  for (const auto& r : run_chunk(method_chunk(m, "spin"), ints({0, 5}), p).runs) {
    CHECK(r.outcome.error == RunError::timeout);
  }
  for (const auto& r : run_chunk(method_chunk(m, "save"), ints({0, 5}), p).runs) {
    CHECK(r.outcome.error == RunError::effect_denied);
  }
}

TEST_CASE("early return converges at the exit") {
  auto m = load(
      "fn f(x: int) -> int {\n"
      "  if (x > 10) { return 1; }\n"
      "  x = x * 2;\n"
      "  return x;\n"
      "}\n");
  auto rec = run_chunk(method_chunk(m, "f"), ints({20, 3}), ExecPolicy{});
  CHECK(rec.runs[0].outcome.outputs[0].as_int() == 1);
  CHECK(rec.runs[1].outcome.outputs[0].as_int() == 6);
}

TEST_CASE("arithmetic semantics") {
  const std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  const std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  CHECK(eval_fn("fn f(a: int) -> int { return a + 1; }", {Value(kMax)}).as_int() == kMin);
  CHECK(eval_fn("fn f(a: int) -> int { return a * 2; }", {Value(kMax)}).as_int() == -2);
  CHECK(eval_fn("fn f(a: int) -> int { return -a; }", {Value(kMin)}).as_int() == kMin);
  CHECK(eval_fn("fn f(a: int) -> int { return a / -1; }", {Value(kMin)}).as_int() == kMin);
  CHECK(eval_fn("fn f(a: int) -> int { return a % -1; }", {Value(kMin)}).as_int() == 0);
  CHECK(eval_fn("fn f() -> int { return -7 / 2; }").as_int() == -3);
  CHECK(eval_fn("fn f() -> int { return -7 % 2; }").as_int() == -1);
  CHECK(eval_fn("fn f() -> float { return 1.5 * 2.0; }").as_float() == 3.0);
  CHECK(eval_fn("fn f() -> bool { return \"ab\" < \"b\"; }").as_bool());
  CHECK(eval_fn("fn f() -> bool { return [1, 2] == [1, 2]; }").as_bool());

  auto m = load("fn f(a: int, b: int) -> int { return a / b; }\n"
                "fn g(a: float) -> float { return a / 0.0; }\n");
  CHECK(call_function(*m, "f", {Value(std::int64_t{1}), Value(std::int64_t{0})}, {}).error ==
        RunError::runtime);
  CHECK(call_function(*m, "g", {Value(1.0)}, {}).error == RunError::runtime);
}

TEST_CASE("builtins") {
  CHECK(eval_fn("fn f() -> int { return len(\"hello\"); }").as_int() == 5);
  CHECK(eval_fn("fn f() -> string { return substr(\"hello\", 1, 3); }").as_string() == "ell");
  CHECK(eval_fn("fn f() -> int { return char_at(\"A\", 0); }").as_int() == 65);
  CHECK(eval_fn("fn f() -> string { return chr(98); }").as_string() == "b");
  CHECK(eval_fn("fn f() -> string { return to_lower(\"AbC\"); }").as_string() == "abc");
  CHECK(eval_fn("fn f() -> string { return to_upper(\"AbC\"); }").as_string() == "ABC");
  CHECK(eval_fn("fn f() -> string { return trim(\"  x y \"); }").as_string() == "x y");
  CHECK(eval_fn("fn f() -> string { return itos(-12); }").as_string() == "-12");
  CHECK(eval_fn("fn f() -> int { return stoi(\"-12\"); }").as_int() == -12);
  CHECK(eval_fn("fn f() -> string { return ftos(2.0); }").as_string() == "2.0");
  CHECK(eval_fn("fn f() -> int { return to_int(-2.7); }").as_int() == -2);
  CHECK(eval_fn("fn f() -> float { return to_float(3); }").as_float() == 3.0);
  CHECK(eval_fn("fn f() -> int { return abs(-4); }").as_int() == 4);
  CHECK(eval_fn("fn f() -> int { return min(4, 9) + max(4, 9); }").as_int() == 13);
  CHECK(eval_fn("fn f() -> float { return sqrt(16.0); }").as_float() == 4.0);
  CHECK(eval_fn("fn f() -> int { var a = append([1], 2); return a[1]; }").as_int() == 2);
  CHECK(eval_fn("fn f() -> int { var a = new_array(4, 7); return len(a) + a[3]; }").as_int() == 11);
  CHECK(eval_fn("fn f() -> bool { return contains(\"hello\", \"ll\"); }").as_bool());
  CHECK(eval_fn("fn f() -> int { return index_of(\"hello\", \"l\"); }").as_int() == 2);
  CHECK(eval_fn("fn f() -> int { return index_of(\"hello\", \"z\"); }").as_int() == -1);
  CHECK(eval_fn("fn f() -> bool { return starts_with(\"hello\", \"he\"); }").as_bool());
  CHECK(eval_fn("fn f() -> bool { return ends_with(\"hello\", \"lo\"); }").as_bool());

  auto m = load(
      "fn a() -> int { return stoi(\"x1\"); }\n"
      "fn b() -> string { return substr(\"ab\", 1, 5); }\n"
      "fn c() -> int { var xs = [1]; return xs[3]; }\n"
      "fn d() -> int { return d() + 1; }\n"
      "fn e() -> [int] { return new_array(-1, 0); }\n");
  for (const char* name : {"a", "b", "c", "d", "e"}) {
    CHECK_MESSAGE(call_function(*m, name, {}, {}).error == RunError::runtime, name);
  }
}

TEST_CASE("value semantics and records") {
  auto m = load(
      "record P { x: int, y: int }\n"
      "global ORIGIN: int = 10;\n"
      "fn bump(p: P) -> P { p.x = p.x + 1; return p; }\n"
      "fn f() -> int {\n"
      "  var a = P{y: 2, x: 1};\n"
      "  var b = a;\n"
      "  b.x = 100;\n"
      "  var c = bump(a);\n"
      "  var xs = [a, b];\n"
      "  xs[0].y = 50;\n"
      "  ORIGIN = ORIGIN + 1;\n"
      "  return a.x * 1000000 + c.x * 10000 + xs[0].y * 100 + ORIGIN;\n"
      "}\n");
  Outcome o = call_function(*m, "f", {}, {});
  REQUIRE_MESSAGE(o.ok(), o.message);
  CHECK(o.outputs[0].as_int() == 1 * 1000000 + 2 * 10000 + 50 * 100 + 11);
}

TEST_CASE("globals are re-initialized per run") {
  auto m = load(
      "global COUNT: int = 0;\n"
      "fn tick(x: int) -> int { COUNT = COUNT + x; return COUNT; }\n");
  auto rec = run_chunk(method_chunk(m, "tick"), ints({5, 5, 5}), ExecPolicy{});
  for (const auto& r : rec.runs) CHECK(r.outcome.outputs[0].as_int() == 5);
}

TEST_CASE("outcomes are independent of input order") {
  auto m = load(
      "fn f(x: int) -> int {\n"
      "  var acc = 0;\n"
      "  for (var i = 0; i < x % 50; i = i + 1) { acc = acc + i * x; }\n"
      "  return acc / (x % 7);\n"
      "}\n");
  Chunk c = method_chunk(m, "f");
  std::vector<InputVector> inputs;
  for (std::int64_t x = -20; x < 40; ++x) inputs.push_back({inputs.size(), {Value(x)}});
  auto base = run_chunk(c, inputs, ExecPolicy{});
  std::mt19937_64 rng(3);
  auto shuffled = inputs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto again = run_chunk(c, shuffled, ExecPolicy{});
  REQUIRE(again.runs.size() == base.runs.size());
  for (std::size_t i = 0; i < base.runs.size(); ++i) {
    CHECK(again.runs[i].input_index == base.runs[i].input_index);
    CHECK(again.runs[i].outcome.error == base.runs[i].outcome.error);
    if (base.runs[i].outcome.ok()) {
      CHECK(canonical(again.runs[i].outcome.outputs[0]) == canonical(base.runs[i].outcome.outputs[0]));
    }
  }
}

TEST_CASE("budget monotonicity") {
  auto m = load(
      "fn f(x: int) -> int {\n"
      "  var n = x % 40;\n"
      "  while (n > 0) { n = n - 1; x = x + n; }\n"
      "  return x;\n"
      "}\n");
  Chunk c = method_chunk(m, "f");
  auto inputs = ints({0, 3, 17, 39, 1000});
  ExecPolicy big;
  auto reference = run_chunk(c, inputs, big);
  for (std::uint64_t budget = 1; budget < 200; budget += 7) {
    ExecPolicy p;
    p.step_budget = budget;
    auto rec = run_chunk(c, inputs, p);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!rec.runs[i].outcome.ok()) {
        CHECK(rec.runs[i].outcome.error == RunError::timeout);
        continue;
      }
      for (std::uint64_t more : {budget, budget + 1, budget * 3}) {
        ExecPolicy q;
        q.step_budget = more;
        auto again = run_chunk(c, {inputs[i]}, q);
        CHECK(canonical(again.runs[0].outcome.outputs[0]) ==
              canonical(reference.runs[i].outcome.outputs[0]));
      }
    }
  }
}

TEST_CASE("run_batch partitions and isolates") {
  auto parts = partition_batches(45, 20);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == std::make_pair<std::size_t, std::size_t>(0, 20));
  CHECK(parts[2] == std::make_pair<std::size_t, std::size_t>(40, 45));
  CHECK(partition_batches(0, 20).empty());
  CHECK(run_batch({}, ExecPolicy{}).empty());

  auto m = load(
      "fn inc(x: int) -> int { return x + 1; }\n"
      "fn spin(x: int) -> int { while (true) { x = x + 1; } return x; }\n");
  auto inc = std::make_shared<Chunk>(method_chunk(m, "inc"));
  auto spin = std::make_shared<Chunk>(method_chunk(m, "spin"));
  auto inputs = ints({1, 2, 3});
  std::vector<ExecJob> jobs;
  for (int i = 0; i < 45; ++i) jobs.push_back({i == 7 ? spin : inc, &inputs});
  for (std::size_t workers : {1, 3}) {
    ExecPolicy p;
    p.workers = workers;
    p.step_budget = 500;
    auto recs = run_batch(jobs, p);
    REQUIRE(recs.size() == 45);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(recs[i].chunk_id == jobs[i].chunk->id);
      for (const auto& r : recs[i].runs) {
        if (i == 7) {
          CHECK(r.outcome.error == RunError::timeout);
        } else {
          CHECK(r.outcome.outputs[0].as_int() == static_cast<std::int64_t>(r.input_index) + 2);
        }
      }
    }
  }
}

TEST_CASE("self-extending assignments keep copying semantics") {
  // g is a global, so the callee's write is visible; the left operand was
  // read before the call.
  CHECK(eval_fn("global g: string = \"\";\n"
                "fn f() -> string { g = \"a\"; g = g + bump(); return g; }\n"
                "fn bump() -> string { g = g + \"!\"; return \"x\"; }\n")
            .as_string() == "ax");
  CHECK(eval_fn("fn f(s: string) -> string { s = s + s; return s; }", {Value(std::string("ab"))})
            .as_string() == "abab");
  CHECK(eval_fn("fn f() -> [int] { var a = [1]; a = append(a, len(a)); a = append(a, a[1]); return a; }")
            .as_array()
            .items.size() == 3);

  auto m = load(
      "fn cat() -> string { var s = \"\"; var i = 0; while (i < 3) { s = s + \"#\"; i = i + 1; } return s; }\n"
      "fn push() -> [int] { var a: [int] = []; var i = 0; while (i < 3) { a = append(a, i); i = i + 1; } return a; }\n");
  ExecPolicy p;
  // call + 2 decls + while + 3 * (check + 2 statements) + final check + return
  p.step_budget = 15;
  CHECK(call_function(*m, "cat", {}, p).ok());
  p.step_budget = 14;
  CHECK(call_function(*m, "cat", {}, p).error == RunError::timeout);
  // append is a builtin call: one more step per iteration
  p.step_budget = 18;
  CHECK(call_function(*m, "push", {}, p).ok());
  p.step_budget = 17;
  CHECK(call_function(*m, "push", {}, p).error == RunError::timeout);

  p = ExecPolicy{};
  p.max_length = 4;
  auto grow = load("fn f() -> string { var s = \"ab\"; s = s + \"cde\"; return s; }");
  CHECK(call_function(*grow, "f", {}, p).error == RunError::runtime);
}
