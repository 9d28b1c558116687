#include "simion/inputgen.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <random>
#include <set>

#include "simion/digest.hpp"

namespace simion {

std::vector<std::int64_t> GenPolicy::default_int_pool() {
  return {std::numeric_limits<std::int64_t>::min(), -42, -1, 0, 1, 2, 7, 42, 127, 128, 255,
          std::numeric_limits<std::int64_t>::max()};
}

std::vector<double> GenPolicy::default_float_pool() {
  return {-1.5, -0.0, 0.0, 0.5, 1.0, 3.14, 1e9};
}

std::vector<std::string> GenPolicy::default_string_pool() {
  return {"",       "a",      " ",
          "ab",     "hello world", " lead",
          "trail ", "\xC3\x9Cn\xC3\xAF" "c\xC3\xB8" "d\xC3\xA9",
          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_"};
}

NoGenerator::NoGenerator(TypeRef type)
    : std::runtime_error("no input generator for type " + type.str()), type_(std::move(type)) {}

std::vector<Value> primitive_pool(const TypeRef& type, const GenPolicy& policy) {
  std::vector<Value> out;
  switch (type.kind()) {
    case TypeRef::Kind::Int:
      for (auto v : policy.int_pool) out.emplace_back(v);
      break;
    case TypeRef::Kind::Float:
      for (auto v : policy.float_pool) out.emplace_back(v);
      break;
    case TypeRef::Kind::Bool:
      for (bool v : policy.bool_pool) out.emplace_back(v);
      break;
    case TypeRef::Kind::String:
      for (const auto& v : policy.string_pool) out.emplace_back(v);
      break;
    default:
      throw NoGenerator(type);
  }
  return out;
}

namespace {

class Generator {
 public:
  Generator(const Module* module, const GenPolicy& policy, std::uint64_t seed)
      : module_(module), policy_(policy), rng_(seed) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(i)]);
  }

  std::vector<Value> domain(const TypeRef& type, int depth) {
    if (type.is_primitive()) return primitive_pool(type, policy_);
    if (type.is_array()) {
      std::vector<Value> elems = domain(type.element(), depth);
      std::vector<Value> out;
      for (std::size_t size : policy_.array_sizes) {
        std::size_t count = size == 0 ? 1 : policy_.arrays_per_size;
        for (std::size_t k = 0; k < count; ++k) {
          ArrayValue arr;
          if (!elems.empty()) {
            for (std::size_t i = 0; i < size; ++i) arr.items.push_back(elems[pick(elems.size())]);
          } else if (size > 0) {
            break;
          }
          out.emplace_back(std::move(arr));
        }
      }
      return dedup(std::move(out));
    }
    if (type.is_record()) {
      const RecordDecl* rec = module_ ? module_->find_record(type.name()) : nullptr;
      if (!rec || depth >= policy_.recursion_depth_limit) throw NoGenerator(type);
      std::vector<std::vector<Value>> fields;
      for (const auto& f : rec->fields) fields.push_back(domain(f.type, depth + 1));
      std::vector<Value> out;
      for (std::size_t k = 0; k < policy_.record_candidates; ++k) {
        RecordValue r{rec->name, {}};
        for (const auto& d : fields) r.fields.push_back(d[pick(d.size())]);
        out.emplace_back(std::move(r));
      }
      return dedup(std::move(out));
    }
    throw NoGenerator(type);
  }

 private:
  static std::vector<Value> dedup(std::vector<Value> values) {
    std::set<std::string> seen;
    std::vector<Value> out;
    for (auto& v : values) {
      if (seen.insert(canonical(v)).second) out.push_back(std::move(v));
    }
    return out;
  }

  const Module* module_;
  const GenPolicy& policy_;
  std::mt19937_64 rng_;
};

std::uint64_t series_seed(std::uint64_t seed, const std::string& key) {
  Digest d = md5(key);
  std::uint64_t h = 0;
  std::memcpy(&h, d.bytes.data(), sizeof(h));
  return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

}  // namespace

bool has_generator(const ChunkSignature& signature, int depth_limit) {
  GenPolicy probe;
  probe.recursion_depth_limit = depth_limit;
  probe.record_candidates = 1;
  probe.arrays_per_size = 1;
  probe.array_sizes = {0};
  try {
    Generator g(signature.module.get(), probe, 0);
    for (const auto& t : signature.slots) g.domain(t, 0);
  } catch (const NoGenerator&) {
    return false;
  }
  return true;
}

std::vector<InputVector> gen_input_series(const ChunkSignature& signature,
                                          const GenPolicy& policy) {
  const std::string key = signature.key(policy.recursion_depth_limit);
  Generator gen(signature.module.get(), policy, series_seed(policy.seed, key));
  std::vector<std::vector<Value>> domains;
  for (const auto& t : signature.slots) domains.push_back(gen.domain(t, 0));

  std::vector<std::vector<std::size_t>> tuples;
  // Saturates just above max_inputs.
  std::size_t product = 1;
  for (const auto& d : domains) {
    if (d.empty()) return {};
    product = std::min(product * d.size(), policy.max_inputs + 1);
  }
  const bool small = product <= policy.max_inputs;
  if (small) {
    for (std::size_t n = 0; n < product; ++n) {
      std::vector<std::size_t> t(domains.size());
      std::size_t rest = n;
      for (std::size_t s = domains.size(); s-- > 0;) {
        t[s] = rest % domains[s].size();
        rest /= domains[s].size();
      }
      tuples.push_back(std::move(t));
    }
    gen.shuffle(tuples);
  } else {
    std::set<std::vector<std::size_t>> seen;
    while (tuples.size() < policy.max_inputs) {
      std::vector<std::size_t> t(domains.size());
      for (std::size_t s = 0; s < domains.size(); ++s) t[s] = gen.pick(domains[s].size());
      if (seen.insert(t).second) tuples.push_back(std::move(t));
    }
  }

  std::vector<InputVector> out;
  out.reserve(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    InputVector v{i, {}};
    for (std::size_t s = 0; s < domains.size(); ++s) v.values.push_back(domains[s][tuples[i][s]]);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Chunk> permute_signatures(const Chunk& chunk, std::size_t cap) {
  const std::size_t n = chunk.inputs.size();
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> current;
  std::vector<bool> used(n, false);
  auto dfs = [&](auto&& self) -> void {
    if (perms.size() >= cap) return;
    if (current.size() == n) {
      bool identity = true;
      for (std::size_t i = 0; i < n; ++i) identity = identity && current[i] == i;
      if (!identity) perms.push_back(current);
      return;
    }
    const std::size_t slot = current.size();
    for (std::size_t j = 0; j < n && perms.size() < cap; ++j) {
      if (used[j] || !(chunk.inputs[j].type == chunk.inputs[slot].type)) continue;
      used[j] = true;
      current.push_back(j);
      self(self);
      current.pop_back();
      used[j] = false;
    }
  };
  dfs(dfs);

  std::vector<Chunk> out;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    const auto& pi = perms[k];
    Chunk v = chunk;
    v.variant.permutation = static_cast<int>(k + 1);
    for (std::size_t i = 0; i < n; ++i) v.inputs[i] = chunk.inputs[pi[i]];
    for (auto& o : v.outputs) {
      for (std::size_t i = 0; i < n; ++i) {
        if (o.name == chunk.inputs[i].name) {
          o = v.inputs[i];
          break;
        }
      }
    }
    v.id = compute_chunk_id(v);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace simion
