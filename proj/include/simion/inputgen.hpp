#pragma once

// Deterministic input series for chunk signatures, and parameter-order
// permutation variants.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "simion/chunking.hpp"
#include "simion/value.hpp"

namespace simion {

struct GenPolicy {
  std::uint64_t seed = 0;
  std::size_t max_inputs = 100;
  std::vector<std::size_t> array_sizes{0, 1, 3, 7};
  int recursion_depth_limit = 4;
  std::size_t arrays_per_size = 2;     // random arrays per nonzero size
  std::size_t record_candidates = 8;   // random instances per record type
  std::vector<std::int64_t> int_pool = default_int_pool();
  std::vector<double> float_pool = default_float_pool();
  std::vector<bool> bool_pool{false, true};
  std::vector<std::string> string_pool = default_string_pool();

  static std::vector<std::int64_t> default_int_pool();
  static std::vector<double> default_float_pool();
  static std::vector<std::string> default_string_pool();
};

struct InputVector {
  std::size_t index = 0;
  std::vector<Value> values;
};

/// No value of `type` can be constructed (opaque, or records nested past
/// the depth limit).
class NoGenerator : public std::runtime_error {
 public:
  explicit NoGenerator(TypeRef type);
  const TypeRef& type() const { return type_; }

 private:
  TypeRef type_;
};

std::vector<Value> primitive_pool(const TypeRef& type, const GenPolicy& policy);

/// Up to max_inputs distinct vectors. Pure in (signature key, seed).
/// Throws NoGenerator.
std::vector<InputVector> gen_input_series(const ChunkSignature& signature,
                                          const GenPolicy& policy);

/// True if every slot of the signature can be generated.
bool has_generator(const ChunkSignature& signature, int depth_limit = 4);

/// Variants reordering same-typed inputs, in lexicographic order of the
/// permutation, identity excluded, at most `cap`.
std::vector<Chunk> permute_signatures(const Chunk& chunk, std::size_t cap = 25);

}  // namespace simion
