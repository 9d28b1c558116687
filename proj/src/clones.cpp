#include "simion/clones.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace simion {

std::string_view clone_kind_name(CloneKind k) { return k == CloneKind::type15 ? "type15" : "type3"; }

namespace {

bool lower_origin(const Chunk& a, const Chunk& b) {
  if (auto c = a.origin <=> b.origin; c != 0) return c < 0;
  return a.id < b.id;
}

}  // namespace

std::string type15_key(const Chunk& chunk) {
  std::string key;
  for (const auto& t : normalize_tokens(chunk.statements, TokenMode::ConsistentRename)) {
    key += t;
    key += '\x1f';
  }
  return key;
}

Type15Result filter_type15(const std::vector<ChunkPtr>& chunks) {
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < chunks.size(); ++i) buckets[type15_key(*chunks[i])].push_back(i);

  std::vector<bool> keep(chunks.size(), true);
  Type15Result result;
  for (auto& [key, idx] : buckets) {
    if (idx.size() < 2) continue;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return lower_origin(*chunks[a], *chunks[b]); });
    CloneClass cls;
    cls.kind = CloneKind::type15;
    cls.representative = chunks[idx.front()]->id;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      cls.members.push_back(chunks[idx[k]]->id);
      if (k > 0) keep[idx[k]] = false;
    }
    result.classes.push_back(std::move(cls));
  }
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (keep[i]) result.survivors.push_back(chunks[i]);
  }
  std::sort(result.classes.begin(), result.classes.end(),
            [](const CloneClass& a, const CloneClass& b) { return a.members < b.members; });
  return result;
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t stmt_edit_distance(const Chunk& a, const Chunk& b) {
  return edit_distance(normalize_statements(a.statements, TokenMode::ConsistentRename),
                       normalize_statements(b.statements, TokenMode::ConsistentRename));
}

Type3Result filter_type3(const std::vector<SimionGroup>& groups, std::size_t threshold) {
  Type3Result result;
  for (const auto& group : groups) {
    const std::size_t n = group.members.size();
    std::vector<std::vector<std::string>> norm;
    norm.reserve(n);
    for (const auto& m : group.members) {
      norm.push_back(normalize_statements(m.chunk->statements, TokenMode::ConsistentRename));
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (edit_distance(norm[i], norm[j]) <= threshold) parent[find(i)] = find(j);
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < n; ++i) components[find(i)].push_back(i);

    SimionGroup kept{group.digest, {}};
    for (auto& [root, idx] : components) {
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return lower_origin(*group.members[a].chunk, *group.members[b].chunk);
      });
      kept.members.push_back(group.members[idx.front()]);
      if (idx.size() < 2) continue;
      CloneClass cls;
      cls.kind = CloneKind::type3;
      cls.representative = group.members[idx.front()].chunk->id;
      for (std::size_t i : idx) cls.members.push_back(group.members[i].chunk->id);
      result.classes.push_back(std::move(cls));
    }
    if (kept.members.size() < 2) continue;
    std::sort(kept.members.begin(), kept.members.end(),
              [](const GroupMember& a, const GroupMember& b) { return lower_origin(*a.chunk, *b.chunk); });
    result.groups.push_back(std::move(kept));
  }
  return result;
}

}  // namespace simion
