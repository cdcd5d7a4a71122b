// Copyright 2026 The mamrc Authors.
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

// Late-ensemble voting over several models' answer sets for one instance.

#ifndef MAMRC_ENSEMBLE_HPP_
#define MAMRC_ENSEMBLE_HPP_

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "mamrc/core.hpp"

namespace mamrc {

// True when `inner` occurs as a contiguous run inside `outer`.
inline bool contains_run(const std::vector<std::string>& outer,
                         const std::vector<std::string>& inner) {
  if (inner.empty() || inner.size() > outer.size()) return false;
  return std::search(outer.begin(), outer.end(), inner.begin(), inner.end()) != outer.end();
}

struct VoteClass {
  // Longest member; ties broken by the smaller normalized text.
  std::string representative;
  std::string representative_normalized;
  std::set<std::string> members;  // normalized texts
  std::set<std::size_t> voters;   // model indices

  std::size_t votes() const { return voters.size(); }
};

struct VoteTally {
  std::vector<VoteClass> classes;  // ordered by representative_normalized
};

// Groups all predicted spans into containment classes: two spans are
// equivalent when one's normalized tokens occur contiguously in the other's,
// closed transitively. Each model votes at most once per class.
inline VoteTally tally_votes(const std::vector<PredictionSet>& sets) {
  struct Item {
    std::vector<std::string> tokens;
    std::string raw;  // smallest raw spelling seen
    std::set<std::size_t> voters;
  };
  std::map<std::string, Item> items;
  for (std::size_t m = 0; m < sets.size(); ++m)
    for (const auto& p : sets[m].spans) {
      auto key = normalize(p.text);
      if (key.empty()) continue;
      auto [it, fresh] = items.try_emplace(key);
      if (fresh) {
        it->second.tokens = split_ws(key);
        it->second.raw = p.text;
      } else {
        it->second.raw = std::min(it->second.raw, p.text);
      }
      it->second.voters.insert(m);
    }

  std::vector<const std::string*> keys;
  std::vector<const Item*> vals;
  for (const auto& [k, v] : items) {
    keys.push_back(&k);
    vals.push_back(&v);
  }
  std::vector<std::size_t> parent(keys.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j)
      if (contains_run(vals[i]->tokens, vals[j]->tokens) ||
          contains_run(vals[j]->tokens, vals[i]->tokens))
        parent[find(i)] = find(j);

  std::map<std::size_t, VoteClass> by_root;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto& c = by_root[find(i)];
    c.members.insert(*keys[i]);
    c.voters.insert(vals[i]->voters.begin(), vals[i]->voters.end());
    const auto len = vals[i]->tokens.size();
    const auto cur = split_ws(c.representative_normalized).size();
    if (c.representative_normalized.empty() || len > cur ||
        (len == cur && *keys[i] < c.representative_normalized)) {
      c.representative_normalized = *keys[i];
      c.representative = vals[i]->raw;
    }
  }
  VoteTally t;
  for (auto& [_, c] : by_root) t.classes.push_back(std::move(c));
  std::sort(t.classes.begin(), t.classes.end(), [](const VoteClass& a, const VoteClass& b) {
    return a.representative_normalized < b.representative_normalized;
  });
  return t;
}

// Keeps the representative of every class predicted by at least two models.
// When no class reaches two votes, all representatives are kept.
inline PredictionSet vote(const std::vector<PredictionSet>& sets, std::string producer = "vote") {
  if (sets.size() < 2) throw InvalidArgument("voting needs at least two prediction sets");
  for (const auto& s : sets)
    if (s.instance_id != sets.front().instance_id)
      throw InvalidArgument("prediction sets for different instances: '" + sets.front().instance_id +
                            "' and '" + s.instance_id + "'");
  const auto tally = tally_votes(sets);
  const bool any_agreement = std::any_of(tally.classes.begin(), tally.classes.end(),
                                         [](const VoteClass& c) { return c.votes() >= 2; });
  PredictionSet out{sets.front().instance_id, {}, std::move(producer)};
  for (const auto& c : tally.classes)
    if (!any_agreement || c.votes() >= 2) out.spans.push_back({c.representative, std::nullopt});
  return out;
}

}  // namespace mamrc

#endif  // MAMRC_ENSEMBLE_HPP_
