#include "isograph/branches.hpp"

#include <algorithm>

#include <omp.h>

namespace isograph {

bool Branch::uses_edge(Vertex i, Vertex j) const {
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
    if (vertices[k] == i && vertices[k + 1] == j) return true;
  return false;
}

BranchSet::BranchSet(const BranchSet& other) : store_(other.store_) {
  for (const Branch& b : store_) index(&b);
}

BranchSet& BranchSet::operator=(const BranchSet& other) {
  if (this != &other) {
    BranchSet copy(other);
    *this = std::move(copy);
  }
  return *this;
}

bool BranchSet::insert(Branch b) {
  auto [it, inserted] = store_.insert(std::move(b));
  if (inserted) index(&*it);
  return inserted;
}

bool BranchSet::erase(const Branch& b) {
  auto it = store_.find(b);
  if (it == store_.end()) return false;
  unindex(&*it);
  store_.erase(it);
  return true;
}

void BranchSet::index(const Branch* b) {
  between_[{b->front(), b->back()}].insert(b);
  from_[b->front()].insert(b);
  to_[b->back()].insert(b);
  for (std::size_t k = 1; k + 1 < b->vertices.size(); ++k) through_[b->vertices[k]].insert(b);
}

void BranchSet::unindex(const Branch* b) {
  auto drop = [b](auto& map, const auto& key) {
    auto it = map.find(key);
    it->second.erase(b);
    if (it->second.empty()) map.erase(it);
  };
  drop(between_, std::pair{b->front(), b->back()});
  drop(from_, b->front());
  drop(to_, b->back());
  for (std::size_t k = 1; k + 1 < b->vertices.size(); ++k) drop(through_, b->vertices[k]);
}

namespace {

const BranchSet::Bucket& lookup(const auto& map, const auto& key) {
  static const BranchSet::Bucket empty;
  auto it = map.find(key);
  return it == map.end() ? empty : it->second;
}

std::size_t largest_bucket(const auto& map) {
  std::size_t best = 0;
  for (const auto& [key, bucket] : map) best = std::max(best, bucket.size());
  return best;
}

}  // namespace

const BranchSet::Bucket& BranchSet::between(Vertex i, Vertex j) const {
  return lookup(between_, std::pair{i, j});
}
const BranchSet::Bucket& BranchSet::from(Vertex i) const { return lookup(from_, i); }
const BranchSet::Bucket& BranchSet::to(Vertex j) const { return lookup(to_, j); }
const BranchSet::Bucket& BranchSet::through(Vertex i) const { return lookup(through_, i); }

std::size_t BranchSet::max_branches_at_vertex() const {
  return std::max({largest_bucket(from_), largest_bucket(to_), largest_bucket(through_)});
}

std::size_t BranchSet::max_length() const {
  std::size_t best = 0;
  for (const Branch& b : store_) best = std::max(best, b.length());
  return best;
}

nlohmann::json BranchSet::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const Branch& b : store_) {
    nlohmann::json seq = nlohmann::json::array();
    for (Vertex v : b.vertices) seq.push_back(v + 1);
    list.push_back(std::move(seq));
  }
  return {{"branches", std::move(list)}};
}

BranchSet BranchSet::from_json(const nlohmann::json& j) {
  BranchSet set;
  for (const auto& seq : j.at("branches")) {
    Branch b;
    for (const auto& v : seq) {
      const auto id = v.get<long long>();
      if (id < 1) throw Error(ErrorKind::InvalidInput, "branch vertex ids are one-based");
      b.vertices.push_back(static_cast<Vertex>(id - 1));
    }
    if (b.vertices.size() < 2) throw Error(ErrorKind::InvalidInput, "branch needs two vertices");
    set.insert(std::move(b));
  }
  return set;
}

void enumerate_from(const WeightedDigraph& g, const std::vector<bool>& in_s, Vertex source,
                    BranchFilter filter, std::vector<Branch>& out) {
  if (filter.starts_in_s && !in_s[source]) return;

  VertexList path{source};
  std::vector<bool> on_path(g.slot_count(), false);
  on_path[source] = true;
  struct Frame {
    WeightedDigraph::Adjacency::const_iterator next, end;
  };
  std::vector<Frame> frames{{g.out_edges(source).begin(), g.out_edges(source).end()}};

  auto record = [&](Vertex last) {
    if (filter.ends_in_s && !in_s[last]) return;
    Branch b{path};
    b.vertices.push_back(last);
    out.push_back(std::move(b));
  };

  while (!frames.empty()) {
    Frame& top = frames.back();
    if (top.next == top.end) {
      on_path[path.back()] = false;
      path.pop_back();
      frames.pop_back();
      continue;
    }
    const Vertex w = (top.next++)->first;
    if (w == source) {
      record(w);  // a loop at the source or a closed branch back to it
      continue;
    }
    if (on_path[w]) continue;
    record(w);
    if (!in_s[w]) {
      path.push_back(w);
      on_path[w] = true;
      frames.push_back({g.out_edges(w).begin(), g.out_edges(w).end()});
    }
  }
}

namespace {

std::vector<bool> membership_of(const WeightedDigraph& g, const StructuralSet& s) {
  std::vector<bool> in_s(g.slot_count(), false);
  for (Vertex v : s.members) in_s.at(v) = true;
  return in_s;
}

}  // namespace

BranchSet enumerate_branches_serial(const WeightedDigraph& g, const StructuralSet& s,
                                    BranchFilter filter) {
  const auto in_s = membership_of(g, s);
  std::vector<Branch> found;
  for (Vertex v : g.live_vertices()) enumerate_from(g, in_s, v, filter, found);
  BranchSet set;
  for (Branch& b : found) set.insert(std::move(b));
  return set;
}

BranchSet enumerate_branches(const WeightedDigraph& g, const StructuralSet& s, BranchFilter filter) {
  const auto in_s = membership_of(g, s);
  const auto sources = g.live_vertices();
  std::vector<std::vector<Branch>> per_source(sources.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(sources.size()); ++k)
    enumerate_from(g, in_s, sources[static_cast<std::size_t>(k)], filter,
                   per_source[static_cast<std::size_t>(k)]);
  BranchSet set;
  for (auto& bucket : per_source)
    for (Branch& b : bucket) set.insert(std::move(b));
  return set;
}

}  // namespace isograph
