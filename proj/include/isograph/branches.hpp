#pragma once

#include <compare>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isograph/structural.hpp"

namespace isograph {

/// A path (i_0, ..., i_p) whose interior vertices all lie outside S.
/// Vertices are distinct except that a closed branch has i_0 == i_p.
struct Branch {
  VertexList vertices;

  std::size_t length() const { return vertices.size() - 1; }
  Vertex front() const { return vertices.front(); }
  Vertex back() const { return vertices.back(); }
  bool uses_edge(Vertex i, Vertex j) const;

  auto operator<=>(const Branch&) const = default;
};

/// All branches of (G, S) plus the four lookup indices: by endpoints, by start,
/// by end, and by interior vertex. Each branch is stored once; index buckets
/// hold pointers into the store and iterate in lexicographic order.
class BranchSet {
 public:
  struct PtrLess {
    bool operator()(const Branch* a, const Branch* b) const { return *a < *b; }
  };
  using Bucket = std::set<const Branch*, PtrLess>;

  BranchSet() = default;
  BranchSet(const BranchSet& other);
  BranchSet& operator=(const BranchSet& other);
  BranchSet(BranchSet&&) noexcept = default;
  BranchSet& operator=(BranchSet&&) noexcept = default;

  /// Returns false if already present.
  bool insert(Branch b);
  bool erase(const Branch& b);
  bool contains(const Branch& b) const { return store_.count(b) != 0; }

  std::size_t size() const { return store_.size(); }
  bool empty() const { return store_.empty(); }
  const std::set<Branch>& all() const { return store_; }

  const Bucket& between(Vertex i, Vertex j) const;  ///< B_ij
  const Bucket& from(Vertex i) const;               ///< B_i*
  const Bucket& to(Vertex j) const;                 ///< B_*j
  const Bucket& through(Vertex i) const;            ///< B_*i*, i interior

  /// The m statistic: the largest of |B_*i*|, |B_*i| and |B_i*| over all vertices.
  std::size_t max_branches_at_vertex() const;
  /// Longest branch length (0 when empty).
  std::size_t max_length() const;

  bool operator==(const BranchSet& other) const { return store_ == other.store_; }

  nlohmann::json to_json() const;
  static BranchSet from_json(const nlohmann::json& j);

 private:
  void index(const Branch* b);
  void unindex(const Branch* b);

  std::set<Branch> store_;
  std::map<std::pair<Vertex, Vertex>, Bucket> between_;
  std::map<Vertex, Bucket> from_;
  std::map<Vertex, Bucket> to_;
  std::map<Vertex, Bucket> through_;
};

/// Restricts which branches an enumeration records.
struct BranchFilter {
  bool starts_in_s = false;  ///< only branches starting in S
  bool ends_in_s = false;    ///< only branches ending in S
};

/// Every branch of (G, S) by depth-first search from each source, descending only
/// into the complement. Runs sources in parallel (OpenMP); the result is identical
/// to enumerate_branches_serial.
BranchSet enumerate_branches(const WeightedDigraph& g, const StructuralSet& s,
                             BranchFilter filter = {});
BranchSet enumerate_branches_serial(const WeightedDigraph& g, const StructuralSet& s,
                                    BranchFilter filter = {});

/// Branches through the given source, appended in DFS order. Shared by both enumerators.
void enumerate_from(const WeightedDigraph& g, const std::vector<bool>& in_s, Vertex source,
                    BranchFilter filter, std::vector<Branch>& out);

}  // namespace isograph
