#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "isograph/cost_model.hpp"
#include "isograph/reduction.hpp"
#include "isograph/spectral.hpp"

namespace isograph {

/// One graph change. Vertex ids are 0-based here and 1-based in JSON.
///
/// add_edge takes a raw weight: the edge is inserted and then column j is rescaled
/// to sum one. remove_edge and remove_vertex rescale every column that lost an entry.
/// add_vertex creates the next free slot (slot_count before the op).
struct DeltaOp {
  enum class Kind { AddVertex, RemoveVertex, AddEdge, RemoveEdge };

  Kind kind = Kind::AddVertex;
  Vertex i = 0;  ///< the vertex for RemoveVertex, the tail for edges
  Vertex j = 0;  ///< the head for edges
  double weight = 0.0;

  static DeltaOp add_vertex() { return {Kind::AddVertex, 0, 0, 0.0}; }
  static DeltaOp remove_vertex(Vertex v) { return {Kind::RemoveVertex, v, 0, 0.0}; }
  static DeltaOp add_edge(Vertex i, Vertex j, double w) { return {Kind::AddEdge, i, j, w}; }
  static DeltaOp remove_edge(Vertex i, Vertex j) { return {Kind::RemoveEdge, i, j, 0.0}; }

  nlohmann::json to_json() const;
  static DeltaOp from_json(const nlohmann::json& j);
  bool operator==(const DeltaOp&) const = default;
};

/// An ordered list of changes, serialized as {"ops": [{"op": "add_edge", "from": 3, "to": 7, "weight": 0.4}, ...]}.
struct GraphDelta {
  std::vector<DeltaOp> ops;

  std::size_t size() const { return ops.size(); }
  nlohmann::json to_json() const;
  static GraphDelta from_json(const nlohmann::json& j);
};

GraphDelta load_delta(const std::filesystem::path& path);
void save_delta(const std::filesystem::path& path, const GraphDelta& delta);

/// Throws RejectedDelta if the op cannot be applied to g as it stands.
void check_op(const WeightedDigraph& g, const DeltaOp& op);
/// Applies one op including column renormalization. Returns the new slot for AddVertex.
Vertex apply_graph_op(WeightedDigraph& g, const DeltaOp& op);

/// Tunables for building and updating stored states.
struct UpdateOptions {
  std::size_t max_ops = 64;        ///< larger deltas are rejected
  double stochastic_tol = 1e-10;   ///< column sums
  /// Reduced eigenvector iteration. The dense primitivity test is skipped; a run that does
  /// not converge is repeated with the lazy variant.
  PowerIterationOptions power{100000, 1e-14, PowerIterationOptions::Primitivity::Attested, false, {}};
};

/// Everything kept between updates: the stochastic graph, S, the branch set, the
/// extended reduced matrix and both eigenvectors (L1-positive).
struct StoredState {
  WeightedDigraph graph;
  StructuralSet structural;
  BranchSet branches;
  ExtendedReducedMatrix extended;
  EigenPair reduced;   ///< over structural.members
  EigenPair dominant;  ///< over the live vertices
  std::size_t power_iterations = 0;

  /// Validates g (column-stochastic, loop-free, strongly connected), finds S, enumerates and
  /// solves. A periodic graph is solved with the lazy iteration.
  static StoredState build(WeightedDigraph g, const UpdateOptions& opts = {});
  /// Same with a given structural set. Throws NotStructural if it is not 1-structural.
  static StoredState build(WeightedDigraph g, const VertexList& s, const UpdateOptions& opts = {});

  /// Writes graph.txt, state.json, branches.json, extended_reduced.json,
  /// reduced_eigenvector.json and eigenvector.json into dir.
  void save(const std::filesystem::path& dir) const;
  static StoredState load(const std::filesystem::path& dir);

  Measurements measurements(std::size_t ell = 0, std::size_t p = 0) const;
};

struct ConsistencyIssue {
  std::string invariant;
  std::string detail;
};

/// Recomputes every stored quantity from the graph and lists the ones that disagree.
/// Empty means consistent.
std::vector<ConsistencyIssue> check_consistency(const StoredState& state, double tol = 1e-12,
                                                double eigen_tol = 1e-8);

/// What happened to one op during steps 1 to 4.
struct OpRecord {
  DeltaOp op;
  Vertex created = 0;            ///< new slot for AddVertex
  bool promoted = false;         ///< the tail joined S
  std::size_t added = 0;         ///< branches inserted
  std::size_t deleted = 0;       ///< branches removed
  std::size_t reweighted = 0;    ///< surviving branches through a renormalized column
  std::size_t skipped = 0;       ///< concatenations rejected for repeating a vertex
  double step3 = 0.0;
  double step4 = 0.0;
  double step4_reweight = 0.0;
};

struct UpdateLog {
  std::vector<OpRecord> ops;
  bool structural_fallback = false;  ///< S emptied or broke and was searched again from scratch
  std::size_t power_iterations = 0;
  bool power_converged = false;
  double eigen_residual = 0.0;  ///< ||M' v - v||_1 after the lift

  double step3() const;
  double step4() const;
  double step4_reweight() const;
  std::size_t promotions() const;
  std::size_t skipped() const;
};

/// Applies deltas to a working copy of a stored state. Each delta is atomic: the ops are
/// first replayed on the graph alone, and if any op or the final validation fails,
/// RejectedDelta is thrown before the state is touched. Any later failure restores the
/// pre-delta graph and rebuilds its branch set and extended matrix.
class UpdateSession {
 public:
  explicit UpdateSession(StoredState base, UpdateOptions opts = {});

  /// Steps 1 to 4 for every op in order, then validation of the new graph.
  void apply(const GraphDelta& delta);
  /// Steps 5 and 6: reduced eigenvector (warm-started) and lift.
  void refresh_eigen();

  const StoredState& state() const { return state_; }
  StoredState take() && { return std::move(state_); }
  const UpdateLog& log() const { return log_; }
  std::size_t ops_applied() const { return log_.ops.size(); }

 private:
  void apply_op(StoredState& st, const DeltaOp& op, OpRecord& rec) const;
  void finish(StoredState& st, UpdateLog& log) const;

  StoredState state_;
  UpdateOptions opts_;
  UpdateLog log_;
};

struct UpdateOutcome {
  StoredState state;
  UpdateLog log;
};

/// apply + refresh_eigen on a fresh session.
UpdateOutcome update(const StoredState& base, const GraphDelta& delta, const UpdateOptions& opts = {});

/// Rebuilds from scratch: applies the graph ops, derives S' by the reachability form of
/// the promotion rule (the tail joins S when the head already reaches it through the
/// complement), then enumerates and solves everything anew.
StoredState scratch_update(const StoredState& base, const GraphDelta& delta, const UpdateOptions& opts = {});

/// Itemized costs of an update against ell N'^3.
CostReport cost_report(const StoredState& before, const StoredState& after, const GraphDelta& delta,
                       const UpdateLog& log, std::size_t ell, double ratio = 0.1);

}  // namespace isograph
