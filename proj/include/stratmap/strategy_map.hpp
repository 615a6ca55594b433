#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stratmap/errors.hpp"

namespace stratmap {

using MilestoneId = std::string;

enum class AttemptOutcome { achieved, failed };

/// One entry of a node's rolling attempt-note buffer: what happened the last
/// time the agent went after this milestone.
struct AttemptNote {
    int episode = 0;
    AttemptOutcome outcome = AttemptOutcome::failed;
    double reward = 0.0;
    std::optional<int> step;      // step at which the milestone was achieved
    std::string failure_reason;   // set when outcome == failed
};

/// Ring-buffer capacity for attempt notes.
inline constexpr std::size_t kAttemptNoteCap = 5;

/// A discrete sub-goal: natural-language description, the action sequence
/// known to reach it, and its direct prerequisites.
struct Milestone {
    MilestoneId id;
    std::string description;
    std::vector<std::string> key_actions;
    std::set<MilestoneId> deps;
    std::string pitfalls;    // optional free-text notes
    std::string guidance;    // optional, written by stuck-node diagnosis
};

/// Per-node bandit statistics: visit count, running mean of propagated
/// credit, and an online sum of squared deviations. Variance is reported
/// unbiased (m2 / (n - 1)) and is undefined for n < 2.
struct MilestoneStats {
    int n = 0;
    double mean_reward = 0.0;
    double m2 = 0.0;
    std::deque<AttemptNote> attempt_notes;  // oldest first, size <= kAttemptNoteCap
    std::optional<int> last_diagnosed_episode;

    /// Fold one credited visit into the running statistics (Welford update).
    void record(double credit);

    std::optional<double> variance() const;

    void push_note(AttemptNote note);
};

/// The abstract planning state of one episode: milestones achieved so far
/// (always including the root) plus the per-episode exclusion set of
/// milestones that failed or were auto-skipped.
struct AbstractState {
    std::set<MilestoneId> achieved;
    std::set<MilestoneId> failed_or_skipped;

    static AbstractState initial(const MilestoneId& root);
};

enum class EditOpKind { add_child, add_branch, update_node, update_deps, prune };
enum class EditOrigin { refinement, fork_discovery };

/// A single validated map mutation. add_child / add_branch carry a complete
/// Milestone; update_node carries the changed fields; update_deps carries the
/// replacement dependency set; prune carries only the target.
struct EditOp {
    EditOpKind kind = EditOpKind::update_node;
    EditOrigin origin = EditOrigin::refinement;
    MilestoneId target;
    std::optional<Milestone> node;
    std::optional<std::string> description;
    std::optional<std::vector<std::string>> key_actions;
    std::optional<std::string> pitfalls;
    std::optional<std::string> guidance;
    std::optional<std::set<MilestoneId>> deps;

    static EditOp add_child(Milestone m, EditOrigin origin = EditOrigin::refinement);
    static EditOp add_branch(Milestone m, EditOrigin origin = EditOrigin::refinement);
    static EditOp update_deps(MilestoneId target, std::set<MilestoneId> new_deps);
    static EditOp prune(MilestoneId target);
};

enum class RejectReason {
    none,
    cycle_rejected,
    unknown_target,
    duplicate_id,
    root_mutation,
    invalid_payload,
};

const char* to_string(RejectReason reason);
const char* to_string(EditOpKind kind);

/// Outcome of applying one edit op. Rejections are expected control flow:
/// the map is untouched and the reason says why.
struct ApplyResult {
    bool accepted = false;
    RejectReason reason = RejectReason::none;
    std::string detail;

    static ApplyResult ok() { return {true, RejectReason::none, {}}; }
    static ApplyResult reject(RejectReason r, std::string d) {
        return {false, r, std::move(d)};
    }
};

/// How dependencies are interpreted when computing the eligible set.
/// flat_list ignores all dependency edges (every live non-root node whose
/// outcome is still open is eligible).
enum class DepsView { dag, flat_list };

/// The strategy map: a rooted DAG of milestones with per-node statistics.
///
/// Invariants (preserved by every accepted op, enforced on load):
///   - exactly one root; the root has no dependencies and is never pruned
///   - every dependency reference resolves; no self-edges
///   - the graph is acyclic and every node is reachable from the root
class StrategyMap {
public:
    StrategyMap() : StrategyMap("root") {}
    explicit StrategyMap(MilestoneId root_id);

    const MilestoneId& root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    bool contains(const MilestoneId& id) const { return nodes_.count(id) > 0; }

    const Milestone& milestone(const MilestoneId& id) const;
    const MilestoneStats& stats(const MilestoneId& id) const;
    MilestoneStats& stats(const MilestoneId& id);

    /// All node ids in lexicographic order.
    std::vector<MilestoneId> ids() const;

    /// All edges (u, v) with u a direct prerequisite of v, sorted.
    std::vector<std::pair<MilestoneId, MilestoneId>> edges() const;

    /// Direct successors of a node: every v with id in deps(v).
    std::vector<MilestoneId> successors(const MilestoneId& id) const;

    /// Apply one edit op. On rejection the map is byte-identical to its
    /// pre-op state.
    ApplyResult apply(const EditOp& op);

    /// Milestones not yet achieved whose prerequisites are all achieved,
    /// minus the per-episode exclusion set. Never contains the root.
    /// Result is sorted by id. Throws UnknownMilestone if state.achieved
    /// references an id that is not in the map.
    std::vector<MilestoneId> eligible(const AbstractState& state,
                                      DepsView view = DepsView::dag) const;

    /// Dependency-respecting order: every node appears after all of its
    /// prerequisites. Ties are broken lexicographically by id, so the
    /// result is deterministic.
    std::vector<MilestoneId> topological_order() const;

    void set_guidance(const MilestoneId& id, std::string text);

    /// Full invariant check; throws SchemaViolation on the first violation.
    /// apply() maintains the invariants incrementally, so this is only
    /// needed after deserialization (and in tests).
    void validate() const;

private:
    struct Node {
        Milestone milestone;
        MilestoneStats stats;
    };

    Milestone& milestone_mut(const MilestoneId& id);
    bool reaches_any(const MilestoneId& from, const std::set<MilestoneId>& targets) const;
    ApplyResult apply_add(const EditOp& op);
    ApplyResult apply_update_node(const EditOp& op);
    ApplyResult apply_update_deps(const EditOp& op);
    ApplyResult apply_prune(const EditOp& op);

    MilestoneId root_;
    std::map<MilestoneId, Node> nodes_;

    friend struct MapAccess;  // serialization helper, see map_io.cpp
};

}  // namespace stratmap
