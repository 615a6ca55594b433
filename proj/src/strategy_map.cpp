#include "stratmap/strategy_map.hpp"

#include <algorithm>
#include <cmath>

namespace stratmap {

void MilestoneStats::record(double credit) {
    n += 1;
    const double delta = credit - mean_reward;
    mean_reward += delta / static_cast<double>(n);
    m2 += delta * (credit - mean_reward);
}

std::optional<double> MilestoneStats::variance() const {
    if (n < 2) {
        return std::nullopt;
    }
    return m2 / static_cast<double>(n - 1);
}

void MilestoneStats::push_note(AttemptNote note) {
    attempt_notes.push_back(std::move(note));
    while (attempt_notes.size() > kAttemptNoteCap) {
        attempt_notes.pop_front();
    }
}

AbstractState AbstractState::initial(const MilestoneId& root) {
    AbstractState s;
    s.achieved.insert(root);
    return s;
}

EditOp EditOp::add_child(Milestone m, EditOrigin origin) {
    EditOp op;
    op.kind = EditOpKind::add_child;
    op.origin = origin;
    op.target = m.id;
    op.node = std::move(m);
    return op;
}

EditOp EditOp::add_branch(Milestone m, EditOrigin origin) {
    EditOp op = add_child(std::move(m), origin);
    op.kind = EditOpKind::add_branch;
    return op;
}

EditOp EditOp::update_deps(MilestoneId target, std::set<MilestoneId> new_deps) {
    EditOp op;
    op.kind = EditOpKind::update_deps;
    op.target = std::move(target);
    op.deps = std::move(new_deps);
    return op;
}

EditOp EditOp::prune(MilestoneId target) {
    EditOp op;
    op.kind = EditOpKind::prune;
    op.target = std::move(target);
    return op;
}

const char* to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::none: return "none";
        case RejectReason::cycle_rejected: return "cycle_rejected";
        case RejectReason::unknown_target: return "unknown_target";
        case RejectReason::duplicate_id: return "duplicate_id";
        case RejectReason::root_mutation: return "root_mutation";
        case RejectReason::invalid_payload: return "invalid_payload";
    }
    return "unknown";
}

const char* to_string(EditOpKind kind) {
    switch (kind) {
        case EditOpKind::add_child: return "add_child";
        case EditOpKind::add_branch: return "add_branch";
        case EditOpKind::update_node: return "update_node";
        case EditOpKind::update_deps: return "update_deps";
        case EditOpKind::prune: return "prune";
    }
    return "unknown";
}

StrategyMap::StrategyMap(MilestoneId root_id) : root_(std::move(root_id)) {
    Node root_node;
    root_node.milestone.id = root_;
    root_node.milestone.description = "episode start";
    nodes_.emplace(root_, std::move(root_node));
}

const Milestone& StrategyMap::milestone(const MilestoneId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw UnknownMilestone("unknown milestone: " + id);
    }
    return it->second.milestone;
}

Milestone& StrategyMap::milestone_mut(const MilestoneId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw UnknownMilestone("unknown milestone: " + id);
    }
    return it->second.milestone;
}

const MilestoneStats& StrategyMap::stats(const MilestoneId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw UnknownMilestone("unknown milestone: " + id);
    }
    return it->second.stats;
}

MilestoneStats& StrategyMap::stats(const MilestoneId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw UnknownMilestone("unknown milestone: " + id);
    }
    return it->second.stats;
}

std::vector<MilestoneId> StrategyMap::ids() const {
    std::vector<MilestoneId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, node] : nodes_) {
        out.push_back(id);
    }
    return out;
}

std::vector<std::pair<MilestoneId, MilestoneId>> StrategyMap::edges() const {
    std::vector<std::pair<MilestoneId, MilestoneId>> out;
    for (const auto& [id, node] : nodes_) {
        for (const auto& dep : node.milestone.deps) {
            out.emplace_back(dep, id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MilestoneId> StrategyMap::successors(const MilestoneId& id) const {
    if (!contains(id)) {
        throw UnknownMilestone("unknown milestone: " + id);
    }
    std::vector<MilestoneId> out;
    for (const auto& [other, node] : nodes_) {
        if (node.milestone.deps.count(id)) {
            out.push_back(other);
        }
    }
    return out;
}

ApplyResult StrategyMap::apply(const EditOp& op) {
    switch (op.kind) {
        case EditOpKind::add_child:
        case EditOpKind::add_branch:
            return apply_add(op);
        case EditOpKind::update_node:
            return apply_update_node(op);
        case EditOpKind::update_deps:
            return apply_update_deps(op);
        case EditOpKind::prune:
            return apply_prune(op);
    }
    return ApplyResult::reject(RejectReason::invalid_payload, "unknown op kind");
}

ApplyResult StrategyMap::apply_add(const EditOp& op) {
    if (!op.node.has_value() || op.node->id.empty()) {
        return ApplyResult::reject(RejectReason::invalid_payload,
                                   "add op requires a complete milestone with a non-empty id");
    }
    Milestone m = *op.node;
    if (nodes_.count(m.id)) {
        return ApplyResult::reject(RejectReason::duplicate_id, "id already in map: " + m.id);
    }
    if (m.deps.empty()) {
        // Milestones declared without prerequisites hang off the root.
        m.deps.insert(root_);
    }
    if (m.deps.count(m.id)) {
        return ApplyResult::reject(RejectReason::cycle_rejected,
                                   "node depends on itself: " + m.id);
    }
    for (const auto& dep : m.deps) {
        if (!nodes_.count(dep)) {
            return ApplyResult::reject(RejectReason::unknown_target, "unknown dep: " + dep);
        }
    }
    Node node;
    node.milestone = std::move(m);
    nodes_.emplace(node.milestone.id, std::move(node));
    return ApplyResult::ok();
}

ApplyResult StrategyMap::apply_update_node(const EditOp& op) {
    auto it = nodes_.find(op.target);
    if (it == nodes_.end()) {
        return ApplyResult::reject(RejectReason::unknown_target, "unknown node: " + op.target);
    }
    Milestone& m = it->second.milestone;
    if (op.description) m.description = *op.description;
    if (op.key_actions) m.key_actions = *op.key_actions;
    if (op.pitfalls) m.pitfalls = *op.pitfalls;
    if (op.guidance) m.guidance = *op.guidance;
    return ApplyResult::ok();
}

ApplyResult StrategyMap::apply_update_deps(const EditOp& op) {
    if (op.target == root_) {
        return ApplyResult::reject(RejectReason::root_mutation, "cannot re-dep the root");
    }
    auto it = nodes_.find(op.target);
    if (it == nodes_.end()) {
        return ApplyResult::reject(RejectReason::unknown_target, "unknown node: " + op.target);
    }
    if (!op.deps.has_value()) {
        return ApplyResult::reject(RejectReason::invalid_payload, "update_deps without deps");
    }
    std::set<MilestoneId> new_deps = *op.deps;
    if (new_deps.empty()) {
        new_deps.insert(root_);
    }
    if (new_deps.count(op.target)) {
        return ApplyResult::reject(RejectReason::cycle_rejected,
                                   "node depends on itself: " + op.target);
    }
    for (const auto& dep : new_deps) {
        if (!nodes_.count(dep)) {
            return ApplyResult::reject(RejectReason::unknown_target, "unknown dep: " + dep);
        }
    }
    // The new edges run dep -> target. A cycle appears iff some new dep is
    // reachable from target along existing successor edges.
    if (reaches_any(op.target, new_deps)) {
        return ApplyResult::reject(RejectReason::cycle_rejected,
                                   "new deps would create a cycle through " + op.target);
    }
    it->second.milestone.deps = std::move(new_deps);
    return ApplyResult::ok();
}

ApplyResult StrategyMap::apply_prune(const EditOp& op) {
    if (op.target == root_) {
        return ApplyResult::reject(RejectReason::root_mutation, "cannot prune the root");
    }
    auto it = nodes_.find(op.target);
    if (it == nodes_.end()) {
        return ApplyResult::reject(RejectReason::unknown_target, "unknown node: " + op.target);
    }
    // Dependents inherit the pruned node's own deps (splice). Those deps are
    // strict ancestors, so the splice cannot introduce a cycle.
    const std::set<MilestoneId> spliced = it->second.milestone.deps;
    for (auto& [id, node] : nodes_) {
        auto& deps = node.milestone.deps;
        if (deps.erase(op.target) > 0) {
            deps.insert(spliced.begin(), spliced.end());
        }
    }
    nodes_.erase(it);
    return ApplyResult::ok();
}

bool StrategyMap::reaches_any(const MilestoneId& from,
                              const std::set<MilestoneId>& targets) const {
    std::vector<MilestoneId> stack{from};
    std::set<MilestoneId> seen{from};
    while (!stack.empty()) {
        const MilestoneId cur = stack.back();
        stack.pop_back();
        for (const auto& [id, node] : nodes_) {
            if (!node.milestone.deps.count(cur) || seen.count(id)) continue;
            if (targets.count(id)) {
                return true;
            }
            seen.insert(id);
            stack.push_back(id);
        }
    }
    return false;
}

std::vector<MilestoneId> StrategyMap::eligible(const AbstractState& state,
                                               DepsView view) const {
    for (const auto& id : state.achieved) {
        if (!nodes_.count(id)) {
            throw UnknownMilestone("achieved set references unknown milestone: " + id);
        }
    }
    std::vector<MilestoneId> out;
    for (const auto& [id, node] : nodes_) {
        if (id == root_) continue;
        if (state.achieved.count(id)) continue;
        if (state.failed_or_skipped.count(id)) continue;
        if (view == DepsView::dag) {
            const auto& deps = node.milestone.deps;
            const bool ready = std::all_of(deps.begin(), deps.end(), [&](const auto& d) {
                return state.achieved.count(d) > 0;
            });
            if (!ready) continue;
        }
        out.push_back(id);
    }
    return out;  // std::map iteration keeps this sorted
}

std::vector<MilestoneId> StrategyMap::topological_order() const {
    std::map<MilestoneId, std::size_t> in_degree;
    for (const auto& [id, node] : nodes_) {
        in_degree[id] = node.milestone.deps.size();
    }
    std::set<MilestoneId> frontier;  // ordered: smallest id pops first
    for (const auto& [id, deg] : in_degree) {
        if (deg == 0) frontier.insert(id);
    }
    std::vector<MilestoneId> order;
    order.reserve(nodes_.size());
    while (!frontier.empty()) {
        const MilestoneId id = *frontier.begin();
        frontier.erase(frontier.begin());
        order.push_back(id);
        for (const auto& succ : successors(id)) {
            if (--in_degree[succ] == 0) {
                frontier.insert(succ);
            }
        }
    }
    if (order.size() != nodes_.size()) {
        throw SchemaViolation("map contains a cycle");
    }
    return order;
}

void StrategyMap::set_guidance(const MilestoneId& id, std::string text) {
    milestone_mut(id).guidance = std::move(text);
}

void StrategyMap::validate() const {
    auto root_it = nodes_.find(root_);
    if (root_it == nodes_.end()) {
        throw SchemaViolation("root node missing: " + root_);
    }
    if (!root_it->second.milestone.deps.empty()) {
        throw SchemaViolation("root must have no dependencies");
    }
    for (const auto& [id, node] : nodes_) {
        if (id.empty()) {
            throw SchemaViolation("empty milestone id");
        }
        if (id != node.milestone.id) {
            throw SchemaViolation("node key does not match milestone id: " + id);
        }
        if (id != root_ && node.milestone.deps.empty()) {
            throw SchemaViolation("non-root node has no dependencies: " + id);
        }
        for (const auto& dep : node.milestone.deps) {
            if (dep == id) {
                throw SchemaViolation("self-edge on " + id);
            }
            if (!nodes_.count(dep)) {
                throw SchemaViolation("dangling dep " + dep + " on " + id);
            }
        }
        const auto& st = node.stats;
        if (st.n < 0 || st.m2 < -1e-12) {
            throw SchemaViolation("negative statistics on " + id);
        }
        if (st.attempt_notes.size() > kAttemptNoteCap) {
            throw SchemaViolation("attempt-note buffer overflow on " + id);
        }
    }
    // Acyclicity (throws) and, together with the non-empty-deps rule above,
    // reachability from the root.
    topological_order();
}

}  // namespace stratmap
