#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "stratmap/lessons.hpp"
#include "stratmap/propagation.hpp"
#include "stratmap/summary.hpp"
#include "stratmap/trajectory.hpp"

namespace stratmap {

/// Per-run accounting of proposer/agent calls and token usage. Counters are
/// atomic so concurrent proposer calls may share one meter.
struct UsageMeter {
    std::atomic<long> summary_calls{0};
    std::atomic<long> refinement_calls{0};
    std::atomic<long> reward_calls{0};
    std::atomic<long> fork_calls{0};
    std::atomic<long> diagnosis_calls{0};
    std::atomic<long> lesson_calls{0};
    std::atomic<long> action_calls{0};
    std::atomic<long> http_requests{0};
    std::atomic<long> prompt_tokens{0};
    std::atomic<long> completion_tokens{0};

    std::map<std::string, long> snapshot() const;
};

class SummaryProposer {
public:
    virtual ~SummaryProposer() = default;
    virtual EpisodeSummary summarize(const Trajectory& trajectory, const StrategyMap& map) = 0;
};

class RefinementProposer {
public:
    virtual ~RefinementProposer() = default;
    virtual std::vector<EditOp> propose(const StrategyMap& map,
                                        std::span<const EpisodeSummary> summaries,
                                        std::span<const Trajectory> trajectories) = 0;
};

class RewardProposer {
public:
    virtual ~RewardProposer() = default;
    virtual AttributedRewards attribute(const Trajectory& trajectory,
                                        const EpisodeSummary& summary,
                                        const StrategyMap& map) = 0;
};

class ForkProposer {
public:
    virtual ~ForkProposer() = default;
    virtual std::vector<EditOp> propose(const StrategyMap& map,
                                        std::span<const EpisodeSummary> summaries,
                                        std::span<const Trajectory> trajectories) = 0;
};

class DiagnosisProposer {
public:
    virtual ~DiagnosisProposer() = default;
    virtual std::string diagnose(const Milestone& milestone, const MilestoneStats& stats,
                                 const StrategyMap& map) = 0;
};

class LessonProposer {
public:
    virtual ~LessonProposer() = default;
    virtual std::vector<Lesson> extract(std::span<const EpisodeSummary> summaries,
                                        std::span<const Lesson> existing) = 0;
};

/// The full proposer suite used by one run.
struct Proposers {
    std::shared_ptr<SummaryProposer> summary;
    std::shared_ptr<RefinementProposer> refinement;
    std::shared_ptr<RewardProposer> reward;
    std::shared_ptr<ForkProposer> fork;
    std::shared_ptr<DiagnosisProposer> diagnosis;
    std::shared_ptr<LessonProposer> lessons;
    std::shared_ptr<UsageMeter> usage = std::make_shared<UsageMeter>();
};

/// Deterministic ground-truth proposers (no network): generic rule-based
/// reward attribution, summaries, diagnosis and lessons, plus maze-aware
/// refinement and fork oracles when `maze` is true.
Proposers make_rule_proposers(bool maze);

/// Proposers that replay canned outputs; each call pops the next scripted
/// entry for its stage and throws ScriptExhausted when empty. The script is
/// a JSON document: {"refinement": [...], "fork": [...], "summary": [...],
/// "reward": [...], "diagnosis": [...], "lessons": [...]} where each list
/// element is that proposer's structured payload.
Proposers make_scripted_proposers(const std::string& script_json);

/// Proposers that always return empty results (baseline runs).
Proposers make_null_proposers();

}  // namespace stratmap
