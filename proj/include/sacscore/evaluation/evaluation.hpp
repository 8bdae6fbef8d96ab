#pragma once

#include "sacscore/corpus/corpus.hpp"
#include "sacscore/engine/uci.hpp"
#include "sacscore/sacrifice/detector.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sacscore::evaluation {

/// Logistic map from an advantage in pawns to a win probability:
/// 1 / (1 + 10^(-c/4)).
double win_probability(double pawns);

/// Inverse of win_probability. Throws std::domain_error unless 0 < w < 1.
double centipawn_advantage(double w);

/// Win probability of `score` for `perspective`; mate scores give exactly
/// 1 or 0.
double win_probability(const engine::NormalizedScore& score, chess::Color perspective);

/// max(0, best - played) in pawns, seen from `mover`. Mates use the
/// +-(10000 - plies) centipawn scalar.
double centipawn_loss(const engine::NormalizedScore& best, const engine::NormalizedScore& played, chess::Color mover);

enum class Verdict { optimal, suboptimal };

std::string_view to_string(Verdict v);

inline Verdict verdict(double loss, double epsilon) { return loss <= epsilon ? Verdict::optimal : Verdict::suboptimal; }

inline constexpr double default_epsilon = 0.05;

struct OptimalityVerdict {
    sacrifice::SacrificeEvent event;
    chess::Move best_move;
    engine::NormalizedScore best_score;
    engine::NormalizedScore played_score;
    double cp_loss = 0;        // pawns
    double win_prob_drop = 0;  // mover's view, >= 0
    Verdict verdict = Verdict::optimal;
    double epsilon_used = default_epsilon;
};

struct AnalysisSettings {
    sacrifice::DetectorConfig detector;
    engine::SearchLimits limits{20, std::nullopt, 4};
    double epsilon = default_epsilon;
};

struct GameAnalysis {
    std::string game_id;
    std::vector<OptimalityVerdict> verdicts;
    std::string engine_id;
    engine::SearchLimits limits;
};

/// Scores one event: a MultiPV search before the move, then the played move
/// alone unless it already is the engine's first choice.
OptimalityVerdict evaluate_event(engine::EngineSession& session, const chess::Position& before,
                                 const sacrifice::SacrificeEvent& event, const AnalysisSettings& settings);

/// Detects sacrifices in `g` and scores each one. Engine errors are rethrown
/// with the game and ply prefixed.
GameAnalysis analyze_game(engine::EngineSession& session, const chess::GameRecord& g, const AnalysisSettings& settings);

struct Fraction {
    int num = 0;
    int den = 0;

    double value() const { return den ? static_cast<double>(num) / den : 0.0; }
    std::string str() const;  // "13/16"
    bool operator==(const Fraction&) const = default;
};

enum class RowStatus {
    published_only,  // no engine run
    unavailable,     // no game score ingested
    no_event,        // game present, no sacrifice of the expected kind found
    evaluated,
    engine_error,
};

std::string_view to_string(RowStatus s);

struct ReportRow {
    std::string label;
    corpus::PublishedVerdict published = corpus::PublishedVerdict::optimal;
    std::optional<double> published_cp_loss;
    RowStatus status = RowStatus::published_only;
    std::optional<OptimalityVerdict> computed;
    std::optional<bool> agrees;
    std::string note;
};

struct Report {
    sacrifice::Bucket bucket = sacrifice::Bucket::queen;
    std::vector<ReportRow> rows;
    Fraction published_optimal;
    std::optional<Fraction> computed_optimal;  // over evaluated rows
    std::optional<Fraction> agreement;         // over rows with a game
    std::string engine_id;
    engine::SearchLimits limits;
};

struct Reproduction {
    Report queens;
    Report rooks_and_knights;
    /// Published marks pooled over both tables, and whether they support
    /// the accompanying "over 90%" summary.
    Fraction combined_published;
    bool summary_claim_consistent = false;
};

/// The event a table row refers to: the first event of the row's bucket
/// played by Karpov.
std::optional<sacrifice::SacrificeEvent> row_event(const corpus::CorpusEntry& entry,
                                                   const sacrifice::DetectorConfig& cfg);

using SessionFactory = std::function<engine::EngineSession()>;

/// Builds both tables in corpus order. Without a factory the rows carry the
/// published verdicts only. With one, up to `jobs` sessions evaluate the
/// ingested games in parallel; output order never depends on timing.
Reproduction reproduce_tables(const std::vector<corpus::CorpusEntry>& entries, const SessionFactory& factory,
                              const AnalysisSettings& settings, int jobs = 1);

std::string render_text(const Reproduction& r);
std::string render_json(const Reproduction& r);
std::string render_text(const std::vector<GameAnalysis>& analyses);
std::string render_json(const std::vector<GameAnalysis>& analyses);

}  // namespace sacscore::evaluation
