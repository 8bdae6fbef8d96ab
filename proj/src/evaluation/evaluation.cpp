#include "sacscore/evaluation/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sacscore::evaluation {

using chess::Color;
using engine::NormalizedScore;

double win_probability(double pawns) { return 1.0 / (1.0 + std::pow(10.0, -pawns / 4.0)); }

double centipawn_advantage(double w)
{
    if (!(w > 0.0 && w < 1.0))
        throw std::domain_error("win probability must lie strictly between 0 and 1");
    return 4.0 * std::log10(w / (1.0 - w));
}

double win_probability(const NormalizedScore& score, Color perspective)
{
    const NormalizedScore s = perspective == Color::white ? score : score.flipped();
    if (s.kind == engine::ScoreKind::mate)
        return s.value > 0 ? 1.0 : 0.0;
    return win_probability(s.value / 100.0);
}

double centipawn_loss(const NormalizedScore& best, const NormalizedScore& played, Color mover)
{
    const int sign = chess::sign_of(mover);
    const int diff = sign * best.centipawns() - sign * played.centipawns();
    return std::max(0, diff) / 100.0;
}

std::string_view to_string(Verdict v) { return v == Verdict::optimal ? "optimal" : "suboptimal"; }

std::string_view to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::published_only: return "published-only";
    case RowStatus::unavailable: return "unavailable";
    case RowStatus::no_event: return "no-event";
    case RowStatus::evaluated: return "evaluated";
    case RowStatus::engine_error: return "engine-error";
    }
    return "unavailable";
}

std::string Fraction::str() const { return std::to_string(num) + "/" + std::to_string(den); }

OptimalityVerdict evaluate_event(engine::EngineSession& session, const chess::Position& before,
                                 const sacrifice::SacrificeEvent& event, const AnalysisSettings& settings)
{
    const auto eval = session.evaluate_position(before, settings.limits);
    OptimalityVerdict v;
    v.event = event;
    v.best_move = eval.best().move;
    v.best_score = eval.best().score;
    v.played_score = v.best_move == event.move ? v.best_score : session.evaluate_move(before, event.move, settings.limits);
    v.cp_loss = centipawn_loss(v.best_score, v.played_score, event.mover);
    v.win_prob_drop = std::max(0.0, win_probability(v.best_score, event.mover) -
                                        win_probability(v.played_score, event.mover));
    v.epsilon_used = settings.epsilon;
    v.verdict = verdict(v.cp_loss, settings.epsilon);
    return v;
}

GameAnalysis analyze_game(engine::EngineSession& session, const chess::GameRecord& g, const AnalysisSettings& settings)
{
    GameAnalysis out;
    out.game_id = sacrifice::game_id(g);
    out.engine_id = session.engine_id();
    out.limits = settings.limits;
    const auto events = sacrifice::detect_sacrifices(g, settings.detector);
    if (events.empty())
        return out;
    const auto positions = g.positions();
    for (const auto& e : events) {
        try {
            out.verdicts.push_back(evaluate_event(session, positions[e.ply], e, settings));
        } catch (const engine::EngineError& err) {
            throw engine::EngineError(err.kind(),
                                      out.game_id + ", ply " + std::to_string(e.ply + 1) + ": " + err.what(),
                                      err.excerpt());
        }
    }
    return out;
}

std::optional<sacrifice::SacrificeEvent> row_event(const corpus::CorpusEntry& entry,
                                                   const sacrifice::DetectorConfig& cfg)
{
    if (!entry.game)
        return std::nullopt;
    const Color karpov = entry.karpov_color();
    for (const auto& e : sacrifice::detect_sacrifices(*entry.game, cfg))
        if (e.mover == karpov && sacrifice::classify_sacrifice(e) == entry.bucket)
            return e;
    return std::nullopt;
}

namespace {

ReportRow base_row(const corpus::CorpusEntry& e)
{
    ReportRow row;
    row.label = e.label;
    row.published = e.published_verdict;
    row.published_cp_loss = e.published_cp_loss;
    return row;
}

void summarize(Report& report, bool engine_run)
{
    report.published_optimal = {};
    for (const auto& row : report.rows) {
        ++report.published_optimal.den;
        report.published_optimal.num += row.published == corpus::PublishedVerdict::optimal;
    }
    if (!engine_run)
        return;
    Fraction computed;
    Fraction agreement;
    for (const auto& row : report.rows) {
        if (row.status == RowStatus::unavailable)
            continue;
        ++agreement.den;
        agreement.num += row.agrees.value_or(false);
        if (row.status == RowStatus::evaluated) {
            ++computed.den;
            computed.num += row.computed->verdict == Verdict::optimal;
        }
    }
    report.computed_optimal = computed;
    report.agreement = agreement;
}

}  // namespace

Reproduction reproduce_tables(const std::vector<corpus::CorpusEntry>& entries, const SessionFactory& factory,
                              const AnalysisSettings& settings, int jobs)
{
    std::vector<ReportRow> rows;
    std::vector<std::size_t> pending;
    std::vector<std::optional<sacrifice::SacrificeEvent>> events(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        ReportRow row = base_row(entries[i]);
        if (factory) {
            if (!entries[i].game) {
                row.status = RowStatus::unavailable;
                row.note = "no game score ingested";
            } else if (!(events[i] = row_event(entries[i], settings.detector))) {
                row.status = RowStatus::no_event;
                row.agrees = false;
                row.note = "no " + std::string(sacrifice::to_string(entries[i].bucket)) +
                           " sacrifice by Karpov detected";
            } else {
                pending.push_back(i);
            }
        }
        rows.push_back(std::move(row));
    }

    std::string engine_id;
    if (factory && !pending.empty()) {
        std::atomic<std::size_t> next{0};
        std::mutex mu;
        std::exception_ptr startup_failure;
        auto worker = [&] {
            std::optional<engine::EngineSession> session;
            try {
                session.emplace(factory());
            } catch (...) {
                std::lock_guard lock(mu);
                if (!startup_failure)
                    startup_failure = std::current_exception();
                return;
            }
            {
                std::lock_guard lock(mu);
                if (engine_id.empty())
                    engine_id = session->engine_id();
            }
            for (std::size_t k; (k = next.fetch_add(1)) < pending.size();) {
                const std::size_t i = pending[k];
                const auto& e = *events[i];
                ReportRow& row = rows[i];
                try {
                    auto v = evaluate_event(*session, entries[i].game->position_before(e.ply), e, settings);
                    row.status = RowStatus::evaluated;
                    row.agrees = (v.verdict == Verdict::optimal) ==
                                 (row.published == corpus::PublishedVerdict::optimal);
                    row.computed = std::move(v);
                } catch (const engine::EngineError& err) {
                    row.status = RowStatus::engine_error;
                    row.agrees = false;
                    row.note = err.what();
                    // The session may be unusable now; start a fresh one.
                    try {
                        session.emplace(factory());
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (!startup_failure)
                            startup_failure = std::current_exception();
                        return;
                    }
                }
            }
        };
        const int n = std::clamp<int>(jobs, 1, static_cast<int>(pending.size()));
        std::vector<std::thread> pool;
        for (int t = 1; t < n; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& t : pool)
            t.join();
        if (startup_failure && engine_id.empty())
            std::rethrow_exception(startup_failure);
        for (std::size_t i : pending)
            if (rows[i].status == RowStatus::published_only) {
                rows[i].status = RowStatus::engine_error;
                rows[i].agrees = false;
                rows[i].note = "engine could not be restarted";
            }
    }

    Reproduction out;
    out.queens.bucket = sacrifice::Bucket::queen;
    out.rooks_and_knights.bucket = sacrifice::Bucket::rook_or_knight;
    for (std::size_t i = 0; i < entries.size(); ++i)
        (entries[i].bucket == sacrifice::Bucket::queen ? out.queens : out.rooks_and_knights).rows.push_back(rows[i]);
    for (Report* r : {&out.queens, &out.rooks_and_knights}) {
        r->engine_id = engine_id;
        r->limits = settings.limits;
        summarize(*r, static_cast<bool>(factory));
    }
    out.combined_published = {out.queens.published_optimal.num + out.rooks_and_knights.published_optimal.num,
                              out.queens.published_optimal.den + out.rooks_and_knights.published_optimal.den};
    out.summary_claim_consistent = out.combined_published.value() > 0.9;
    return out;
}

}  // namespace sacscore::evaluation
