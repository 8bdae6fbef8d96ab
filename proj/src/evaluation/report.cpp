#include "sacscore/evaluation/evaluation.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sacscore::evaluation {

namespace {

using Json = nlohmann::ordered_json;

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// Six decimals keeps the structured output stable across libm versions.
double rounded(double v) { return std::round(v * 1e6) / 1e6; }

std::string mark(bool optimal, std::optional<double> loss, int decimals)
{
    if (optimal)
        return "OK";
    return "X -" + (loss ? fixed(*loss, decimals) : std::string("?"));
}

std::string pad(std::string s, std::size_t width)
{
    if (s.size() < width)
        s.append(width - s.size(), ' ');
    return s + ' ';
}

std::string limits_text(const engine::SearchLimits& l)
{
    std::string out;
    if (l.depth)
        out += "depth " + std::to_string(*l.depth);
    if (l.movetime_ms)
        out += std::string(out.empty() ? "" : ", ") + "movetime " + std::to_string(*l.movetime_ms) + " ms";
    return out + ", multipv " + std::to_string(l.multipv);
}

Json limits_json(const engine::SearchLimits& l)
{
    Json j;
    j["depth"] = l.depth ? Json(*l.depth) : Json(nullptr);
    j["movetime_ms"] = l.movetime_ms ? Json(*l.movetime_ms) : Json(nullptr);
    j["multipv"] = l.multipv;
    return j;
}

Json fraction_json(const std::optional<Fraction>& f)
{
    if (!f)
        return nullptr;
    return Json{{"num", f->num}, {"den", f->den}};
}

std::string fraction_text(const Fraction& f)
{
    return f.str() + (f.den ? " (" + fixed(f.value(), 4) + ")" : "");
}

Json verdict_json(const OptimalityVerdict& v, const std::string& engine_id, const engine::SearchLimits& limits)
{
    Json j;
    j["game_id"] = v.event.game_id;
    j["ply"] = v.event.ply;
    j["mover"] = std::string(chess::to_string(v.event.mover));
    j["piece_class"] = std::string(chess::piece_name(v.event.piece_class));
    j["move"] = v.event.move.uci();
    j["san"] = v.event.san;
    j["material_swing"] = v.event.material_swing;
    j["immediate_see"] = v.event.immediate_see;
    j["declined"] = v.event.declined;
    j["best_move"] = v.best_move.uci();
    j["best_score"] = v.best_score.str();
    j["played_score"] = v.played_score.str();
    j["cp_loss"] = rounded(v.cp_loss);
    j["win_prob_drop"] = rounded(v.win_prob_drop);
    j["verdict"] = std::string(to_string(v.verdict));
    j["epsilon"] = v.epsilon_used;
    j["engine_id"] = engine_id;
    j["depth"] = limits.depth ? Json(*limits.depth) : Json(nullptr);
    return j;
}

std::string bucket_title(sacrifice::Bucket b)
{
    return b == sacrifice::Bucket::queen ? "Queen sacrifices" : "Rook and knight sacrifices";
}

}  // namespace

std::string render_text(const Reproduction& r)
{
    std::ostringstream out;
    for (const Report* rep : {&r.queens, &r.rooks_and_knights}) {
        const bool engine_run = rep->agreement.has_value();
        out << bucket_title(rep->bucket) << "\n";
        if (engine_run)
            out << "engine: " << (rep->engine_id.empty() ? "(not started)" : rep->engine_id) << ", "
                << limits_text(rep->limits) << "\n";
        else
            out << "engine: none (published marks only)\n";
        out << pad("Game", 34) << pad("Published", 10);
        if (engine_run)
            out << pad("Computed", 10) << pad("Agree", 6) << "Status";
        out << "\n";
        for (const ReportRow& row : rep->rows) {
            std::string line = pad(row.label, 34) +
                               pad(mark(row.published == corpus::PublishedVerdict::optimal, row.published_cp_loss, 1), 10);
            if (engine_run) {
                const std::string computed =
                    row.computed ? mark(row.computed->verdict == Verdict::optimal, row.computed->cp_loss, 2) : "-";
                line += pad(computed, 10) + pad(row.agrees ? (*row.agrees ? "yes" : "no") : "-", 6) +
                        std::string(to_string(row.status));
                if (!row.note.empty())
                    line += " (" + row.note + ")";
            }
            while (!line.empty() && line.back() == ' ')
                line.pop_back();
            out << line << "\n";
        }
        out << "published optimal: " << fraction_text(rep->published_optimal) << "\n";
        if (engine_run) {
            out << "computed optimal: " << fraction_text(*rep->computed_optimal) << "\n";
            out << "agreement with published marks: " << fraction_text(*rep->agreement) << "\n";
        }
        out << "\n";
    }
    out << "combined published optimal: " << fraction_text(r.combined_published) << "\n";
    if (!r.summary_claim_consistent)
        out << "note: the accompanying text claims over 90% optimal; the recorded marks give "
            << fixed(100.0 * r.combined_published.value(), 1) << "%\n";
    return out.str();
}

std::string render_json(const Reproduction& r)
{
    Json tables = Json::array();
    for (const Report* rep : {&r.queens, &r.rooks_and_knights}) {
        Json t;
        t["bucket"] = std::string(sacrifice::to_string(rep->bucket));
        t["engine_id"] = rep->engine_id;
        t["limits"] = limits_json(rep->limits);
        t["published_optimal"] = fraction_json(rep->published_optimal);
        t["computed_optimal"] = fraction_json(rep->computed_optimal);
        t["agreement"] = fraction_json(rep->agreement);
        Json rows = Json::array();
        for (const ReportRow& row : rep->rows) {
            Json j;
            j["label"] = row.label;
            j["published_verdict"] = std::string(corpus::to_string(row.published));
            j["published_cp_loss"] = row.published_cp_loss ? Json(*row.published_cp_loss) : Json(nullptr);
            j["status"] = std::string(to_string(row.status));
            j["agrees"] = row.agrees ? Json(*row.agrees) : Json(nullptr);
            j["note"] = row.note;
            j["computed"] = row.computed ? verdict_json(*row.computed, rep->engine_id, rep->limits) : Json(nullptr);
            rows.push_back(std::move(j));
        }
        t["rows"] = std::move(rows);
        tables.push_back(std::move(t));
    }
    Json root;
    root["tables"] = std::move(tables);
    root["combined_published_optimal"] = fraction_json(r.combined_published);
    root["summary_claim_consistent"] = r.summary_claim_consistent;
    return root.dump(2) + "\n";
}

std::string render_text(const std::vector<GameAnalysis>& analyses)
{
    std::ostringstream out;
    for (const GameAnalysis& a : analyses) {
        out << a.game_id << "  (engine: " << a.engine_id << ", " << limits_text(a.limits) << ")\n";
        if (a.verdicts.empty()) {
            out << "  no sacrifices detected\n";
            continue;
        }
        for (const OptimalityVerdict& v : a.verdicts) {
            const auto& e = v.event;
            out << "  ply " << e.ply + 1 << "  " << chess::to_string(e.mover) << "  " << pad(e.san, 8)
                << pad(std::string(chess::piece_name(e.piece_class)), 7) << "swing " << e.material_swing
                << (e.declined ? " (declined)" : "") << "  best " << v.best_move.uci() << " " << v.best_score.str()
                << "  played " << v.played_score.str() << "  "
                << mark(v.verdict == Verdict::optimal, v.cp_loss, 2) << "\n";
        }
    }
    return out.str();
}

std::string render_json(const std::vector<GameAnalysis>& analyses)
{
    Json games = Json::array();
    for (const GameAnalysis& a : analyses) {
        Json g;
        g["game_id"] = a.game_id;
        g["engine_id"] = a.engine_id;
        g["limits"] = limits_json(a.limits);
        Json verdicts = Json::array();
        for (const auto& v : a.verdicts)
            verdicts.push_back(verdict_json(v, a.engine_id, a.limits));
        g["verdicts"] = std::move(verdicts);
        games.push_back(std::move(g));
    }
    return Json{{"games", std::move(games)}}.dump(2) + "\n";
}

}  // namespace sacscore::evaluation
