#include "sacscore/sacrifice/detector.hpp"

#include "sacscore/chess/material.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace sacscore::sacrifice {

using chess::Color;
using chess::Move;
using chess::PieceType;
using chess::Position;

void DetectorConfig::validate() const
{
    if (horizon_plies < 2)
        throw std::invalid_argument("horizon must be at least 2 plies");
    if (swing_threshold <= 0 || queen_net_threshold <= 0)
        throw std::invalid_argument("thresholds must be positive");
}

std::string_view to_string(Bucket b)
{
    switch (b) {
    case Bucket::queen: return "queen";
    case Bucket::rook_or_knight: return "rook-or-knight";
    case Bucket::other: return "other";
    }
    return "other";
}

namespace {

std::vector<Move> forcing_moves(const Position& p)
{
    std::vector<Move> out;
    for (const Move& m : p.legal_moves())
        if (m.is_capture() || m.promotion != PieceType::none)
            out.push_back(m);
    // Most valuable victim first, cheapest attacker first.
    std::stable_sort(out.begin(), out.end(), [](const Move& a, const Move& b) {
        const int va = chess::piece_value(a.captured) + chess::piece_value(a.promotion);
        const int vb = chess::piece_value(b.captured) + chess::piece_value(b.promotion);
        if (va != vb)
            return va > vb;
        return chess::piece_value(a.moved) < chess::piece_value(b.moved);
    });
    return out;
}

struct Search {
    Color mover;
    int base;

    int stand(const Position& q) const { return chess::sign_of(mover) * chess::material_balance(q) - base; }

    // Fail-soft alpha-beta; captures replace the stand-pat value only when
    // strictly better, so ties resolve to stopping.
    int run(const Position& q, int plies, int alpha, int beta, std::vector<Move>& pv) const
    {
        pv.clear();
        int best = stand(q);
        if (plies == 0)
            return best;
        const bool maximizing = q.side_to_move() == mover;
        if (maximizing ? best >= beta : best <= alpha)
            return best;
        if (maximizing)
            alpha = std::max(alpha, best);
        else
            beta = std::min(beta, best);

        std::vector<Move> child_pv;
        for (const Move& c : forcing_moves(q)) {
            const int v = run(q.apply_unchecked(c), plies - 1, alpha, beta, child_pv);
            if (maximizing ? v > best : v < best) {
                best = v;
                pv.assign(1, c);
                pv.insert(pv.end(), child_pv.begin(), child_pv.end());
                if (maximizing)
                    alpha = std::max(alpha, v);
                else
                    beta = std::min(beta, v);
                if (alpha >= beta)
                    break;
            }
        }
        return best;
    }
};

}  // namespace

SwingLine material_swing_line(const Position& p, const Move& m, int horizon)
{
    const Search search{p.side_to_move(), chess::sign_of(p.side_to_move()) * chess::material_balance(p)};
    SwingLine out;
    std::vector<Move> rest;
    constexpr int inf = 1'000'000;
    out.swing = search.run(p.apply_unchecked(m), std::max(0, horizon - 1), -inf, inf, rest);
    out.line.push_back(m);
    out.line.insert(out.line.end(), rest.begin(), rest.end());
    return out;
}

PieceType sacrificed_class(const Position& p, const std::vector<Move>& line, bool exclude_even_trades)
{
    const Color mover = p.side_to_move();
    std::array<int, 7> net{};
    Position q = p;
    for (const Move& m : line) {
        if (m.is_capture()) {
            const auto t = static_cast<std::size_t>(m.captured);
            if (q.side_to_move() == mover) {
                if (exclude_even_trades)
                    --net[t];
            } else {
                ++net[t];
            }
        }
        q = q.apply_unchecked(m);
    }
    for (PieceType t : {PieceType::queen, PieceType::rook, PieceType::bishop, PieceType::knight, PieceType::pawn})
        if (net[static_cast<std::size_t>(t)] > 0)
            return t;
    return PieceType::pawn;
}

std::string game_id(const chess::GameRecord& g)
{
    if (const auto site = g.tag("Site"); site && !site->empty() && *site != "?")
        return *site;
    return g.tag("White").value_or("?") + "-" + g.tag("Black").value_or("?") + " " + g.tag("Date").value_or("?");
}

std::vector<SacrificeEvent> detect_sacrifices(const chess::GameRecord& g, const DetectorConfig& cfg)
{
    cfg.validate();
    const std::string id = game_id(g);
    const auto positions = g.positions();

    std::vector<SwingLine> swings;
    std::vector<bool> declined;
    for (std::size_t ply = 0; ply < g.moves.size(); ++ply) {
        swings.push_back(material_swing_line(positions[ply], g.moves[ply].move, cfg.horizon_plies));
        const auto& line = swings.back().line;
        bool d = false;
        if (line.size() >= 2 && line[1].is_capture() && ply + 1 < g.moves.size()) {
            const Move& reply = g.moves[ply + 1].move;
            d = !(reply.is_capture() && reply.to == line[1].to);
        }
        declined.push_back(d);
    }

    // The same piece left hanging after a declined offer is one sacrifice,
    // not a new one each move. Decided without thresholds so that raising
    // them never uncovers an event.
    auto continues_offer = [&](std::size_t ply) {
        if (ply < 2 || !declined[ply - 2])
            return false;
        const auto& before = swings[ply - 2].line;
        const auto& now = swings[ply].line;
        return now.size() >= 2 && now[1].is_capture() && now[1].to == before[1].to &&
               now[1].captured == before[1].captured;
    };

    std::vector<SacrificeEvent> events;
    for (std::size_t ply = 0; ply < g.moves.size(); ++ply) {
        const Position& p = positions[ply];
        const SwingLine& swing = swings[ply];
        if (swing.swing > -cfg.swing_threshold || continues_offer(ply))
            continue;
        const PieceType cls = sacrificed_class(p, swing.line, cfg.exclude_even_trades);
        if (cls == PieceType::queen && swing.swing > -cfg.queen_net_threshold)
            continue;

        SacrificeEvent e;
        e.game_id = id;
        e.ply = ply;
        e.mover = p.side_to_move();
        e.piece_class = cls;
        e.move = g.moves[ply].move;
        e.san = g.moves[ply].san;
        e.material_swing = swing.swing;
        e.immediate_see = chess::static_exchange_eval(p, e.move);
        e.declined = declined[ply];
        events.push_back(std::move(e));
    }
    return events;
}

Bucket classify_sacrifice(const SacrificeEvent& e)
{
    switch (e.piece_class) {
    case PieceType::queen: return Bucket::queen;
    case PieceType::rook:
    case PieceType::knight: return Bucket::rook_or_knight;
    default: return Bucket::other;
    }
}

}  // namespace sacscore::sacrifice
