#pragma once

// Stand-in game scores for the corpus rows. Each row gets a tiny constructed
// game in which Karpov's side gives up the row's piece class on the first
// move, so the whole pipeline can run without the real game scores. A fake
// engine script then scores those moves to match the published marks.

#include "sacscore/chess/notation.hpp"
#include "sacscore/corpus/corpus.hpp"
#include "sacscore/engine/uci.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sacscore::test {

// Layouts with white to move; the offered piece goes to d5 where exd5 wins it.
inline const char* queen_layout = "6k1/5ppp/4p3/8/8/8/5PPP/3Q2K1 w - - 0 1";
inline const char* rook_layout = "6k1/5ppp/4p3/8/8/8/5PPP/3R2K1 w - - 0 1";
inline const char* knight_layout = "6k1/5ppp/4p3/8/8/2N5/5PPP/6K1 w - - 0 1";

// One extra white pawn per row keeps every position distinct. None of these
// squares touches d5 or the back ranks.
inline constexpr std::array<const char*, 16> marker_squares = {"a2", "b2", "c2", "a3", "b3", "h4", "a4", "b4",
                                                               "a5", "b5", "c5", "a6", "b6", "c6", "h3", ""};

inline bool knight_row(const corpus::CorpusEntry& e)
{
    return e.bucket == sacrifice::Bucket::rook_or_knight && !e.annotations.empty() &&
           (e.annotations[0] == 'N' || e.annotations.rfind("Karpov's Immortal", 0) == 0);
}

inline bool declined_row(const corpus::CorpusEntry& e)
{
    return e.annotations.find("declined") != std::string::npos;
}

inline chess::Position synthetic_start(const corpus::CorpusEntry& e, std::size_t index_in_bucket)
{
    const char* layout = e.bucket == sacrifice::Bucket::queen ? queen_layout
                         : knight_row(e)                      ? knight_layout
                                                              : rook_layout;
    chess::Position p = chess::Position::from_fen(layout);
    if (const std::string sq = marker_squares.at(index_in_bucket); !sq.empty()) {
        std::array<chess::Piece, 64> board{};
        for (int i = 0; i < 64; ++i)
            board[static_cast<std::size_t>(i)] = p.piece_at(chess::Square(i));
        board[static_cast<std::size_t>(chess::Square::parse(sq)->index())] =
            chess::Piece(chess::Color::white, chess::PieceType::pawn);
        p = *chess::Position::from_placement(board, chess::Color::white);
    }
    return e.karpov_color() == chess::Color::white ? p : p.color_flipped();
}

inline std::string mirror_uci(const std::string& uci, bool flip)
{
    if (!flip)
        return uci;
    std::string out = uci;
    out[1] = static_cast<char>('1' + ('8' - uci[1]));
    out[3] = static_cast<char>('1' + ('8' - uci[3]));
    return out;
}

inline chess::GameRecord synthetic_game(const corpus::CorpusEntry& e, std::size_t index_in_bucket)
{
    const chess::Position start = synthetic_start(e, index_in_bucket);
    const bool flip = e.karpov_color() == chess::Color::black;
    const std::string offer = knight_row(e) ? "c3d5" : "d1d5";
    const std::string reply = declined_row(e) ? "g8h8" : "e6d5";

    chess::GameRecord g;
    g.tags = {{"Event", e.event_hint.empty() ? "Synthetic" : e.event_hint},
              // Not the linked game, so no link: matching goes by names and year.
              {"Site", "synthetic: " + e.label},
              {"Date", e.year ? std::to_string(*e.year) + ".??.??" : "????.??.??"},
              {"White", e.white},
              {"Black", e.black},
              {"Result", "*"},
              {"SetUp", "1"},
              {"FEN", start.fen()}};
    chess::Position p = start;
    for (const std::string& u : {offer, reply}) {
        const auto m = p.find_uci(mirror_uci(u, flip));
        if (!m)
            throw std::logic_error("synthetic move " + u + " illegal for " + e.label);
        g.moves.push_back({*m, chess::to_san(p, *m)});
        p = p.apply_unchecked(*m);
    }
    return g;
}

/// Corpus with a synthetic game attached to every row.
inline std::vector<corpus::CorpusEntry> synthetic_corpus(std::vector<corpus::CorpusEntry> entries)
{
    std::size_t queens = 0;
    std::size_t others = 0;
    for (auto& e : entries)
        e.game = synthetic_game(e, e.bucket == sacrifice::Bucket::queen ? queens++ : others++);
    return entries;
}

inline std::vector<corpus::CorpusEntry> synthetic_corpus() { return synthetic_corpus(corpus::load_corpus()); }

/// One PGN file per synthetic game, for the ingestion path.
inline std::filesystem::path write_synthetic_pgns(const std::vector<corpus::CorpusEntry>& entries,
                                                  const std::filesystem::path& dir)
{
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "game%02zu.pgn", i + 1);
        std::ofstream(dir / name) << chess::write_pgn(*entries[i].game);
    }
    return dir;
}

/// Fake-engine script giving each row's sacrifice the published verdict:
/// optimal rows make the played move best, suboptimal rows put another move
/// ahead by exactly the published loss. Scores are for the side to move.
inline nlohmann::json published_verdict_script(const std::vector<corpus::CorpusEntry>& entries)
{
    nlohmann::json positions = nlohmann::json::object();
    for (const auto& e : entries) {
        const chess::Position before = e.game->start_position();
        const std::string played = e.game->moves.front().move.uci();
        nlohmann::json scores = nlohmann::json::object();
        std::string best = played;
        if (e.published_verdict == corpus::PublishedVerdict::optimal) {
            scores[played] = 150;
        } else {
            const int loss = static_cast<int>(*e.published_cp_loss * 100 + 0.5);
            for (const auto& m : before.legal_moves())
                if (m.uci() != played) {
                    best = m.uci();
                    break;
                }
            scores[best] = 50;
            scores[played] = 50 - loss;
        }
        positions[engine::uci_fen(before)] = {{"best", best}, {"scores", scores}};
    }
    return {{"id", "FixtureEngine 1.0"}, {"depth", 20}, {"positions", positions}};
}

}  // namespace sacscore::test
