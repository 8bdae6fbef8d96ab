#pragma once

#include "sacscore/chess/pgn.hpp"
#include "sacscore/sacrifice/detector.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sacscore::corpus {

enum class PublishedVerdict { optimal, suboptimal };

std::string_view to_string(PublishedVerdict v);

struct CorpusEntry {
    std::string label;  // link text as printed, e.g. "Karpov vs Ribli"
    sacrifice::Bucket bucket = sacrifice::Bucket::queen;
    std::string source_url;
    PublishedVerdict published_verdict = PublishedVerdict::optimal;
    std::optional<double> published_cp_loss;  // pawns, positive
    std::string annotations;
    std::string white;  // surnames used for matching PGN tags
    std::string black;
    std::optional<int> year;
    std::string event_hint;
    std::optional<int> figure;
    std::optional<std::string> fen_anchor;
    std::vector<std::string> anchor_sequence;  // SAN as printed, misprints included
    std::optional<chess::GameRecord> game;

    /// Colour Karpov plays in this entry.
    chess::Color karpov_color() const;
    /// lichess game id from the source link, empty for other sites.
    std::string lichess_id() const;
};

/// The 32 embedded entries: 16 queen sacrifices then 16 rook/knight ones,
/// in table order. Immutable; every call returns the same data.
const std::vector<CorpusEntry>& load_corpus();

/// FNV-1a over a canonical dump of the embedded data (everything except
/// ingested games). Guards against accidental edits.
std::uint64_t corpus_checksum(const std::vector<CorpusEntry>& entries);

struct IngestResult {
    std::vector<CorpusEntry> entries;
    std::vector<std::string> warnings;
    std::size_t matched = 0;
};

/// Reads every *.pgn under `dir` and attaches games to entries, first by the
/// lichess id in the Site tag, then by player surnames plus year. Bad files
/// and name/year mismatches become warnings.
IngestResult ingest_games(std::vector<CorpusEntry> entries, const std::filesystem::path& dir);

enum class MoveCheck { legal, illegal, unchecked };

std::string_view to_string(MoveCheck c);

struct AnchorMove {
    std::string san;
    MoveCheck status = MoveCheck::unchecked;
    std::string detail;
};

struct AnchorRow {
    std::string label;
    int figure = 0;
    std::string fen;
    bool fen_valid = false;
    std::string fen_error;
    bool castling_note = false;  // castling flags the placement cannot support
    std::vector<AnchorMove> moves;
};

/// One row per entry with a FEN anchor. Never throws for bad data.
std::vector<AnchorRow> verify_anchors(const std::vector<CorpusEntry>& entries);

std::string render_anchor_report(const std::vector<AnchorRow>& rows);

}  // namespace sacscore::corpus
