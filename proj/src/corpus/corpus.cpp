#include "sacscore/corpus/corpus.hpp"

#include "sacscore/chess/notation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sacscore::corpus {

std::string_view to_string(PublishedVerdict v) { return v == PublishedVerdict::optimal ? "optimal" : "suboptimal"; }

std::string_view to_string(MoveCheck c)
{
    switch (c) {
    case MoveCheck::legal: return "legal";
    case MoveCheck::illegal: return "illegal";
    case MoveCheck::unchecked: return "unchecked";
    }
    return "unchecked";
}

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle)
{
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

bool plays(const chess::GameRecord& g, const char* side, const std::string& surname)
{
    return contains_ci(g.tag(side).value_or(""), surname);
}

bool year_matches(const CorpusEntry& e, const chess::GameRecord& g)
{
    return !e.year || g.tag("Date").value_or("").rfind(std::to_string(*e.year), 0) == 0;
}

bool event_matches(const CorpusEntry& e, const chess::GameRecord& g)
{
    if (e.event_hint.empty())
        return true;
    const std::string first_word = e.event_hint.substr(0, e.event_hint.find_first_of(" ,"));
    return contains_ci(g.tag("Event").value_or(""), first_word) || contains_ci(g.tag("Site").value_or(""), first_word);
}

}  // namespace

chess::Color CorpusEntry::karpov_color() const
{
    if (game) {
        if (plays(*game, "White", "Karpov"))
            return chess::Color::white;
        if (plays(*game, "Black", "Karpov"))
            return chess::Color::black;
    }
    return white == "Karpov" ? chess::Color::white : chess::Color::black;
}

std::string CorpusEntry::lichess_id() const
{
    constexpr std::string_view prefix = "https://lichess.org/";
    if (source_url.rfind(prefix, 0) != 0)
        return {};
    return source_url.substr(prefix.size());
}

std::uint64_t corpus_checksum(const std::vector<CorpusEntry>& entries)
{
    std::ostringstream dump;
    for (const CorpusEntry& e : entries) {
        char loss[32] = "-";
        if (e.published_cp_loss)
            std::snprintf(loss, sizeof loss, "%.2f", *e.published_cp_loss);
        dump << e.label << '|' << sacrifice::to_string(e.bucket) << '|' << e.source_url << '|'
             << to_string(e.published_verdict) << '|' << loss << '|' << e.annotations << '|' << e.white << '|'
             << e.black << '|' << (e.year ? std::to_string(*e.year) : "-") << '|' << e.event_hint << '|'
             << (e.figure ? std::to_string(*e.figure) : "-") << '|' << e.fen_anchor.value_or("-") << '|';
        for (const auto& san : e.anchor_sequence)
            dump << san << ' ';
        dump << '\n';
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

IngestResult ingest_games(std::vector<CorpusEntry> entries, const std::filesystem::path& dir)
{
    IngestResult result;
    result.entries = std::move(entries);
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        result.warnings.push_back("PGN directory not found: " + dir.string());
        return result;
    }

    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(dir, ec))
        if (item.is_regular_file() && lower(item.path().extension().string()) == ".pgn")
            files.push_back(item.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        std::vector<chess::GameRecord> games;
        try {
            games = chess::parse_pgn(text.str());
        } catch (const std::exception& e) {
            result.warnings.push_back(file.filename().string() + ": skipped, " + e.what());
            continue;
        }

        for (const chess::GameRecord& g : games) {
            const std::string site = g.tag("Site").value_or("");
            bool by_id = false;
            for (CorpusEntry& e : result.entries) {
                const std::string id = e.lichess_id();
                if (e.game || id.empty() || site.find(id) == std::string::npos)
                    continue;
                by_id = true;
                e.game = g;
                ++result.matched;
                if (!plays(g, "White", e.white) || !plays(g, "Black", e.black) || !year_matches(e, g))
                    result.warnings.push_back(e.label + ": game matched by link but players/year differ (" +
                                              g.tag("White").value_or("?") + " - " + g.tag("Black").value_or("?") +
                                              ", " + g.tag("Date").value_or("?") + ")");
            }
            if (by_id)
                continue;

            std::vector<CorpusEntry*> candidates;
            for (CorpusEntry& e : result.entries)
                if (!e.game && plays(g, "White", e.white) && plays(g, "Black", e.black) && year_matches(e, g))
                    candidates.push_back(&e);
            if (candidates.empty())
                continue;
            // Dated entries whose event also matches beat dated ones, which
            // beat entries known only by names.
            auto rank = [&](const CorpusEntry* e) {
                return e->year ? (!e->event_hint.empty() && event_matches(*e, g) ? 0 : 1) : 2;
            };
            CorpusEntry& e = **std::min_element(candidates.begin(), candidates.end(),
                                                [&](const CorpusEntry* a, const CorpusEntry* b) {
                                                    return rank(a) < rank(b);
                                                });
            e.game = g;
            ++result.matched;
            if (!e.year)
                result.warnings.push_back(e.label + ": matched by player names only (" + file.filename().string() +
                                          ")");
        }
    }
    return result;
}

std::vector<AnchorRow> verify_anchors(const std::vector<CorpusEntry>& entries)
{
    std::vector<AnchorRow> rows;
    for (const CorpusEntry& e : entries) {
        if (!e.fen_anchor)
            continue;
        AnchorRow row;
        row.label = e.label;
        row.figure = e.figure.value_or(0);
        row.fen = *e.fen_anchor;
        for (const auto& san : e.anchor_sequence)
            row.moves.push_back({san, MoveCheck::unchecked, {}});

        std::optional<chess::Position> p;
        try {
            p = chess::Position::from_fen(row.fen, chess::FenOptions{.lenient_castling = true});
            row.fen_valid = true;
            row.castling_note = p->castling_inconsistent();
        } catch (const chess::FenError& err) {
            row.fen_error = err.what();
        }
        for (std::size_t i = 0; p && i < row.moves.size(); ++i) {
            try {
                const chess::Move m = chess::parse_san(*p, row.moves[i].san);
                row.moves[i].status = MoveCheck::legal;
                row.moves[i].detail = m.uci();
                p = p->apply_unchecked(m);
            } catch (const chess::SanError& err) {
                row.moves[i].status = MoveCheck::illegal;
                row.moves[i].detail = err.what();
                p.reset();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_anchor_report(const std::vector<AnchorRow>& rows)
{
    std::ostringstream out;
    for (const AnchorRow& row : rows) {
        out << "Figure " << row.figure << ": " << row.label << "\n  FEN " << row.fen << "\n";
        if (!row.fen_valid) {
            out << "  FEN invalid: " << row.fen_error << "\n";
            continue;
        }
        if (row.castling_note)
            out << "  note: castling field lists rights the placement cannot support\n";
        for (const AnchorMove& m : row.moves) {
            out << "  " << m.san << "  " << to_string(m.status);
            if (!m.detail.empty())
                out << " (" << m.detail << ")";
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace sacscore::corpus
