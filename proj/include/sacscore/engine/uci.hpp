#pragma once

#include "sacscore/chess/position.hpp"
#include "sacscore/engine/process.hpp"
#include "sacscore/engine/score.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sacscore::engine {

class EngineError : public std::runtime_error {
public:
    enum class Kind { spawn, timeout, protocol, broken_pipe };

    EngineError(Kind kind, const std::string& what, std::string transcript_excerpt = {})
        : std::runtime_error(what), kind_(kind), excerpt_(std::move(transcript_excerpt)) {}

    Kind kind() const { return kind_; }
    /// Last lines exchanged with the engine, one per line, prefixed "> " for
    /// sent and "< " for received.
    const std::string& excerpt() const { return excerpt_; }

private:
    Kind kind_;
    std::string excerpt_;
};

struct SearchLimits {
    std::optional<int> depth;
    std::optional<int> movetime_ms;
    int multipv = 1;
};

struct EngineConfig {
    std::filesystem::path executable_path;
    std::vector<std::string> arguments;
    std::optional<int> depth_limit = 20;
    std::optional<int> time_limit_ms;
    int multipv = 4;
    int threads = 1;
    int hash_mb = 256;
    std::map<std::string, std::string> options;
    std::chrono::milliseconds handshake_timeout{10'000};
    /// Upper bound for one search; zero derives it from the limits.
    std::chrono::milliseconds search_timeout{0};
    /// Send ucinewgame before every search so results do not depend on
    /// earlier searches.
    bool clear_hash_each_search = true;

    SearchLimits limits() const { return {depth_limit, time_limit_ms, multipv}; }
    /// Throws std::invalid_argument when no depth/time limit is set or
    /// multipv < 1.
    void validate() const;
};

struct EngineLine {
    int rank = 1;
    chess::Move move;
    NormalizedScore score;
    std::vector<chess::Move> principal_variation;
    int depth = 0;
};

struct EngineEvaluation {
    chess::Position position;
    std::vector<EngineLine> lines;  // sorted by rank, rank 1 first
    int depth_reached = 0;
    std::string engine_id;

    const EngineLine& best() const { return lines.front(); }
};

/// Parsed "info" line; absent fields stay empty.
struct InfoLine {
    std::optional<int> depth;
    int multipv = 1;
    std::optional<std::string> score;  // "cp 35" / "mate -3"
    bool bound = false;                // lowerbound/upperbound score
    std::vector<std::string> pv;
};

/// FEN sent to the engine. Castling rights the placement cannot support
/// (tolerated from lenient FEN input) are dropped.
std::string uci_fen(const chess::Position& p);

/// Parses a UCI "info ..." line. Returns nullopt for other lines and for
/// "info string". Throws std::invalid_argument on malformed numeric fields.
std::optional<InfoLine> parse_info_line(std::string_view line);

struct TranscriptLine {
    bool sent;
    std::string text;
};

/// One engine process. Commands are strictly serialized; a session may be
/// moved between threads but must not be used from two at once.
class EngineSession {
public:
    static EngineSession start(const EngineConfig& cfg);

    EngineSession(EngineSession&&) noexcept;
    EngineSession& operator=(EngineSession&&) noexcept;
    ~EngineSession();

    const std::string& engine_id() const { return engine_id_; }
    const EngineConfig& config() const { return cfg_; }
    const std::vector<TranscriptLine>& transcript() const { return transcript_; }

    /// MultiPV search from `p`. Scores are normalized to white's view.
    EngineEvaluation evaluate_position(const chess::Position& p, const SearchLimits& limits);
    /// Score of move `m` alone (`go ... searchmoves m`), white's view.
    NormalizedScore evaluate_move(const chess::Position& p, const chess::Move& m, const SearchLimits& limits);

    void quit();

private:
    explicit EngineSession(EngineConfig cfg);

    void send(const std::string& line);
    std::string receive(std::chrono::steady_clock::time_point deadline, const char* waiting_for);
    void sync(std::chrono::milliseconds timeout);
    void set_multipv(int k);
    EngineEvaluation search(const chess::Position& p, const SearchLimits& limits, const chess::Move* only);
    std::string excerpt() const;
    [[noreturn]] void fail(EngineError::Kind kind, const std::string& what) const;

    EngineConfig cfg_;
    std::unique_ptr<ChildProcess> process_;
    std::string engine_id_;
    std::vector<TranscriptLine> transcript_;
    int current_multipv_ = 1;
};

}  // namespace sacscore::engine
