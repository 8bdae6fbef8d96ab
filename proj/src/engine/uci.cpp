#include "sacscore/engine/uci.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <system_error>

namespace sacscore::engine {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string t; in >> t;)
        out.push_back(t);
    return out;
}

int to_int(const std::string& s)
{
    long long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw std::invalid_argument("bad number '" + s + "'");
    return static_cast<int>(std::clamp<long long>(v, INT32_MIN, INT32_MAX));
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

void EngineConfig::validate() const
{
    if (!depth_limit && !time_limit_ms)
        throw std::invalid_argument("engine config needs a depth or time limit");
    if (multipv < 1)
        throw std::invalid_argument("multipv must be >= 1");
    if (depth_limit && *depth_limit < 1)
        throw std::invalid_argument("depth limit must be >= 1");
    if (time_limit_ms && *time_limit_ms < 1)
        throw std::invalid_argument("time limit must be >= 1 ms");
}

std::string uci_fen(const chess::Position& p)
{
    std::string fen = p.fen();
    if (!p.castling_inconsistent())
        return fen;
    using chess::Color;
    using chess::PieceType;
    auto home = [&](const char* sq, Color c, PieceType t) { return p.piece_at(*chess::Square::parse(sq)).is(c, t); };
    std::string rights;
    if (home("e1", Color::white, PieceType::king)) {
        if (home("h1", Color::white, PieceType::rook))
            rights += 'K';
        if (home("a1", Color::white, PieceType::rook))
            rights += 'Q';
    }
    if (home("e8", Color::black, PieceType::king)) {
        if (home("h8", Color::black, PieceType::rook))
            rights += 'k';
        if (home("a8", Color::black, PieceType::rook))
            rights += 'q';
    }
    auto fields = split(fen);
    std::string kept;
    for (char c : rights)
        if (fields[2].find(c) != std::string::npos)
            kept += c;
    fields[2] = kept.empty() ? "-" : kept;
    std::string out;
    for (const auto& f : fields)
        out += (out.empty() ? "" : " ") + f;
    return out;
}

std::optional<InfoLine> parse_info_line(std::string_view line)
{
    const auto tok = split(line);
    if (tok.empty() || tok[0] != "info")
        return std::nullopt;
    if (tok.size() > 1 && tok[1] == "string")
        return std::nullopt;

    InfoLine info;
    auto need = [&](std::size_t i, std::size_t n) {
        if (i + n >= tok.size())
            throw std::invalid_argument("truncated info line");
    };
    for (std::size_t i = 1; i < tok.size(); ++i) {
        const std::string& key = tok[i];
        if (key == "depth") {
            need(i, 1);
            info.depth = to_int(tok.at(++i));
        } else if (key == "multipv") {
            need(i, 1);
            info.multipv = to_int(tok.at(++i));
            if (info.multipv < 1)
                throw std::invalid_argument("multipv < 1");
        } else if (key == "seldepth" || key == "nodes" || key == "nps" || key == "time" || key == "hashfull" ||
                   key == "tbhits" || key == "cpuload" || key == "currmovenumber" || key == "sbhits") {
            need(i, 1);
            to_int(tok.at(++i));
        } else if (key == "currmove") {
            need(i, 1);
            ++i;
        } else if (key == "wdl") {
            need(i, 3);
            i += 3;
        } else if (key == "score") {
            need(i, 2);
            const std::string& kind = tok.at(i + 1);
            if (kind != "cp" && kind != "mate")
                throw std::invalid_argument("unknown score kind '" + kind + "'");
            to_int(tok.at(i + 2));
            info.score = kind + " " + tok.at(i + 2);
            i += 2;
            if (i + 1 < tok.size() && (tok[i + 1] == "lowerbound" || tok[i + 1] == "upperbound")) {
                info.bound = true;
                ++i;
            }
        } else if (key == "pv") {
            info.pv.assign(tok.begin() + static_cast<long>(i) + 1, tok.end());
            break;
        } else if (key == "refutation" || key == "currline") {
            break;
        }
    }
    return info;
}

EngineSession::EngineSession(EngineConfig cfg) : cfg_(std::move(cfg)) {}
EngineSession::EngineSession(EngineSession&&) noexcept = default;
EngineSession& EngineSession::operator=(EngineSession&&) noexcept = default;

EngineSession::~EngineSession()
{
    if (process_) {
        process_->write_line("quit");
        process_->terminate(std::chrono::milliseconds(500));
    }
}

void EngineSession::quit()
{
    if (process_) {
        send("quit");
        process_->terminate(std::chrono::milliseconds(1000));
        process_.reset();
    }
}

std::string EngineSession::excerpt() const
{
    std::string out;
    const std::size_t first = transcript_.size() > 12 ? transcript_.size() - 12 : 0;
    for (std::size_t i = first; i < transcript_.size(); ++i)
        out += (transcript_[i].sent ? "> " : "< ") + transcript_[i].text + "\n";
    return out;
}

void EngineSession::fail(EngineError::Kind kind, const std::string& what) const
{
    throw EngineError(kind, what, excerpt());
}

void EngineSession::send(const std::string& line)
{
    if (!process_)
        fail(EngineError::Kind::broken_pipe, "engine session is closed");
    transcript_.push_back({true, line});
    if (!process_->write_line(line))
        fail(EngineError::Kind::broken_pipe, "engine closed its input while sending '" + line + "'");
}

std::string EngineSession::receive(Clock::time_point deadline, const char* waiting_for)
{
    std::string line;
    switch (process_->read_line(line, deadline)) {
    case ChildProcess::ReadStatus::line:
        transcript_.push_back({false, line});
        return line;
    case ChildProcess::ReadStatus::eof:
        fail(EngineError::Kind::broken_pipe, std::string("engine exited while waiting for ") + waiting_for);
    case ChildProcess::ReadStatus::timeout:
        break;
    }
    fail(EngineError::Kind::timeout, std::string("timed out waiting for ") + waiting_for);
}

void EngineSession::sync(std::chrono::milliseconds timeout)
{
    send("isready");
    const auto deadline = Clock::now() + timeout;
    while (receive(deadline, "readyok") != "readyok") {
    }
}

void EngineSession::set_multipv(int k)
{
    if (k != current_multipv_) {
        send("setoption name MultiPV value " + std::to_string(k));
        current_multipv_ = k;
    }
}

EngineSession EngineSession::start(const EngineConfig& cfg)
{
    cfg.validate();
    std::error_code ec;
    if (!std::filesystem::is_regular_file(cfg.executable_path, ec))
        throw EngineError(EngineError::Kind::spawn, "engine executable not found: " + cfg.executable_path.string());

    EngineSession session(cfg);
    try {
        session.process_ = std::make_unique<ChildProcess>(cfg.executable_path, cfg.arguments);
    } catch (const std::system_error& e) {
        throw EngineError(EngineError::Kind::spawn, e.what());
    }

    session.send("uci");
    const auto deadline = Clock::now() + cfg.handshake_timeout;
    int chatter = 0;
    while (true) {
        std::string line;
        const auto status = session.process_->read_line(line, deadline);
        if (status == ChildProcess::ReadStatus::timeout)
            session.fail(EngineError::Kind::timeout, "no uciok within handshake timeout");
        if (status == ChildProcess::ReadStatus::eof)
            session.fail(EngineError::Kind::protocol, "process exited during UCI handshake; not a UCI engine?");
        session.transcript_.push_back({false, line});
        if (line == "uciok")
            break;
        if (starts_with(line, "id name ")) {
            session.engine_id_ = line.substr(8);
        } else if (line.empty() || starts_with(line, "id ") || starts_with(line, "option ") ||
                   starts_with(line, "info ")) {
            // expected handshake traffic
        } else if (++chatter > 8) {
            session.fail(EngineError::Kind::protocol, "unexpected output during UCI handshake");
        }
    }
    if (session.engine_id_.empty())
        session.engine_id_ = cfg.executable_path.filename().string();

    session.send("setoption name Threads value " + std::to_string(cfg.threads));
    session.send("setoption name Hash value " + std::to_string(cfg.hash_mb));
    for (const auto& [k, v] : cfg.options)
        session.send("setoption name " + k + " value " + v);
    session.current_multipv_ = 0;
    session.set_multipv(cfg.multipv);
    session.sync(cfg.handshake_timeout);
    return session;
}

EngineEvaluation EngineSession::search(const chess::Position& p, const SearchLimits& limits, const chess::Move* only)
{
    if (!limits.depth && !limits.movetime_ms)
        throw std::invalid_argument("search needs a depth or time limit");

    if (cfg_.clear_hash_each_search)
        send("ucinewgame");
    set_multipv(only ? 1 : std::max(1, limits.multipv));
    sync(cfg_.handshake_timeout);

    send("position fen " + uci_fen(p));
    std::string go = "go";
    if (limits.depth)
        go += " depth " + std::to_string(*limits.depth);
    if (limits.movetime_ms)
        go += " movetime " + std::to_string(*limits.movetime_ms);
    if (only)
        go += " searchmoves " + only->uci();
    send(go);

    auto timeout = cfg_.search_timeout;
    if (timeout.count() == 0)
        timeout = limits.movetime_ms ? std::chrono::milliseconds(*limits.movetime_ms + 30'000)
                                     : std::chrono::milliseconds(30 * 60'000);
    const auto deadline = Clock::now() + timeout;

    struct Latest {
        int depth = 0;
        std::string score;
        std::vector<std::string> pv;
    };
    std::map<int, Latest> latest;
    std::string bestmove;
    while (true) {
        const std::string line = receive(deadline, "bestmove");
        if (starts_with(line, "bestmove")) {
            const auto tok = split(line);
            if (tok.size() < 2)
                fail(EngineError::Kind::protocol, "bestmove without a move");
            bestmove = tok[1];
            break;
        }
        std::optional<InfoLine> info;
        try {
            info = parse_info_line(line);
        } catch (const std::invalid_argument& e) {
            fail(EngineError::Kind::protocol, "unparseable info line '" + line + "': " + e.what());
        }
        if (!info || !info->score || info->bound || info->pv.empty())
            continue;
        const int depth = info->depth.value_or(0);
        Latest& slot = latest[info->multipv];
        if (depth >= slot.depth)
            slot = {depth, *info->score, info->pv};
    }

    EngineEvaluation eval;
    eval.position = p;
    eval.engine_id = engine_id_;
    for (const auto& [rank, entry] : latest) {
        EngineLine el;
        el.rank = rank;
        el.depth = entry.depth;
        try {
            el.score = normalize_score(entry.score, p.side_to_move());
        } catch (const std::invalid_argument& e) {
            fail(EngineError::Kind::protocol, e.what());
        }
        chess::Position cursor = p;
        for (const std::string& u : entry.pv) {
            const auto m = cursor.find_uci(u);
            if (!m)
                fail(EngineError::Kind::protocol, "illegal pv move '" + u + "' in " + cursor.fen());
            el.principal_variation.push_back(*m);
            cursor = cursor.apply_unchecked(*m);
        }
        el.move = el.principal_variation.front();
        eval.lines.push_back(std::move(el));
    }
    const bool known = std::any_of(eval.lines.begin(), eval.lines.end(),
                                   [&](const EngineLine& l) { return l.move.uci() == bestmove; });
    if (!known)
        fail(EngineError::Kind::protocol, "bestmove " + bestmove + " is not among the reported lines");
    eval.depth_reached = eval.lines.front().depth;
    return eval;
}

EngineEvaluation EngineSession::evaluate_position(const chess::Position& p, const SearchLimits& limits)
{
    return search(p, limits, nullptr);
}

NormalizedScore EngineSession::evaluate_move(const chess::Position& p, const chess::Move& m,
                                             const SearchLimits& limits)
{
    const EngineEvaluation eval = search(p, limits, &m);
    for (const EngineLine& line : eval.lines)
        if (line.move == m)
            return line.score;
    fail(EngineError::Kind::protocol, "engine did not report a score for searchmoves " + m.uci());
}

}  // namespace sacscore::engine
