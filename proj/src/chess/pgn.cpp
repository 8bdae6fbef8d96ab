#include "sacscore/chess/pgn.hpp"

#include "sacscore/chess/notation.hpp"

#include <cctype>
#include <map>

namespace sacscore::chess {

std::string_view to_string(GameResult r)
{
    switch (r) {
    case GameResult::white_wins: return "1-0";
    case GameResult::black_wins: return "0-1";
    case GameResult::draw: return "1/2-1/2";
    case GameResult::unknown: break;
    }
    return "*";
}

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::none: return "none";
    case Termination::checkmate: return "checkmate";
    case Termination::stalemate: return "stalemate";
    case Termination::threefold_repetition: return "threefold_repetition";
    case Termination::fifty_move_rule: return "fifty_move_rule";
    case Termination::insufficient_material: return "insufficient_material";
    }
    return "none";
}

std::optional<std::string> GameRecord::tag(std::string_view key) const
{
    for (const auto& [k, v] : tags)
        if (k == key)
            return v;
    return std::nullopt;
}

Position GameRecord::start_position() const
{
    if (auto fen = tag("FEN"))
        return Position::from_fen(*fen, FenOptions{.lenient_castling = true});
    return Position{};
}

Position GameRecord::position_before(std::size_t ply) const
{
    Position p = start_position();
    for (std::size_t i = 0; i < ply && i < moves.size(); ++i)
        p = p.apply_unchecked(moves[i].move);
    return p;
}

std::vector<Position> GameRecord::positions() const
{
    std::vector<Position> out;
    out.reserve(moves.size() + 1);
    out.push_back(start_position());
    for (const auto& pm : moves)
        out.push_back(out.back().apply_unchecked(pm.move));
    return out;
}

Termination GameRecord::termination() const
{
    const auto all = positions();
    const Position& last = all.back();
    if (last.is_checkmate())
        return Termination::checkmate;
    if (last.is_stalemate())
        return Termination::stalemate;
    if (last.insufficient_material())
        return Termination::insufficient_material;
    std::map<std::string, int> seen;
    for (const auto& p : all) {
        if (++seen[p.repetition_key()] >= 3)
            return Termination::threefold_repetition;
    }
    if (last.halfmove_clock() >= 100)
        return Termination::fifty_move_rule;
    return Termination::none;
}

namespace {

bool is_result_token(std::string_view t)
{
    return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

GameResult result_from(std::string_view t)
{
    if (t == "1-0") return GameResult::white_wins;
    if (t == "0-1") return GameResult::black_wins;
    if (t == "1/2-1/2") return GameResult::draw;
    return GameResult::unknown;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<GameRecord> run()
    {
        while (true) {
            skip_space();
            if (at_end())
                break;
            const char c = text_[pos_];
            if (c == '[') {
                if (in_movetext_)
                    finish_game();
                read_tag();
            } else if (c == '{') {
                skip_comment();
            } else if (c == ';') {
                skip_line();
            } else if (c == '%' && (pos_ == 0 || text_[pos_ - 1] == '\n')) {
                skip_line();
            } else if (c == '(') {
                skip_variation();
            } else if (c == ')') {
                fail("unbalanced ')'");
            } else if (c == '$') {
                ++pos_;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                handle_token(read_token());
            }
        }
        if (in_movetext_ || !current_.tags.empty())
            finish_game();
        return std::move(games_);
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw PgnError(games_.size(), current_.moves.size(), what);
    }

    void skip_space()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    void skip_line()
    {
        while (!at_end() && text_[pos_] != '\n')
            ++pos_;
    }

    void skip_comment()
    {
        const auto close = text_.find('}', pos_);
        if (close == std::string_view::npos)
            fail("unterminated comment");
        pos_ = close + 1;
    }

    void skip_variation()
    {
        int depth = 0;
        while (!at_end()) {
            const char c = text_[pos_];
            if (c == '{') {
                skip_comment();
                continue;
            }
            if (c == ';') {
                skip_line();
                continue;
            }
            ++pos_;
            if (c == '(')
                ++depth;
            else if (c == ')' && --depth == 0)
                return;
        }
        fail("unterminated variation");
    }

    void read_tag()
    {
        ++pos_;  // '['
        skip_space();
        std::string key;
        while (!at_end() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '"' &&
               text_[pos_] != ']')
            key += text_[pos_++];
        skip_space();
        if (at_end() || text_[pos_] != '"' || key.empty())
            fail("malformed tag pair");
        ++pos_;
        std::string value;
        while (true) {
            if (at_end())
                fail("unterminated tag value");
            char c = text_[pos_++];
            if (c == '\\' && !at_end()) {
                value += text_[pos_++];
                continue;
            }
            if (c == '"')
                break;
            value += c;
        }
        skip_space();
        if (at_end() || text_[pos_] != ']')
            fail("tag pair missing ']'");
        ++pos_;
        current_.tags.emplace_back(std::move(key), std::move(value));
    }

    std::string read_token()
    {
        std::string tok;
        while (!at_end()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '(' || c == ')' || c == '[' ||
                c == ';' || c == '$')
                break;
            tok += c;
            ++pos_;
        }
        if (tok.empty())
            fail(std::string("unexpected character '") + text_[pos_] + "'");
        return tok;
    }

    void handle_token(std::string tok)
    {
        if (!in_movetext_) {
            in_movetext_ = true;
            try {
                position_ = current_.start_position();
            } catch (const FenError& e) {
                fail(e.what());
            }
        }
        if (is_result_token(tok)) {
            current_.result = result_from(tok);
            finish_game();
            return;
        }
        // Move numbers, possibly glued to the move ("12.Nf3", "12...Nf3").
        std::size_t i = 0;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i])))
            ++i;
        if (i > 0 && i < tok.size() && tok[i] == '.') {
            while (i < tok.size() && tok[i] == '.')
                ++i;
            tok = tok.substr(i);
        } else if (i == tok.size()) {
            return;  // bare move number without dots
        }
        if (tok.empty())
            return;
        try {
            const Move m = parse_san(position_, tok);
            current_.moves.push_back({m, tok});
            position_ = position_.apply_unchecked(m);
        } catch (const SanError& e) {
            fail(e.what());
        }
    }

    void finish_game()
    {
        if (current_.result == GameResult::unknown) {
            if (auto r = current_.tag("Result"))
                current_.result = result_from(*r);
        }
        if (!current_.tags.empty() || !current_.moves.empty())
            games_.push_back(std::move(current_));
        current_ = GameRecord{};
        in_movetext_ = false;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<GameRecord> games_;
    GameRecord current_;
    Position position_;
    bool in_movetext_ = false;
};

std::string escape(std::string_view v)
{
    std::string out;
    for (char c : v) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::vector<GameRecord> parse_pgn(std::string_view text) { return Parser(text).run(); }

std::string write_pgn(const GameRecord& game)
{
    std::string out;
    for (const auto& [k, v] : game.tags)
        out += "[" + k + " \"" + escape(v) + "\"]\n";
    out += '\n';
    Position p = game.start_position();
    std::string line;
    auto emit = [&](const std::string& word) {
        if (!line.empty() && line.size() + 1 + word.size() > 79) {
            out += line + '\n';
            line.clear();
        }
        if (!line.empty())
            line += ' ';
        line += word;
    };
    for (std::size_t i = 0; i < game.moves.size(); ++i) {
        const Move& m = game.moves[i].move;
        if (p.side_to_move() == Color::white)
            emit(std::to_string(p.fullmove_number()) + ".");
        else if (i == 0)
            emit(std::to_string(p.fullmove_number()) + "...");
        emit(to_san(p, m));
        p = p.apply_unchecked(m);
    }
    emit(std::string(to_string(game.result)));
    out += line + "\n\n";
    return out;
}

}  // namespace sacscore::chess
