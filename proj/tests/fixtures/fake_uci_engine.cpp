// Scripted UCI engine used by the tests. It speaks enough of the protocol
// for the client and answers from a JSON script instead of searching.
//
//   fake_uci_engine [--script file.json] [--mode normal|exit-after-handshake|chatter]
//
// Script layout:
//   { "id": "...", "depth": 20, "default_cp": 0,
//     "positions": { "<fen>": { "best": "e2e4", "scores": { "e2e4": 35, "d7d5": "mate 2" } } } }
// Scores are from the side to move, like a real engine reports them.
// SACSCORE_FAKE_SCRIPT is used when --script is absent.

#include "sacscore/chess/position.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using sacscore::chess::Position;

namespace {

struct Scored {
    std::string uci;
    std::string token;  // "cp 35" / "mate 2"
    long rank_key;      // larger is better for the side to move
};

long rank_key(const std::string& token)
{
    std::istringstream in(token);
    std::string kind;
    long v = 0;
    in >> kind >> v;
    if (kind == "mate")
        return v > 0 ? 1'000'000 - v : -1'000'000 - v;
    return v;
}

std::string token_of(const json& v)
{
    if (v.is_number_integer())
        return "cp " + std::to_string(v.get<long>());
    return v.get<std::string>();
}

}  // namespace

int main(int argc, char** argv)
{
    std::string script_path;
    std::string mode = "normal";
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--script")
            script_path = argv[i + 1];
        else if (flag == "--mode")
            mode = argv[i + 1];
    }
    if (script_path.empty())
        if (const char* env = std::getenv("SACSCORE_FAKE_SCRIPT"))
            script_path = env;

    json script = json::object();
    if (!script_path.empty()) {
        std::ifstream in(script_path);
        if (!in) {
            std::cerr << "cannot open script " << script_path << "\n";
            return 2;
        }
        script = json::parse(in);
    }
    const std::string id = script.value("id", std::string("FakeEngine 1.0"));
    const int depth = script.value("depth", 20);
    const long default_cp = script.value("default_cp", 0L);
    const json positions = script.value("positions", json::object());

    if (mode == "chatter") {
        // Reads nothing useful and prints something that is not UCI.
        for (int i = 0; i < 20; ++i)
            std::cout << "Hello! This program does not speak UCI. Line " << i << std::endl;
        return 0;
    }

    Position pos;
    int multipv = 1;
    std::string line;
    while (std::getline(std::cin, line)) {
        std::istringstream in(line);
        std::string cmd;
        in >> cmd;
        if (cmd == "uci") {
            std::cout << "id name " << id << "\n"
                      << "id author test fixture\n"
                      << "option name Hash type spin default 16 min 1 max 1024\n"
                      << "option name Threads type spin default 1 min 1 max 1\n"
                      << "option name MultiPV type spin default 1 min 1 max 256\n"
                      << "uciok" << std::endl;
            if (mode == "exit-after-handshake") {
                // Stays just long enough to finish the handshake.
                while (std::getline(std::cin, line))
                    if (line == "isready") {
                        std::cout << "readyok" << std::endl;
                        return 0;
                    }
                return 0;
            }
        } else if (cmd == "isready") {
            std::cout << "readyok" << std::endl;
        } else if (cmd == "setoption") {
            std::string word, name, value;
            in >> word >> name >> word >> value;
            if (name == "MultiPV")
                multipv = std::max(1, std::stoi(value));
        } else if (cmd == "ucinewgame") {
        } else if (cmd == "position") {
            std::string kind;
            in >> kind;
            std::string fen;
            std::string tok;
            if (kind == "startpos") {
                pos = Position();
            } else {
                std::vector<std::string> fields;
                while (fields.size() < 6 && in >> tok && tok != "moves")
                    fields.push_back(tok);
                for (std::size_t i = 0; i < fields.size(); ++i)
                    fen += (i ? " " : "") + fields[i];
                pos = Position::from_fen(fen);
            }
            while (in >> tok)
                if (tok != "moves")
                    pos = pos.apply(*pos.find_uci(tok));
        } else if (cmd == "go") {
            std::vector<std::string> only;
            for (std::string tok; in >> tok;)
                if (tok == "searchmoves")
                    for (std::string m; in >> m;)
                        only.push_back(m);

            const std::string fen = pos.fen();
            const json entry = positions.contains(fen) ? positions[fen] : json::object();
            const json scores = entry.value("scores", json::object());
            const std::string best = entry.value("best", std::string());

            std::vector<Scored> moves;
            for (const auto& m : pos.legal_moves()) {
                const std::string u = m.uci();
                if (!only.empty() && std::find(only.begin(), only.end(), u) == only.end())
                    continue;
                const std::string token = scores.contains(u) ? token_of(scores[u]) : "cp " + std::to_string(default_cp);
                moves.push_back({u, token, rank_key(token)});
            }
            std::stable_sort(moves.begin(), moves.end(), [&](const Scored& a, const Scored& b) {
                if ((a.uci == best) != (b.uci == best))
                    return a.uci == best;
                if (a.rank_key != b.rank_key)
                    return a.rank_key > b.rank_key;
                return a.uci < b.uci;
            });
            if (moves.empty()) {
                std::cout << "info depth 0 score mate 0\nbestmove (none)" << std::endl;
                continue;
            }

            const int k = std::min<int>(multipv, static_cast<int>(moves.size()));
            std::cout << "info string scripted search\n";
            // A shallow iteration and a bound line the client must not keep.
            for (int i = 0; i < k; ++i)
                std::cout << "info depth 1 seldepth 1 multipv " << i + 1 << " score cp 0 nodes 1 pv "
                          << moves[static_cast<std::size_t>(i)].uci << "\n";
            std::cout << "info depth " << depth << " multipv 1 score cp 99999 lowerbound pv " << moves[0].uci
                      << "\n";
            for (int i = 0; i < k; ++i) {
                const Scored& s = moves[static_cast<std::size_t>(i)];
                std::cout << "info depth " << depth << " seldepth " << depth + 4 << " multipv " << i + 1
                          << " score " << s.token << " nodes 1000 nps 100000 time 10 pv " << s.uci << "\n";
            }
            std::cout << "bestmove " << moves[0].uci << std::endl;
        } else if (cmd == "quit") {
            return 0;
        }
    }
    return 0;
}
