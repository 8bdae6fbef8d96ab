#include "cli.hpp"

#include "sacscore/bellman/lab.hpp"
#include "sacscore/chess/perft.hpp"
#include "sacscore/corpus/corpus.hpp"
#include "sacscore/evaluation/evaluation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace sacscore::cli {

namespace {

struct EngineFlags {
    std::string path;
    std::vector<std::string> args;
    int depth = 20;
    int movetime_ms = 0;
    int multipv = 4;
    int threads = 1;
    int hash_mb = 256;
    std::vector<std::string> options;  // Name=Value
};

struct AnalysisFlags {
    int horizon = 6;
    int swing = 2;
    int queen_net = 4;
    bool keep_even_trades = false;
    double epsilon = evaluation::default_epsilon;
    int jobs = 1;
};

struct OutputFlags {
    std::string format = "text";
    std::string path;
};

// Failure carrying its exit code; caught once in run().
struct Failure {
    int code;
    std::string message;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f)
{
    cmd->add_option("--engine", f.path, "UCI engine executable")->envname("SACSCORE_ENGINE");
    cmd->add_option("--engine-arg", f.args, "extra argument passed to the engine (repeatable)");
    cmd->add_option("--depth", f.depth, "search depth per position")->check(CLI::Range(1, 200))->capture_default_str();
    cmd->add_option("--movetime", f.movetime_ms, "search time per position in ms (drops the default depth)")
        ->check(CLI::Range(1, 86'400'000));
    cmd->add_option("--multipv", f.multipv, "lines requested from the engine")->check(CLI::Range(1, 64))->capture_default_str();
    cmd->add_option("--threads", f.threads, "engine Threads option")->check(CLI::Range(1, 1024))->capture_default_str();
    cmd->add_option("--hash", f.hash_mb, "engine Hash option in MB")->check(CLI::Range(1, 1 << 20))->capture_default_str();
    cmd->add_option("--setoption", f.options, "extra engine option as Name=Value (repeatable)");
}

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f)
{
    cmd->add_option("--horizon", f.horizon, "capture horizon in plies")->check(CLI::Range(2, 64))->capture_default_str();
    cmd->add_option("--swing", f.swing, "minimum material given up, in pawns")->check(CLI::Range(1, 64))->capture_default_str();
    cmd->add_option("--queen-net", f.queen_net, "minimum net loss for a queen sacrifice, in pawns")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    cmd->add_flag("--keep-even-trades", f.keep_even_trades, "do not cancel pieces won back of the same class");
    cmd->add_option("--epsilon", f.epsilon, "largest loss in pawns still counted optimal")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--jobs", f.jobs, "parallel engine sessions")->check(CLI::Range(1, 256))->capture_default_str();
}

void add_output_flags(CLI::App* cmd, OutputFlags& f)
{
    cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    cmd->add_option("--output", f.path, "write the report to this file instead of stdout");
}

engine::EngineConfig engine_config(const EngineFlags& f, bool depth_given)
{
    engine::EngineConfig cfg;
    cfg.executable_path = f.path;
    cfg.arguments = f.args;
    cfg.depth_limit = f.movetime_ms > 0 && !depth_given ? std::nullopt : std::optional<int>(f.depth);
    if (f.movetime_ms > 0)
        cfg.time_limit_ms = f.movetime_ms;
    cfg.multipv = f.multipv;
    cfg.threads = f.threads;
    cfg.hash_mb = f.hash_mb;
    for (const auto& opt : f.options) {
        const auto eq = opt.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Failure{usage, "--setoption expects Name=Value, got '" + opt + "'"};
        cfg.options[opt.substr(0, eq)] = opt.substr(eq + 1);
    }
    return cfg;
}

evaluation::AnalysisSettings analysis_settings(const AnalysisFlags& a, const engine::EngineConfig& cfg)
{
    evaluation::AnalysisSettings s;
    s.detector.horizon_plies = a.horizon;
    s.detector.swing_threshold = a.swing;
    s.detector.queen_net_threshold = a.queen_net;
    s.detector.exclude_even_trades = !a.keep_even_trades;
    s.limits = cfg.limits();
    s.epsilon = a.epsilon;
    return s;
}

void emit(const OutputFlags& o, const std::string& report, std::ostream& out)
{
    if (o.path.empty()) {
        out << report;
        return;
    }
    std::ofstream file(o.path, std::ios::binary);
    file << report;
    if (!file)
        throw Failure{input, "cannot write " + o.path};
}

std::string engine_failure(const engine::EngineError& e)
{
    std::string msg = e.what();
    if (!e.excerpt().empty())
        msg += "\nlast engine exchange:\n" + e.excerpt();
    return msg;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{input, "cannot read " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_analyze(const std::string& pgn_path, const EngineFlags& ef, bool depth_given, const AnalysisFlags& af,
                const OutputFlags& of, std::ostream& out)
{
    if (ef.path.empty())
        throw Failure{usage, "analyze needs an engine: pass --engine or set SACSCORE_ENGINE"};
    const auto cfg = engine_config(ef, depth_given);
    const auto settings = analysis_settings(af, cfg);

    std::vector<chess::GameRecord> games;
    try {
        games = chess::parse_pgn(read_file(pgn_path));
    } catch (const chess::PgnError& e) {
        throw Failure{input, pgn_path + ": " + e.what()};
    } catch (const chess::FenError& e) {
        throw Failure{input, pgn_path + ": " + e.what()};
    }

    std::vector<evaluation::GameAnalysis> results(games.size());
    if (!games.empty()) {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex mu;
        std::size_t failed_at = games.size();
        std::optional<engine::EngineError> failure;
        auto record = [&](std::size_t k, const engine::EngineError& e) {
            std::lock_guard lock(mu);
            if (!failure || k < failed_at) {
                failure = e;
                failed_at = k;
            }
            stop = true;
        };
        auto worker = [&] {
            std::optional<engine::EngineSession> session;
            try {
                session.emplace(engine::EngineSession::start(cfg));
            } catch (const engine::EngineError& e) {
                record(0, e);
                return;
            }
            for (std::size_t k; !stop && (k = next.fetch_add(1)) < games.size();) {
                try {
                    results[k] = evaluation::analyze_game(*session, games[k], settings);
                } catch (const engine::EngineError& e) {
                    record(k, e);
                    return;
                }
            }
        };
        const int n = std::min<int>(af.jobs, static_cast<int>(games.size()));
        std::vector<std::thread> pool;
        for (int t = 1; t < n; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& t : pool)
            t.join();
        if (failure)
            throw Failure{engine, engine_failure(*failure)};
    }
    emit(of, of.format == "json" ? evaluation::render_json(results) : evaluation::render_text(results), out);
    return ok;
}

int cmd_reproduce(const std::string& pgn_dir, const EngineFlags& ef, bool depth_given, const AnalysisFlags& af,
                  const OutputFlags& of, std::ostream& out, std::ostream& err)
{
    std::vector<corpus::CorpusEntry> entries = corpus::load_corpus();
    if (!pgn_dir.empty()) {
        auto ingested = corpus::ingest_games(std::move(entries), pgn_dir);
        for (const auto& w : ingested.warnings)
            err << "warning: " << w << "\n";
        err << "ingested " << ingested.matched << " of " << ingested.entries.size() << " games\n";
        entries = std::move(ingested.entries);
    }
    evaluation::SessionFactory factory;
    engine::EngineConfig cfg = engine_config(ef, depth_given);
    if (!ef.path.empty())
        factory = [cfg] { return engine::EngineSession::start(cfg); };
    const auto settings = analysis_settings(af, cfg);
    evaluation::Reproduction r;
    try {
        r = evaluation::reproduce_tables(entries, factory, settings, af.jobs);
    } catch (const engine::EngineError& e) {
        throw Failure{engine, engine_failure(e)};
    }
    emit(of, of.format == "json" ? evaluation::render_json(r) : evaluation::render_text(r), out);
    return ok;
}

int cmd_convert(const std::optional<double>& cp, const std::optional<double>& winprob, std::ostream& out)
{
    char buf[64];
    try {
        if (cp) {
            if (!std::isfinite(*cp))
                throw std::domain_error("advantage must be finite");
            std::snprintf(buf, sizeof buf, "%.6f\n", evaluation::win_probability(*cp));
        } else {
            std::snprintf(buf, sizeof buf, "%.6f\n", evaluation::centipawn_advantage(*winprob));
        }
    } catch (const std::domain_error& e) {
        throw Failure{input, e.what()};
    }
    out << buf;
    return ok;
}

int cmd_solve(const std::string& spec_text, const std::string& model_name, int jobs, int max_pieces,
              const std::string& table_path, const std::string& format, std::ostream& out)
{
    bellman::EndgameSpec spec;
    try {
        spec = bellman::EndgameSpec::parse(spec_text);
    } catch (const bellman::SpecError& e) {
        throw Failure{usage, e.what()};
    }
    const auto model = model_name == "adversarial" ? bellman::OpponentModel::adversarial()
                                                   : bellman::OpponentModel::uniform();
    bellman::SolveOptions opt;
    opt.jobs = jobs;
    opt.max_pieces = max_pieces;
    std::optional<bellman::EndgameValueTable> table;
    try {
        table.emplace(bellman::value_iteration(spec, model, opt));
    } catch (const bellman::GuardError& e) {
        throw Failure{usage, e.what()};
    }
    const double residual = bellman::bellman_residual(*table, jobs);

    const std::string path =
        table_path.empty() ? spec.str() + (model_name == "adversarial" ? "" : "-uniform") + ".sacstb" : table_path;
    {
        std::ofstream file(path, std::ios::binary);
        if (!file)
            throw Failure{input, "cannot write " + path};
        bellman::write_table(file, *table);
    }

    if (format == "json") {
        const auto t = table->tally();
        nlohmann::ordered_json j;
        j["spec"] = spec.str();
        j["model"] = std::string(bellman::to_string(table->kind()));
        j["states"] = table->state_count();
        j["white_wins"] = t.white_wins;
        j["draws"] = t.draws;
        j["black_wins"] = t.black_wins;
        j["max_dtm"] = table->kind() == bellman::ModelKind::adversarial ? nlohmann::ordered_json(table->max_dtm())
                                                                         : nlohmann::ordered_json(nullptr);
        j["sweeps"] = table->iteration_count();
        j["residual"] = residual;
        j["table_file"] = path;
        out << j.dump(2) << "\n";
    } else {
        out << bellman::summary(*table, residual) << "table written to " << path << "\n";
    }
    return ok;
}

int cmd_perft(const std::string& fen, int depth, bool divide, std::ostream& out)
{
    chess::Position p;
    try {
        p = chess::Position::from_fen(fen);
    } catch (const chess::FenError& e) {
        throw Failure{input, e.what()};
    }
    if (divide) {
        std::uint64_t total = 0;
        for (const auto& [move, n] : chess::perft_divide(p, depth)) {
            out << move << ": " << n << "\n";
            total += n;
        }
        out << "total: " << total << "\n";
    } else {
        out << chess::perft(p, depth) << "\n";
    }
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sacrifice detection, engine scoring and exact endgame values", "sacscore"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand all help");

    EngineFlags ef;
    AnalysisFlags af;
    OutputFlags of;

    auto* analyze = app.add_subcommand("analyze", "detect sacrifices in a PGN file and score them with an engine");
    std::string pgn_path;
    analyze->add_option("pgn", pgn_path, "PGN file")->required();
    add_engine_flags(analyze, ef);
    add_analysis_flags(analyze, af);
    add_output_flags(analyze, of);

    auto* reproduce = app.add_subcommand("reproduce", "rebuild the queen and rook/knight sacrifice tables");
    std::string pgn_dir;
    reproduce->add_option("--pgn-dir", pgn_dir, "directory of PGN files to match against the tables");
    add_engine_flags(reproduce, ef);
    add_analysis_flags(reproduce, af);
    add_output_flags(reproduce, of);

    auto* convert = app.add_subcommand("convert", "convert between pawn advantage and win probability");
    std::optional<double> cp;
    std::optional<double> winprob;
    auto* cp_opt = convert->add_option("--cp", cp, "advantage in pawns");
    auto* wp_opt = convert->add_option("--winprob", winprob, "win probability in (0, 1)");
    cp_opt->excludes(wp_opt);
    convert->require_option(1);

    auto* solve = app.add_subcommand("solve", "solve a pawnless endgame exactly, e.g. KQvK");
    std::string spec_text;
    std::string model = "adversarial";
    std::string table_path;
    int solve_jobs = 1;
    int max_pieces = bellman::default_max_pieces;
    std::string solve_format = "text";
    solve->add_option("spec", spec_text, "material, e.g. KQvK or KRvKN")->required();
    solve->add_option("--model", model, "opponent model")
        ->check(CLI::IsMember({"adversarial", "uniform"}))
        ->capture_default_str();
    solve->add_option("--table", table_path, "table file to write (default <spec>.sacstb)");
    solve->add_option("--jobs", solve_jobs, "threads per sweep")->check(CLI::Range(1, 256))->capture_default_str();
    solve->add_option("--max-pieces", max_pieces, "state-space guard on non-king pieces")
        ->check(CLI::Range(0, 32))
        ->capture_default_str();
    solve->add_option("--format", solve_format, "summary format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    auto* perft = app.add_subcommand("perft", "count leaf nodes of the legal move tree");
    int perft_depth = 1;
    std::string fen(chess::start_fen);
    bool divide = false;
    perft->add_option("depth", perft_depth, "plies")->required()->check(CLI::Range(0, 12));
    perft->add_option("--fen", fen, "start position")->capture_default_str();
    perft->add_flag("--divide", divide, "print counts per root move");

    app.add_subcommand("anchors", "check the annotated figure positions and move sequences");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(pgn_path, ef, analyze->count("--depth") > 0, af, of, out);
        if (reproduce->parsed())
            return cmd_reproduce(pgn_dir, ef, reproduce->count("--depth") > 0, af, of, out, err);
        if (convert->parsed())
            return cmd_convert(cp, winprob, out);
        if (solve->parsed())
            return cmd_solve(spec_text, model, solve_jobs, max_pieces, table_path, solve_format, out);
        if (perft->parsed())
            return cmd_perft(fen, perft_depth, divide, out);
        out << corpus::render_anchor_report(corpus::verify_anchors(corpus::load_corpus()));
        return ok;
    } catch (const Failure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    } catch (const engine::EngineError& e) {
        err << "error: " << engine_failure(e) << "\n";
        return engine;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return internal;
    }
}

}  // namespace sacscore::cli
