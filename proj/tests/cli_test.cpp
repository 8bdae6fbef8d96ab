#include "doctest.h"

#include "cli.hpp"
#include "fixtures/synthetic_corpus.hpp"
#include "sacscore/bellman/lab.hpp"
#include "sacscore/engine/uci.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sacscore;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "sacscore_cli_test" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
}

std::vector<std::string> fake_engine(const std::string& script)
{
    return {"--engine", SACSCORE_FAKE_ENGINE, "--engine-arg=--script", "--engine-arg=" + script};
}

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("cli usage errors")
{
    CHECK(run({}).code == cli::usage);
    CHECK(run({"frobnicate"}).code == cli::usage);
    CHECK(run({"convert"}).code == cli::usage);
    CHECK(run({"convert", "--cp", "1", "--winprob", "0.5"}).code == cli::usage);
    CHECK(run({"perft"}).code == cli::usage);
    CHECK(run({"solve", "KQvK", "--model", "chaotic"}).code == cli::usage);
    CHECK(run({"--help"}).code == cli::ok);
}

TEST_CASE("cli convert")
{
    CHECK(run({"convert", "--cp", "0"}).out == "0.500000\n");
    CHECK(run({"convert", "--cp", "4"}).out == "0.909091\n");
    const auto back = run({"convert", "--winprob", "0.909091"});
    CHECK(back.code == cli::ok);
    CHECK(std::abs(std::stod(back.out) - 4.0) < 1e-5);
    CHECK(run({"convert", "--cp", "-4"}).out == "0.090909\n");
    CHECK(run({"convert", "--winprob", "1"}).code == cli::input);
    CHECK(run({"convert", "--winprob", "0"}).code == cli::input);
    CHECK(run({"convert", "--cp", "abc"}).code == cli::usage);
}

TEST_CASE("cli perft")
{
    CHECK(run({"perft", "1"}).out == "20\n");
    CHECK(run({"perft", "3"}).out == "8902\n");
    // Kiwipete, depth 2.
    CHECK(run({"perft", "2", "--fen", "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"}).out ==
          "2039\n");
    const auto divide = run({"perft", "2", "--divide"});
    CHECK(divide.out.find("e2e4: 20\n") != std::string::npos);
    CHECK(divide.out.find("total: 400\n") != std::string::npos);
    const auto bad = run({"perft", "1", "--fen", "not a fen"});
    CHECK(bad.code == cli::input);
    CHECK(bad.err.find("FEN") != std::string::npos);
}

TEST_CASE("cli solve")
{
    const auto dir = scratch("solve");
    const auto kvk = run({"solve", "KvK", "--table", (dir / "kvk.sacstb").string()});
    CHECK(kvk.code == cli::ok);
    CHECK(kvk.out.find("white wins 0, draws 7224, black wins 0") != std::string::npos);
    CHECK(kvk.out.find("bellman residual: 0\n") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "kvk.sacstb"));

    const auto kqk = run({"solve", "KQvK", "--table", (dir / "kqk.sacstb").string(), "--format", "json"});
    REQUIRE(kqk.code == cli::ok);
    const auto j = nlohmann::json::parse(kqk.out);
    CHECK(j["states"] == 368452);
    CHECK(j["white_wins"] == 345404);
    CHECK(j["draws"] == 23048);
    CHECK(j["black_wins"] == 0);
    CHECK(j["max_dtm"] == 20);
    CHECK(j["residual"] == 0.0);
    std::ifstream file(dir / "kqk.sacstb", std::ios::binary);
    const auto table = bellman::read_table(file);
    CHECK(table.state_count() == 368452);

    const auto bad = run({"solve", "KXvK"});
    CHECK(bad.code == cli::usage);
    CHECK(bad.err.find("unknown piece letter") != std::string::npos);
    const auto big = run({"solve", "KQQQQQQQQQvK"});
    CHECK(big.code == cli::usage);
    CHECK(big.err.find("states") != std::string::npos);
}

TEST_CASE("cli anchors")
{
    const auto r = run({"anchors"});
    CHECK(r.code == cli::ok);
    CHECK(r.out.find("Bxh7  illegal") != std::string::npos);
}

TEST_CASE("cli analyze")
{
    const auto dir = scratch("analyze");
    const std::string ribli_fen = engine::uci_fen(
        chess::Position::from_fen(test::figure_fens[0], chess::FenOptions{.lenient_castling = true}));
    const nlohmann::json script = {
        {"id", "FixtureEngine 1.0"},
        {"positions", {{ribli_fen, {{"best", "h2h7"}, {"scores", {{"h2h7", "mate 4"}}}}}}}};
    const std::string script_path = write(dir / "script.json", script.dump());
    const std::string pgn = write(dir / "ribli.pgn", std::string("[White \"Karpov\"]\n[Black \"Ribli\"]\n") +
                                                         "[Site \"https://lichess.org/vdsAKx53\"]\n[SetUp \"1\"]\n" +
                                                         "[FEN \"" + test::figure_fens[0] +
                                                         "\"]\n\n1. Qxh7+ Kxh7 2. Rh2+ Kg8 *\n");

    SUBCASE("engine is required")
    {
        const auto r = run({"analyze", pgn});
        CHECK(r.code == cli::usage);
        CHECK(r.err.find("--engine") != std::string::npos);
    }
    SUBCASE("one queen sacrifice, one verdict")
    {
        const auto r = run(std::vector<std::string>{"analyze", pgn, "--format", "json"} + fake_engine(script_path));
        REQUIRE(r.code == cli::ok);
        const auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["games"].size() == 1);
        const auto& verdicts = j["games"][0]["verdicts"];
        REQUIRE(verdicts.size() == 1);
        CHECK(verdicts[0]["piece_class"] == "queen");
        CHECK(verdicts[0]["move"] == "h2h7");
        CHECK(verdicts[0]["verdict"] == "optimal");
        CHECK(verdicts[0]["engine_id"] == "FixtureEngine 1.0");

        const auto text = run(std::vector<std::string>{"analyze", pgn} + fake_engine(script_path));
        CHECK(text.out.find("Qxh7+") != std::string::npos);
        CHECK(text.out.find("OK") != std::string::npos);
    }
    SUBCASE("empty file gives an empty report")
    {
        const auto r = run(std::vector<std::string>{"analyze", write(dir / "empty.pgn", ""), "--format", "json"} +
                           fake_engine(script_path));
        CHECK(r.code == cli::ok);
        CHECK(nlohmann::json::parse(r.out)["games"].empty());
    }
    SUBCASE("parse errors and engine errors have distinct codes")
    {
        const auto broken = write(dir / "broken.pgn", "[White \"A\"]\n\n1. e4 e5 2. Ke3 *\n");
        CHECK(run(std::vector<std::string>{"analyze", broken} + fake_engine(script_path)).code == cli::input);
        CHECK(run(std::vector<std::string>{"analyze", (dir / "missing.pgn").string()} + fake_engine(script_path)).code ==
              cli::input);
        const auto r = run({"analyze", pgn, "--engine", "/nonexistent/engine"});
        CHECK(r.code == cli::engine);
        CHECK(r.err.find("error:") != std::string::npos);
    }
    SUBCASE("report file")
    {
        const auto out = dir / "report.json";
        const auto r =
            run(std::vector<std::string>{"analyze", pgn, "--format", "json", "--output", out.string()} +
                fake_engine(script_path));
        CHECK(r.code == cli::ok);
        CHECK(r.out.empty());
        CHECK(std::filesystem::file_size(out) > 0);
    }
}

TEST_CASE("cli reproduce")
{
    SUBCASE("published marks only")
    {
        const auto r = run({"reproduce"});
        CHECK(r.code == cli::ok);
        CHECK(r.out.find("published optimal: 13/16 (0.8125)") != std::string::npos);
        CHECK(r.out.find("published optimal: 14/16 (0.8750)") != std::string::npos);
    }
    SUBCASE("fixture engine over ingested games")
    {
        const auto dir = scratch("reproduce");
        const auto entries = test::synthetic_corpus();
        const auto pgns = test::write_synthetic_pgns(entries, dir / "pgn");
        const auto script = write(dir / "script.json", test::published_verdict_script(entries).dump());
        const auto args = std::vector<std::string>{"reproduce", "--pgn-dir", pgns.string(), "--format", "json"} +
                          fake_engine(script);
        const auto first = run(args);
        REQUIRE(first.code == cli::ok);
        CHECK(first.err.find("ingested 32 of 32 games") != std::string::npos);
        const auto j = nlohmann::json::parse(first.out);
        for (const auto& t : j["tables"]) {
            CHECK(t["agreement"]["num"] == 16);
            CHECK(t["agreement"]["den"] == 16);
        }
        CHECK(run(args).out == first.out);
        CHECK(run(args + std::vector<std::string>{"--jobs", "3"}).out == first.out);

        const auto text = run(std::vector<std::string>{"reproduce", "--pgn-dir", pgns.string()} + fake_engine(script));
        CHECK(text.out.find("agreement with published marks: 16/16") != std::string::npos);
        CHECK(text.out.find("FixtureEngine 1.0, depth 20") != std::string::npos);
    }
    SUBCASE("engine that cannot start")
    {
        const auto dir = scratch("reproduce_bad");
        const auto pgns = test::write_synthetic_pgns(test::synthetic_corpus(), dir / "pgn");
        const auto r = run({"reproduce", "--pgn-dir", pgns.string(), "--engine", "/nonexistent/engine"});
        CHECK(r.code == cli::engine);
    }
}
