#include "doctest.h"

#include "bellman_oracle.hpp"
#include "sacscore/bellman/lab.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

using namespace sacscore;
using namespace sacscore::bellman;
using chess::Color;
using chess::Piece;
using chess::PieceType;
using chess::Position;
using test::MateSearch;
using test::sample;
using test::transformed;

namespace {

// Solved once; several test cases share them.
const EndgameValueTable& kqk()
{
    static const EndgameValueTable t = value_iteration(EndgameSpec::parse("KQvK"), OpponentModel::adversarial());
    return t;
}

const EndgameValueTable& kqk_uniform()
{
    static const EndgameValueTable t = value_iteration(EndgameSpec::parse("KQvK"), OpponentModel::uniform());
    return t;
}

}  // namespace

TEST_CASE("endgame spec parsing")
{
    CHECK(EndgameSpec::parse("KQvK").str() == "KQvK");
    CHECK(EndgameSpec::parse("KNBvK").str() == "KBNvK");
    CHECK(EndgameSpec::parse("KvKR").str() == "KvKR");
    CHECK(EndgameSpec::parse("KRvKN").pieces.size() == 2);
    CHECK(EndgameSpec::parse("KQvK").defender() == Color::black);
    CHECK(EndgameSpec::parse("KvKQ").defender() == Color::white);
    CHECK(EndgameSpec::parse("KNvK").insufficient());
    CHECK_FALSE(EndgameSpec::parse("KRvK").insufficient());
    CHECK(EndgameSpec::parse("KQvK").without(0).str() == "KvK");
    for (const char* bad : {"KXvK", "KPvK", "KQK", "QvK", "KvKvK", "", "KQvk"})
        CHECK_THROWS_AS(EndgameSpec::parse(bad), SpecError);
}

TEST_CASE("state-space guard")
{
    const auto nine = EndgameSpec::parse("KQQQQQQQQQvK");
    try {
        StateSpace space(nine);
        FAIL("nine queens accepted");
    } catch (const GuardError& e) {
        CHECK(e.estimated_states() > 1e19);
        CHECK(std::string(e.what()).find("guard allows 2") != std::string::npos);
    }
    CHECK_THROWS_AS(StateSpace(EndgameSpec::parse("KQRvKN")), GuardError);
    // Raising the guard does not lift the memory bound on dense tables.
    CHECK_THROWS_AS(StateSpace(EndgameSpec::parse("KQRvKN"), 3), GuardError);
    CHECK_NOTHROW(StateSpace(EndgameSpec::parse("KRvKN")));
}

TEST_CASE("bare kings")
{
    const StateSpace space(EndgameSpec::parse("KvK"));
    const auto states = enumerate_states(space);
    const auto white = std::count_if(states.begin(), states.end(), [](std::uint64_t i) { return (i & 1) == 0; });
    CHECK(white == 3612);
    CHECK(states.size() - static_cast<std::size_t>(white) == 3612);

    const auto t = value_iteration(space.spec(), OpponentModel::adversarial());
    CHECK(t.tally().draws == 7224);
    CHECK(t.max_dtm() == 0);
    CHECK(bellman_residual(t) == 0.0);
    const std::string text = summary(t, bellman_residual(t));
    CHECK(text.find("white wins 0, draws 7224, black wins 0") != std::string::npos);
    CHECK(text.find("bellman residual: 0") != std::string::npos);
}

TEST_CASE("state indexing round trip")
{
    const auto& t = kqk();
    for (std::uint64_t idx : sample(t, 2000, 7)) {
        const Position p = t.space().position(idx);
        CHECK(t.space().index_of(p) == idx);
        CHECK(t.covers(p));
    }
    // Identical pieces are stored once.
    const StateSpace rr(EndgameSpec::parse("KRRvK"), 2);
    const auto p = Position::from_fen("4k3/8/8/8/8/8/R6R/4K3 w - - 0 1");
    const auto idx = rr.index_of(p);
    REQUIRE(idx);
    CHECK(rr.legal(*idx));
    CHECK(rr.position(*idx) == p);
}

TEST_CASE("KQK census matches an independent enumeration")
{
    // Counts from a separate enumeration over python-chess boards: legal
    // states per side to move, and black-to-move stalemates (872) plus
    // positions where the bare king can take the queen (22176).
    const auto& t = kqk();
    std::uint64_t white = 0;
    std::uint64_t black_draws = 0;
    for (std::uint64_t idx : t.states()) {
        if ((idx & 1) == 0)
            ++white;
        else if (t.at(idx).value == 0)
            ++black_draws;
    }
    CHECK(white == 144508);
    CHECK(t.state_count() - white == 223944);
    CHECK(black_draws == 872 + 22176);
    const auto tally = t.tally();
    CHECK(tally.white_wins == 144508 + 223944 - 23048);
    CHECK(tally.draws == 23048);
    CHECK(tally.black_wins == 0);

    int max_white_to_move = 0;
    for (std::uint64_t idx : t.states())
        if ((idx & 1) == 0)
            max_white_to_move = std::max(max_white_to_move, t.at(idx).dtm);
    // Mate in ten moves is the longest KQK win.
    CHECK(max_white_to_move == 19);
    CHECK(t.max_dtm() == 20);
}

TEST_CASE("KQK value iteration reaches the fixed point and matches retrograde staging")
{
    const auto& t = kqk();
    CHECK(bellman_residual(t) == 0.0);
    CHECK(t.iteration_count() == t.max_dtm() + 1);

    const auto staged = retrograde_solve(EndgameSpec::parse("KQvK"));
    REQUIRE(staged.states() == t.states());
    std::size_t mismatches = 0;
    for (std::uint64_t idx : t.states())
        mismatches += t.at(idx).value != staged.at(idx).value || t.at(idx).dtm != staged.at(idx).dtm;
    CHECK(mismatches == 0);

    const auto parallel = value_iteration(EndgameSpec::parse("KQvK"), OpponentModel::adversarial(), {.jobs = 3});
    for (std::uint64_t idx : sample(t, 5000, 3))
        CHECK(parallel.at(idx).dtm == t.at(idx).dtm);
}

TEST_CASE("KRK with both solvers")
{
    const auto spec = EndgameSpec::parse("KRvK");
    const auto t = value_iteration(spec, OpponentModel::adversarial());
    const auto staged = retrograde_solve(spec);
    CHECK(bellman_residual(t) == 0.0);
    CHECK(bellman_residual(staged) == 0.0);
    std::size_t mismatches = 0;
    int max_white_to_move = 0;
    for (std::uint64_t idx : t.states()) {
        mismatches += t.at(idx).value != staged.at(idx).value || t.at(idx).dtm != staged.at(idx).dtm;
        if ((idx & 1) == 0)
            max_white_to_move = std::max(max_white_to_move, t.at(idx).dtm);
    }
    CHECK(mismatches == 0);
    // Mate in sixteen moves is the longest KRK win.
    CHECK(max_white_to_move == 31);
}

TEST_CASE("table symmetry")
{
    const auto& t = kqk();
    const auto swapped = value_iteration(EndgameSpec::parse("KvKQ"), OpponentModel::adversarial());
    CHECK(swapped.tally().black_wins == t.tally().white_wins);
    for (std::uint64_t idx : sample(t, 3000, 11)) {
        const Position p = t.space().position(idx);
        const StateValue v = t.at(idx);
        for (int k = 1; k < 8; ++k) {
            const StateValue w = t.value(transformed(p, k));
            CHECK(w.value == v.value);
            CHECK(w.dtm == v.dtm);
        }
        const StateValue c = swapped.value(p.color_flipped());
        CHECK(c.value == -v.value);
        CHECK(c.dtm == v.dtm);
    }
}

TEST_CASE("optimal policy mates within the stored distance")
{
    const auto& t = kqk();
    std::vector<std::uint64_t> won;
    for (std::uint64_t idx : sample(t, 400, 5))
        if (t.at(idx).value > 0 && t.at(idx).dtm > 0 && won.size() < 100)
            won.push_back(idx);
    REQUIRE(won.size() == 100);
    for (std::uint64_t idx : won) {
        Position p = t.space().position(idx);
        const int dtm = t.at(idx).dtm;
        int plies = 0;
        while (!terminal_value(p) && plies <= dtm) {
            const auto m = optimal_policy(t, p);
            const Position next = p.apply(m);
            if (p.side_to_move() == Color::white && !terminal_value(next))
                CHECK(t.value(next).dtm == t.value(p).dtm - 1);
            p = next;
            ++plies;
        }
        CHECK(p.is_checkmate());
        CHECK(p.side_to_move() == Color::black);
        CHECK(plies == dtm);
    }
}

TEST_CASE("table classification agrees with alpha-beta on sampled states")
{
    const auto& t = kqk();
    MateSearch search(Color::white);
    int wins = 0;
    for (std::uint64_t idx : sample(t, 100, 2024)) {
        const Position p = t.space().position(idx);
        const StateValue v = t.at(idx);
        if (v.value > 0) {
            ++wins;
            CHECK_MESSAGE(search.within(p, v.dtm), p.fen());
        } else {
            CHECK_MESSAGE(!search.within(p, t.max_dtm() + 1), p.fen());
        }
    }
    CHECK(wins > 50);

    // Minimal distance on a few: no mate two plies sooner.
    int checked = 0;
    for (std::uint64_t idx : sample(t, 200, 99)) {
        const StateValue v = t.at(idx);
        if (v.value <= 0 || v.dtm < 3 || v.dtm > 11 || checked == 10)
            continue;
        ++checked;
        CHECK(!search.within(t.space().position(idx), v.dtm - 2));
    }
    CHECK(checked == 10);
}

TEST_CASE("q_value")
{
    const auto& t = kqk();
    const auto mate = Position::from_fen("k7/8/1K6/8/8/8/7Q/8 w - - 0 1");
    const auto h2h8 = *mate.find_uci("h2h8");
    CHECK(q_value(t, mate, h2h8) == 1.0);
    CHECK(optimal_policy(t, mate) == h2h8);

    // Qc7 here stalemates; a won position where that move throws it away.
    const auto stale = Position::from_fen("k7/8/1K6/8/8/8/2Q5/8 w - - 0 1");
    CHECK(q_value(t, stale, *stale.find_uci("c2c7")) == 0.0);
    CHECK(q_value(t, stale, optimal_policy(t, stale)) == 1.0);

    // Drawn: the bare king takes the queen.
    const auto drawn = Position::from_fen("8/8/8/8/8/1k6/1Q6/7K b - - 0 1");
    CHECK(t.value(drawn).value == 0.0);
    CHECK(optimal_policy(t, drawn).uci() == "b3b2");
    CHECK(q_value(t, drawn, *drawn.find_uci("b3b2")) == 0.0);

    CHECK_THROWS_AS(optimal_policy(t, Position::from_fen("k7/1Q6/1K6/8/8/8/8/8 b - - 0 1")), std::logic_error);
    const auto rook = Position::from_fen("k7/8/1K6/8/8/8/8/7R w - - 0 1");
    CHECK_THROWS_AS(q_value(t, rook, *rook.find_uci("h1h2")), CoverageError);
}

TEST_CASE("q_value equals a one-ply re-expansion of stored values")
{
    // Re-expansion: the successor's value is recomputed from its own
    // successors' stored values rather than read from the table.
    for (const EndgameValueTable* t : {&kqk(), &kqk_uniform()}) {
        std::mt19937_64 rng(17);
        int checked = 0;
        for (std::uint64_t idx : sample(*t, 1500, 23)) {
            const Position s = t->space().position(idx);
            const auto moves = s.legal_moves();
            if (moves.empty() || terminal_value(s) || checked == 1000)
                continue;
            const auto a = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
            const Position next = s.apply(a);
            double expanded;
            if (const auto u = terminal_value(next)) {
                expanded = *u;
            } else {
                const auto replies = next.legal_moves();
                std::vector<double> values;
                for (const auto& r : replies) {
                    const Position after = next.apply(r);
                    values.push_back(terminal_value(after).value_or(0.0) +
                                     (terminal_value(after) ? 0.0 : t->value(after).value));
                }
                if (t->stochastic_side() == next.side_to_move()) {
                    expanded = 0;
                    for (double v : values)
                        expanded += v / static_cast<double>(values.size());
                } else {
                    const int sign = chess::sign_of(next.side_to_move());
                    expanded = *std::max_element(values.begin(), values.end(), [&](double x, double y) {
                        return sign * x < sign * y;
                    });
                }
            }
            ++checked;
            CHECK(std::abs(q_value(*t, s, a) - chess::sign_of(s.side_to_move()) * expanded) < 1e-12);
        }
        CHECK(checked == 1000);
    }
}

TEST_CASE("stochastic defender")
{
    const auto& adv = kqk();
    const auto& uni = kqk_uniform();
    CHECK(uni.stochastic_side() == Color::black);
    CHECK(bellman_residual(uni) < 1e-9);
    REQUIRE(uni.states() == adv.states());
    std::size_t violations = 0;
    std::size_t strictly_better = 0;
    for (std::uint64_t idx : adv.states()) {
        violations += uni.at(idx).value < adv.at(idx).value - 1e-12;
        strictly_better += uni.at(idx).value > adv.at(idx).value + 1e-12;
    }
    CHECK(violations == 0);
    // The random king sometimes fails to take a hanging queen.
    CHECK(strictly_better > 0);

    const auto parallel = value_iteration(EndgameSpec::parse("KQvK"), OpponentModel::uniform(), {.jobs = 3});
    for (std::uint64_t idx : sample(uni, 5000, 8))
        CHECK(parallel.at(idx).value == uni.at(idx).value);
}

TEST_CASE("custom move policy")
{
    const auto spec = EndgameSpec::parse("KQvK");
    OpponentModel bad = OpponentModel::uniform();
    bad.policy = [](const Position&, const std::vector<chess::Move>& moves) {
        return std::vector<double>(moves.size(), 0.5);
    };
    CHECK_THROWS_AS(value_iteration(spec, bad), std::invalid_argument);

    // A defender that always takes the queen when it can.
    OpponentModel greedy = OpponentModel::uniform();
    greedy.policy = [](const Position&, const std::vector<chess::Move>& moves) {
        std::vector<double> w(moves.size(), 0.0);
        const auto captures = std::count_if(moves.begin(), moves.end(), [](const chess::Move& m) { return m.is_capture(); });
        for (std::size_t i = 0; i < moves.size(); ++i)
            w[i] = captures ? (moves[i].is_capture() ? 1.0 / static_cast<double>(captures) : 0.0)
                            : 1.0 / static_cast<double>(moves.size());
        return w;
    };
    const auto t = value_iteration(spec, greedy);
    CHECK(bellman_residual(t) < 1e-9);
    const auto drawn = Position::from_fen("8/8/8/8/8/1k6/1Q6/7K b - - 0 1");
    CHECK(t.value(drawn).value == 0.0);
    CHECK(kqk_uniform().value(drawn).value > 0.0);
    for (std::uint64_t idx : sample(t, 3000, 4)) {
        CHECK(t.at(idx).value >= kqk().at(idx).value - 1e-12);
        CHECK(t.at(idx).value <= kqk_uniform().at(idx).value + 1e-12);
    }
}

TEST_CASE("expectimax")
{
    const auto model = OpponentModel::uniform();
    const auto quiet = Position::from_fen("8/8/3k4/8/8/8/8/Q3K3 w - - 0 1");
    CHECK(expectimax_value(quiet, model, 0) == 0.0);
    const auto mate = Position::from_fen("k7/8/1K6/8/8/8/7Q/8 w - - 0 1");
    CHECK(expectimax_value(mate, model, 1) == 1.0);
    CHECK(expectimax_value(mate, OpponentModel::adversarial(), 3) == 1.0);

    const auto& uni = kqk_uniform();
    for (std::uint64_t idx : sample(uni, 12, 31)) {
        const Position p = uni.space().position(idx);
        const double target = uni.at(idx).value;
        double previous = -1;
        for (int depth = 0; depth <= 3; ++depth) {
            const double v = expectimax_value(p, model, depth);
            CHECK(v >= previous - 1e-12);
            CHECK(v <= target + 1e-12);
            previous = v;
        }
    }
}

TEST_CASE("table files")
{
    const auto& t = kqk();
    std::stringstream buf;
    write_table(buf, t);
    const std::string bytes = buf.str();
    CHECK(bytes.compare(0, 8, std::string("SACSTB\0\1", 8)) == 0);

    std::istringstream in(bytes);
    const auto loaded = read_table(in);
    CHECK(loaded.spec() == t.spec());
    CHECK(loaded.iteration_count() == t.iteration_count());
    REQUIRE(loaded.states() == t.states());
    for (std::uint64_t idx : t.states())
        REQUIRE((loaded.at(idx).value == t.at(idx).value && loaded.at(idx).dtm == t.at(idx).dtm));
    CHECK(bellman_residual(loaded) == 0.0);

    // Flip the value of one state: the residual must catch it.
    const std::size_t header = 8 + 1 + 1 + 2 + 4 + 4 + 8;
    std::size_t victim = 0;
    while (t.at(t.states()[victim]).value == 0 || t.at(t.states()[victim]).dtm == 0)
        ++victim;
    std::string corrupt = bytes;
    corrupt[header + 3 * victim] = static_cast<char>(-static_cast<int>(t.at(t.states()[victim]).value));
    std::istringstream bad_in(corrupt);
    CHECK(bellman_residual(read_table(bad_in)) >= 1.0);

    std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_table(truncated), std::runtime_error);
    std::istringstream garbage("not a table");
    CHECK_THROWS_AS(read_table(garbage), std::runtime_error);

    std::stringstream stochastic;
    write_table(stochastic, kqk_uniform());
    const auto back = read_table(stochastic);
    CHECK(back.stochastic_side() == Color::black);
    CHECK(bellman_residual(back) < 1e-9);
}
