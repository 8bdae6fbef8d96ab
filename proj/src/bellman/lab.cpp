#include "sacscore/bellman/lab.hpp"

#include "sacscore/chess/attacks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace sacscore::bellman {

using chess::Color;
using chess::Piece;
using chess::PieceType;
using chess::Square;

namespace {

// Dense tables above this many entries are refused whatever the guard says.
constexpr std::uint64_t max_index_space = std::uint64_t{1} << 26;
constexpr int max_slots = 12;

int piece_value(PieceType t)
{
    switch (t) {
    case PieceType::queen: return 9;
    case PieceType::rook: return 5;
    case PieceType::bishop:
    case PieceType::knight: return 3;
    default: return 0;
    }
}

int order_of(PieceType t)
{
    switch (t) {
    case PieceType::queen: return 0;
    case PieceType::rook: return 1;
    case PieceType::bishop: return 2;
    default: return 3;
    }
}

struct Geometry {
    std::array<std::array<std::uint64_t, 64>, 64> between{};
    std::array<std::array<std::int8_t, 64>, 64> dir{};

    Geometry()
    {
        for (auto& row : dir)
            row.fill(-1);
        for (int s = 0; s < 64; ++s)
            for (int d = 0; d < 8; ++d) {
                std::uint64_t mask = 0;
                for (int t : chess::attacks::ray(s, d)) {
                    dir[s][t] = static_cast<std::int8_t>(d);
                    between[s][t] = mask;
                    mask |= std::uint64_t{1} << t;
                }
            }
    }
};

const Geometry& geometry()
{
    static const Geometry g;
    return g;
}

// Slot 0 is the white king, slot 1 the black king, then spec.pieces.
struct Layout {
    int n = 2;
    std::array<Piece, max_slots> piece{};

    explicit Layout(const EndgameSpec& spec)
    {
        piece[0] = Piece(Color::white, PieceType::king);
        piece[1] = Piece(Color::black, PieceType::king);
        for (const Piece p : spec.pieces)
            piece[static_cast<std::size_t>(n++)] = p;
    }
};

// A placement; a captured slot holds -1 until the state is compacted into
// the smaller table.
struct Raw {
    Color side = Color::white;
    std::array<int, max_slots> sq{};
};

std::uint64_t encode(const Layout& L, Raw r)
{
    for (int i = 3; i < L.n; ++i)
        for (int j = i; j > 2 && L.piece[j] == L.piece[j - 1] && r.sq[j] < r.sq[j - 1]; --j)
            std::swap(r.sq[j], r.sq[j - 1]);
    std::uint64_t idx = 0;
    for (int i = L.n - 1; i >= 0; --i)
        idx = idx * 64 + static_cast<std::uint64_t>(r.sq[i]);
    return idx * 2 + (r.side == Color::black ? 1 : 0);
}

Raw decode(const Layout& L, std::uint64_t idx)
{
    Raw r;
    r.side = (idx & 1) ? Color::black : Color::white;
    idx >>= 1;
    for (int i = 0; i < L.n; ++i) {
        r.sq[i] = static_cast<int>(idx % 64);
        idx /= 64;
    }
    return r;
}

std::uint64_t occupancy(const Layout& L, const Raw& r)
{
    std::uint64_t occ = 0;
    for (int i = 0; i < L.n; ++i)
        if (r.sq[i] >= 0)
            occ |= std::uint64_t{1} << r.sq[i];
    return occ;
}

bool attacked(const Layout& L, const Raw& r, int target, Color by, std::uint64_t occ)
{
    const Geometry& g = geometry();
    for (int i = 0; i < L.n; ++i) {
        const int s = r.sq[i];
        if (s < 0 || s == target || L.piece[i].color() != by)
            continue;
        const int df = std::abs((s & 7) - (target & 7));
        const int dr = std::abs((s >> 3) - (target >> 3));
        switch (L.piece[i].type()) {
        case PieceType::king:
            if (df <= 1 && dr <= 1)
                return true;
            break;
        case PieceType::knight:
            if ((df == 1 && dr == 2) || (df == 2 && dr == 1))
                return true;
            break;
        default: {
            const int d = g.dir[s][target];
            if (d < 0)
                break;
            const bool diagonal = chess::attacks::is_diagonal(d);
            const PieceType t = L.piece[i].type();
            if ((t == PieceType::rook && diagonal) || (t == PieceType::bishop && !diagonal))
                break;
            if ((g.between[s][target] & occ) == 0)
                return true;
        }
        }
    }
    return false;
}

int king_slot(Color c) { return c == Color::white ? 0 : 1; }

bool legal(const Layout& L, const Raw& r)
{
    const std::uint64_t occ = occupancy(L, r);
    if (std::popcount(occ) != L.n)
        return false;
    for (int i = 3; i < L.n; ++i)
        if (L.piece[i] == L.piece[i - 1] && r.sq[i] < r.sq[i - 1])
            return false;
    return !attacked(L, r, r.sq[king_slot(~r.side)], r.side, occ);
}

bool in_check(const Layout& L, const Raw& r)
{
    return attacked(L, r, r.sq[king_slot(r.side)], ~r.side, occupancy(L, r));
}

struct MoveInfo {
    int from;
    int to;
    int slot;
    int captured_slot;  // -1 for quiet moves
};

// Calls f(child, info) for every legal move of the side to move.
template <class F>
void for_each_move(const Layout& L, const Raw& r, F&& f)
{
    const std::uint64_t occ = occupancy(L, r);
    const Color mover = r.side;
    const int ks = king_slot(mover);
    for (int i = 0; i < L.n; ++i) {
        if (L.piece[i].color() != mover)
            continue;
        const int from = r.sq[i];
        // Returns true when a slider may continue past `to`.
        auto try_to = [&](int to) {
            int victim = -1;
            if (occ & (std::uint64_t{1} << to)) {
                for (int j = 0; j < L.n; ++j)
                    if (r.sq[j] == to)
                        victim = j;
                if (L.piece[victim].color() == mover || L.piece[victim].type() == PieceType::king)
                    return false;
            }
            Raw child = r;
            child.sq[i] = to;
            if (victim >= 0)
                child.sq[victim] = -1;
            const std::uint64_t after = (occ & ~(std::uint64_t{1} << from)) | (std::uint64_t{1} << to);
            if (!attacked(L, child, child.sq[ks], ~mover, after)) {
                child.side = ~mover;
                f(child, MoveInfo{from, to, i, victim});
            }
            return victim < 0;
        };
        switch (L.piece[i].type()) {
        case PieceType::king:
            for (int to : chess::attacks::king_targets(from))
                try_to(to);
            break;
        case PieceType::knight:
            for (int to : chess::attacks::knight_targets(from))
                try_to(to);
            break;
        default: {
            const PieceType t = L.piece[i].type();
            for (int d = 0; d < 8; ++d) {
                if ((t == PieceType::rook && chess::attacks::is_diagonal(d)) ||
                    (t == PieceType::bishop && !chess::attacks::is_diagonal(d)))
                    continue;
                for (int to : chess::attacks::ray(from, d))
                    if (!try_to(to))
                        break;
            }
        }
        }
    }
}

template <class F>
void parallel_for(std::uint64_t n, int jobs, F&& f)
{
    const int workers = static_cast<int>(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(jobs, 1)), 1, std::max<std::uint64_t>(n, 1)));
    if (workers == 1) {
        f(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + static_cast<std::uint64_t>(workers) - 1) / static_cast<std::uint64_t>(workers);
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t begin = std::min(n, chunk * static_cast<std::uint64_t>(w));
        const std::uint64_t end = std::min(n, begin + chunk);
        pool.emplace_back([&f, begin, end, w] { f(begin, end, w); });
    }
    for (auto& t : pool)
        t.join();
}

chess::Move to_move(const Layout& L, const MoveInfo& m)
{
    chess::Move out;
    out.from = Square(m.from);
    out.to = Square(m.to);
    out.moved = L.piece[m.slot].type();
    if (m.captured_slot >= 0) {
        out.kind = chess::MoveKind::capture;
        out.captured = L.piece[m.captured_slot].type();
    }
    return out;
}

int material(const chess::Position& p, Color c)
{
    int total = 0;
    for (int i = 0; i < 64; ++i) {
        const Piece pc = p.piece_at(Square(i));
        if (!pc.empty() && pc.color() == c)
            total += piece_value(pc.type());
    }
    return total;
}

Color defender_of(const chess::Position& p)
{
    return material(p, Color::white) < material(p, Color::black) ? Color::white : Color::black;
}

std::vector<double> policy_weights(const MovePolicy& policy, const chess::Position& p,
                                   const std::vector<chess::Move>& moves)
{
    if (!policy)
        return std::vector<double>(moves.size(), 1.0 / static_cast<double>(moves.size()));
    auto w = policy(p, moves);
    if (w.size() != moves.size())
        throw std::invalid_argument("move policy returned " + std::to_string(w.size()) + " weights for " +
                                    std::to_string(moves.size()) + " moves in " + p.fen());
    double sum = 0;
    for (double x : w) {
        if (!(x >= 0))
            throw std::invalid_argument("move policy returned a negative weight in " + p.fen());
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("move policy weights sum to " + std::to_string(sum) + " in " + p.fen());
    return w;
}

// Mover-view ordering of adversarial outcomes: faster wins first, slower
// losses last among losses.
long outcome_rank(double mover_value, int dtm)
{
    if (mover_value > 0)
        return 1'000'000 - dtm;
    if (mover_value < 0)
        return -1'000'000 + dtm;
    return 0;
}

}  // namespace

// ---------------------------------------------------------------- spec

EndgameSpec EndgameSpec::parse(std::string_view text)
{
    const auto v = text.find('v');
    if (v == std::string_view::npos || text.find('v', v + 1) != std::string_view::npos)
        throw SpecError("endgame '" + std::string(text) + "': expected the form KQvK");
    EndgameSpec spec;
    for (const auto& [side, color] : {std::pair{text.substr(0, v), Color::white}, std::pair{text.substr(v + 1), Color::black}}) {
        if (side.empty() || side[0] != 'K')
            throw SpecError("endgame '" + std::string(text) + "': each side must start with K");
        for (char ch : side.substr(1)) {
            if (ch == 'P')
                throw SpecError("endgame '" + std::string(text) + "': pawns are not supported");
            const auto t = chess::piece_from_letter(ch);
            if (!t || *t == PieceType::king || *t == PieceType::pawn)
                throw SpecError("endgame '" + std::string(text) + "': unknown piece letter '" + ch + "'");
            spec.pieces.emplace_back(color, *t);
        }
    }
    std::stable_sort(spec.pieces.begin(), spec.pieces.end(), [](Piece a, Piece b) {
        if (a.color() != b.color())
            return a.color() == Color::white;
        return order_of(a.type()) < order_of(b.type());
    });
    return spec;
}

std::string EndgameSpec::str() const
{
    std::string out = "K";
    for (const Piece p : pieces)
        if (p.color() == Color::white)
            out += chess::piece_letter(p.type());
    out += "vK";
    for (const Piece p : pieces)
        if (p.color() == Color::black)
            out += chess::piece_letter(p.type());
    return out;
}

double EndgameSpec::estimated_states() const
{
    double n = 2;
    for (std::size_t i = 0; i < pieces.size() + 2; ++i)
        n *= static_cast<double>(64 - std::min<std::size_t>(i, 64));
    return n;
}

EndgameSpec EndgameSpec::without(std::size_t i) const
{
    EndgameSpec out = *this;
    out.pieces.erase(out.pieces.begin() + static_cast<std::ptrdiff_t>(i));
    return out;
}

bool EndgameSpec::insufficient() const
{
    return pieces.empty() ||
           (pieces.size() == 1 && (pieces[0].type() == PieceType::bishop || pieces[0].type() == PieceType::knight));
}

Color EndgameSpec::defender() const
{
    int white = 0;
    int black = 0;
    for (const Piece p : pieces)
        (p.color() == Color::white ? white : black) += piece_value(p.type());
    return white < black ? Color::white : Color::black;
}

std::string_view to_string(ModelKind k) { return k == ModelKind::adversarial ? "adversarial" : "stochastic"; }

// ---------------------------------------------------------------- state space

StateSpace::StateSpace(EndgameSpec spec, int max_pieces) : spec_(std::move(spec)), max_pieces_(max_pieces)
{
    const int n = static_cast<int>(spec_.pieces.size());
    char estimate[32];
    std::snprintf(estimate, sizeof estimate, "%.3g", spec_.estimated_states());
    if (n > max_pieces)
        throw GuardError(spec_.str() + ": about " + estimate + " states; the guard allows " +
                             std::to_string(max_pieces) + " non-king pieces",
                         spec_.estimated_states());
    if (2 * std::pow(64.0, n + 2) > static_cast<double>(max_index_space))
        throw GuardError(spec_.str() + ": about " + estimate + " states; dense tables stop at four men",
                         spec_.estimated_states());
    size_ = 2;
    for (int i = 0; i < n + 2; ++i)
        size_ *= 64;
}

bool StateSpace::legal(std::uint64_t index) const
{
    if (index >= size_)
        return false;
    const Layout L(spec_);
    return bellman::legal(L, decode(L, index));
}

chess::Position StateSpace::position(std::uint64_t index) const
{
    const Layout L(spec_);
    const Raw r = decode(L, index);
    std::array<Piece, 64> board{};
    for (int i = 0; i < L.n; ++i)
        board[static_cast<std::size_t>(r.sq[i])] = L.piece[i];
    auto p = chess::Position::from_placement(board, r.side);
    if (!p || !legal(index))
        throw std::logic_error("state " + std::to_string(index) + " of " + spec_.str() + " is not legal");
    return *p;
}

std::optional<std::uint64_t> StateSpace::index_of(const chess::Position& p) const
{
    const Layout L(spec_);
    Raw r;
    r.side = p.side_to_move();
    r.sq[0] = p.king_square(Color::white).index();
    r.sq[1] = p.king_square(Color::black).index();
    std::array<bool, max_slots> used{};
    for (int s = 0; s < 64; ++s) {
        const Piece pc = p.piece_at(Square(s));
        if (pc.empty() || pc.type() == PieceType::king)
            continue;
        int slot = -1;
        for (int i = 2; i < L.n && slot < 0; ++i)
            if (!used[i] && L.piece[i] == pc)
                slot = i;
        if (slot < 0)
            return std::nullopt;
        used[slot] = true;
        r.sq[slot] = s;
    }
    for (int i = 2; i < L.n; ++i)
        if (!used[i])
            return std::nullopt;
    return encode(L, r);
}

std::vector<std::uint64_t> enumerate_states(const StateSpace& space)
{
    const Layout L(space.spec());
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < space.index_space(); ++i)
        if (legal(L, decode(L, i)))
            out.push_back(i);
    return out;
}

// ---------------------------------------------------------------- tables

StateValue EndgameValueTable::at(std::uint64_t index) const
{
    return {value_.at(index), dtm_.empty() ? 0 : dtm_[index]};
}

bool EndgameValueTable::covers(const chess::Position& p) const
{
    if (const auto idx = space_->index_of(p))
        return space_->legal(*idx);
    for (const auto& [key, sub] : subtables_)
        if (sub->covers(p))
            return true;
    return false;
}

StateValue EndgameValueTable::value(const chess::Position& p) const
{
    if (const auto idx = space_->index_of(p); idx && space_->legal(*idx))
        return at(*idx);
    for (const auto& [key, sub] : subtables_)
        if (sub->covers(p))
            return sub->value(p);
    throw CoverageError("position " + p.fen() + " is not covered by the " + spec().str() + " table");
}

EndgameValueTable::Tally EndgameValueTable::tally() const
{
    Tally t;
    for (std::uint64_t i : states_) {
        const double v = value_[i];
        ++(v > 0 ? t.white_wins : v < 0 ? t.black_wins : t.draws);
    }
    return t;
}

int EndgameValueTable::max_dtm() const
{
    int best = 0;
    if (!dtm_.empty())
        for (std::uint64_t i : states_)
            best = std::max<int>(best, dtm_[i]);
    return best;
}

// Solver internals live here so they can fill the table's private fields.
class TableBuilder {
public:
    enum class Method { iteration, retrograde };

    static EndgameValueTable solve(const EndgameSpec& spec, const OpponentModel& model, const SolveOptions& opt,
                                   Method method)
    {
        EndgameValueTable t;
        t.space_ = std::make_shared<const StateSpace>(spec, opt.max_pieces);
        t.kind_ = model.kind;
        if (model.kind == ModelKind::stochastic)
            t.stochastic_side_ = model.stochastic_side.value_or(spec.defender());
        OpponentModel sub_model = model;
        sub_model.stochastic_side = t.stochastic_side_;
        for (std::size_t i = 0; i < spec.pieces.size(); ++i) {
            const EndgameSpec smaller = spec.without(i);
            const std::string key = smaller.str();
            if (!t.subtables_.count(key))
                t.subtables_[key] = std::make_shared<const EndgameValueTable>(solve(smaller, sub_model, opt, method));
        }

        Solver s(t, model, opt);
        if (method == Method::iteration)
            s.iterate();
        else
            s.retrograde();
        return t;
    }

    static double residual(const EndgameValueTable& t, int jobs)
    {
        OpponentModel model;
        model.kind = t.kind_;
        model.stochastic_side = t.stochastic_side_;
        model.policy = t.policy_for_residual_;
        SolveOptions opt;
        opt.jobs = jobs;
        Solver s(const_cast<EndgameValueTable&>(t), model, opt, /*fresh=*/false);
        return s.residual();
    }

    static void set_policy(EndgameValueTable& t, MovePolicy p) { t.policy_for_residual_ = std::move(p); }

    static EndgameValueTable assemble(std::shared_ptr<const StateSpace> space, ModelKind kind,
                                      std::optional<Color> side, int iterations, std::vector<std::uint64_t> states,
                                      std::vector<double> values, std::vector<std::uint16_t> dtm,
                                      std::map<std::string, std::shared_ptr<const EndgameValueTable>> subs)
    {
        EndgameValueTable t;
        t.space_ = std::move(space);
        t.kind_ = kind;
        t.stochastic_side_ = side;
        t.iterations_ = iterations;
        t.states_ = std::move(states);
        t.value_ = std::move(values);
        t.dtm_ = std::move(dtm);
        t.subtables_ = std::move(subs);
        return t;
    }

    static const std::vector<double>& values(const EndgameValueTable& t) { return t.value_; }
    static const std::vector<std::uint16_t>& dtms(const EndgameValueTable& t) { return t.dtm_; }

private:
    enum Status : std::uint8_t { illegal = 0, open = 1, terminal = 2 };

    struct SubRef {
        const EndgameValueTable* table = nullptr;
        std::optional<Layout> layout;
    };

    class Solver {
    public:
        Solver(EndgameValueTable& t, const OpponentModel& model, const SolveOptions& opt, bool fresh = true)
            : t_(t), L_(t.spec()), model_(model), opt_(opt), subs_(static_cast<std::size_t>(L_.n))
        {
            for (int j = 2; j < L_.n; ++j) {
                const EndgameSpec smaller = t.spec().without(static_cast<std::size_t>(j - 2));
                subs_[static_cast<std::size_t>(j)].table = t.subtables_.at(smaller.str()).get();
                subs_[static_cast<std::size_t>(j)].layout.emplace(smaller);
            }
            classify(fresh);
        }

        void iterate()
        {
            std::vector<double> next_v = t_.value_;
            std::vector<std::uint16_t> next_d = t_.dtm_;
            const bool adversarial = model_.kind == ModelKind::adversarial;
            for (int sweep = 1;; ++sweep) {
                if (sweep > opt_.max_sweeps)
                    throw ConvergenceError(t_.spec().str() + ": no fixed point after " +
                                           std::to_string(opt_.max_sweeps) + " sweeps");
                std::vector<double> change(static_cast<std::size_t>(std::max(opt_.jobs, 1)), 0.0);
                parallel_for(t_.states_.size(), opt_.jobs, [&](std::uint64_t b, std::uint64_t e, int w) {
                    double worst = 0;
                    for (std::uint64_t k = b; k < e; ++k) {
                        const std::uint64_t idx = t_.states_[k];
                        if (status_[idx] != open)
                            continue;
                        const auto [v, d] = backup(idx, t_.value_, t_.dtm_);
                        next_v[idx] = v;
                        if (adversarial) {
                            next_d[idx] = static_cast<std::uint16_t>(d);
                            if (v != t_.value_[idx] || d != t_.dtm_[idx])
                                worst = 1;
                        } else {
                            worst = std::max(worst, std::abs(v - t_.value_[idx]));
                        }
                    }
                    change[static_cast<std::size_t>(w)] = worst;
                });
                t_.value_.swap(next_v);
                t_.dtm_.swap(next_d);
                const double worst = *std::max_element(change.begin(), change.end());
                if (adversarial ? worst == 0 : worst <= opt_.tolerance) {
                    t_.iterations_ = sweep;
                    break;
                }
            }
            t_.policy_for_residual_ = model_.policy;
        }

        void retrograde()
        {
            std::vector<std::uint8_t> decided(status_.size(), 0);
            for (std::uint64_t idx : t_.states_)
                decided[idx] = status_[idx] == terminal;
            int max_external = 0;
            for (int j = 2; j < L_.n; ++j)
                max_external = std::max(max_external, subs_[static_cast<std::size_t>(j)].table->max_dtm());

            struct Assignment {
                std::uint64_t idx;
                double value;
                int dtm;
            };
            int stage = 1;
            for (;; ++stage) {
                std::vector<Assignment> found;
                for (std::uint64_t idx : t_.states_) {
                    if (decided[idx])
                        continue;
                    const Raw r = decode(L_, idx);
                    const int sign = chess::sign_of(r.side);
                    int best_win = std::numeric_limits<int>::max();
                    int worst_loss = -1;
                    bool all_lost = true;
                    for_each_move(L_, r, [&](const Raw& child, const MoveInfo& m) {
                        double v;
                        int d;
                        bool known;
                        if (m.captured_slot < 0) {
                            const std::uint64_t c = encode(L_, child);
                            known = decided[c];
                            v = t_.value_[c];
                            d = t_.dtm_[c];
                        } else {
                            std::tie(v, d) = external(child, m.captured_slot);
                            known = d < stage;
                        }
                        if (known && sign * v > 0)
                            best_win = std::min(best_win, d);
                        else if (known && sign * v < 0)
                            worst_loss = std::max(worst_loss, d);
                        else
                            all_lost = false;
                    });
                    if (best_win != std::numeric_limits<int>::max())
                        found.push_back({idx, static_cast<double>(sign), best_win + 1});
                    else if (all_lost)
                        found.push_back({idx, static_cast<double>(-sign), worst_loss + 1});
                }
                for (const auto& a : found) {
                    decided[a.idx] = 1;
                    t_.value_[a.idx] = a.value;
                    t_.dtm_[a.idx] = static_cast<std::uint16_t>(a.dtm);
                }
                if (found.empty() && stage > max_external)
                    break;
                if (stage > opt_.max_sweeps)
                    throw ConvergenceError(t_.spec().str() + ": retrograde staging did not finish");
            }
            t_.iterations_ = stage;
        }

        double residual()
        {
            std::vector<double> worst(static_cast<std::size_t>(std::max(opt_.jobs, 1)), 0.0);
            parallel_for(t_.states_.size(), opt_.jobs, [&](std::uint64_t b, std::uint64_t e, int w) {
                for (std::uint64_t k = b; k < e; ++k) {
                    const std::uint64_t idx = t_.states_[k];
                    if (status_[idx] != open)
                        continue;
                    const double v = backup(idx, t_.value_, t_.dtm_).first;
                    worst[static_cast<std::size_t>(w)] =
                        std::max(worst[static_cast<std::size_t>(w)], std::abs(v - t_.value_[idx]));
                }
            });
            return *std::max_element(worst.begin(), worst.end());
        }

    private:
        // Fills states, statuses and terminal values. A table read from disk
        // keeps its values; only statuses are recomputed.
        void classify(bool fresh)
        {
            const std::uint64_t size = t_.space_->index_space();
            status_.assign(size, illegal);
            if (fresh) {
                t_.states_.clear();
                t_.value_.assign(size, 0.0);
                if (model_.kind == ModelKind::adversarial)
                    t_.dtm_.assign(size, 0);
            }
            const bool dead = t_.spec().insufficient();
            for (std::uint64_t idx = 0; idx < size; ++idx) {
                const Raw r = decode(L_, idx);
                if (!legal(L_, r))
                    continue;
                if (fresh)
                    t_.states_.push_back(idx);
                bool any = false;
                if (!dead)
                    for_each_move(L_, r, [&](const Raw&, const MoveInfo&) { any = true; });
                if (any) {
                    status_[idx] = open;
                    continue;
                }
                status_[idx] = terminal;
                if (fresh && !dead && in_check(L_, r))
                    t_.value_[idx] = -chess::sign_of(r.side);
            }
            if (model_.kind == ModelKind::stochastic && model_.policy)
                precompute_weights();
        }

        void precompute_weights()
        {
            weight_begin_.assign(status_.size(), 0);
            for (std::uint64_t idx : t_.states_) {
                const Raw r = decode(L_, idx);
                if (status_[idx] != open || r.side != *t_.stochastic_side_)
                    continue;
                std::vector<chess::Move> moves;
                for_each_move(L_, r, [&](const Raw&, const MoveInfo& m) { moves.push_back(to_move(L_, m)); });
                const auto w = policy_weights(model_.policy, t_.space_->position(idx), moves);
                weight_begin_[idx] = weights_.size();
                weights_.insert(weights_.end(), w.begin(), w.end());
            }
        }

        std::pair<double, int> external(const Raw& child, int captured_slot) const
        {
            const SubRef& sub = subs_[static_cast<std::size_t>(captured_slot)];
            Raw compact;
            compact.side = child.side;
            int k = 0;
            for (int i = 0; i < L_.n; ++i)
                if (i != captured_slot)
                    compact.sq[k++] = child.sq[i];
            const std::uint64_t idx = encode(*sub.layout, compact);
            const StateValue sv = sub.table->at(idx);
            return {sv.value, sv.dtm};
        }

        std::pair<double, int> backup(std::uint64_t idx, const std::vector<double>& values,
                                      const std::vector<std::uint16_t>& dtm) const
        {
            const Raw r = decode(L_, idx);
            const int sign = chess::sign_of(r.side);
            auto lookup = [&](const Raw& child, const MoveInfo& m) -> std::pair<double, int> {
                if (m.captured_slot >= 0)
                    return external(child, m.captured_slot);
                const std::uint64_t c = encode(L_, child);
                return {values[c], dtm.empty() ? 0 : dtm[c]};
            };

            if (model_.kind == ModelKind::stochastic && r.side == *t_.stochastic_side_) {
                double total = 0;
                std::size_t count = 0;
                const double* w = model_.policy ? weights_.data() + weight_begin_[idx] : nullptr;
                for_each_move(L_, r, [&](const Raw& child, const MoveInfo& m) {
                    const double v = lookup(child, m).first;
                    total += w ? w[count] * v : v;
                    ++count;
                });
                return {w ? total : total / static_cast<double>(count), 0};
            }
            if (model_.kind == ModelKind::stochastic) {
                double best = -std::numeric_limits<double>::infinity();
                for_each_move(L_, r, [&](const Raw& child, const MoveInfo& m) {
                    best = std::max(best, sign * lookup(child, m).first);
                });
                return {sign * best, 0};
            }
            long best_rank = std::numeric_limits<long>::min();
            double best_v = 0;
            int best_d = 0;
            for_each_move(L_, r, [&](const Raw& child, const MoveInfo& m) {
                const auto [v, d] = lookup(child, m);
                const long rank = outcome_rank(sign * v, d);
                if (rank > best_rank) {
                    best_rank = rank;
                    best_v = v;
                    best_d = d;
                }
            });
            return {best_v, best_v != 0 ? best_d + 1 : 0};
        }

        EndgameValueTable& t_;
        Layout L_;
        OpponentModel model_;
        SolveOptions opt_;
        std::vector<SubRef> subs_;
        std::vector<std::uint8_t> status_;
        std::vector<std::uint64_t> weight_begin_;
        std::vector<double> weights_;
    };
};

EndgameValueTable value_iteration(const EndgameSpec& spec, const OpponentModel& model, const SolveOptions& options)
{
    return TableBuilder::solve(spec, model, options, TableBuilder::Method::iteration);
}

EndgameValueTable retrograde_solve(const EndgameSpec& spec, const SolveOptions& options)
{
    return TableBuilder::solve(spec, OpponentModel::adversarial(), options, TableBuilder::Method::retrograde);
}

double bellman_residual(const EndgameValueTable& table, int jobs) { return TableBuilder::residual(table, jobs); }

// ---------------------------------------------------------------- queries

std::optional<double> terminal_value(const chess::Position& p)
{
    if (p.insufficient_material())
        return 0.0;
    if (p.has_legal_move())
        return std::nullopt;
    return p.in_check() ? -chess::sign_of(p.side_to_move()) : 0.0;
}

namespace {

std::pair<double, int> successor_value(const EndgameValueTable& table, const chess::Position& s, const chess::Move& a)
{
    const chess::Position next = s.apply(a);
    if (const auto t = terminal_value(next))
        return {*t, 0};
    const StateValue v = table.value(next);
    return {v.value, v.dtm};
}

}  // namespace

double q_value(const EndgameValueTable& table, const chess::Position& s, const chess::Move& a)
{
    return chess::sign_of(s.side_to_move()) * successor_value(table, s, a).first;
}

chess::Move optimal_policy(const EndgameValueTable& table, const chess::Position& s)
{
    const auto moves = s.legal_moves();
    if (moves.empty() || terminal_value(s))
        throw std::logic_error("no move to choose in terminal position " + s.fen());
    const int sign = chess::sign_of(s.side_to_move());
    const bool adversarial = table.kind() == ModelKind::adversarial;

    std::optional<chess::Move> best;
    double best_q = 0;
    long best_rank = 0;
    std::string best_uci;
    for (const auto& m : moves) {
        const auto [v, d] = successor_value(table, s, m);
        const double q = sign * v;
        const long rank = outcome_rank(q, d);
        const std::string uci = m.uci();
        const bool better = !best || (adversarial ? rank > best_rank || (rank == best_rank && uci < best_uci)
                                                  : q > best_q || (q == best_q && uci < best_uci));
        if (better) {
            best = m;
            best_q = q;
            best_rank = rank;
            best_uci = uci;
        }
    }
    return *best;
}

double expectimax_value(const chess::Position& s, const OpponentModel& model, int depth)
{
    if (const auto t = terminal_value(s))
        return *t;
    if (depth <= 0)
        return 0.0;
    const Color random_side = model.stochastic_side.value_or(defender_of(s));
    const auto moves = s.legal_moves();
    if (model.kind == ModelKind::stochastic && s.side_to_move() == random_side) {
        const auto w = policy_weights(model.policy, s, moves);
        double total = 0;
        for (std::size_t i = 0; i < moves.size(); ++i)
            total += w[i] * expectimax_value(s.apply_unchecked(moves[i]), model, depth - 1);
        return total;
    }
    const int sign = chess::sign_of(s.side_to_move());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : moves)
        best = std::max(best, sign * expectimax_value(s.apply_unchecked(m), model, depth - 1));
    return sign * best;
}

// ---------------------------------------------------------------- files

namespace {

constexpr char magic[8] = {'S', 'A', 'C', 'S', 'T', 'B', '\0', '\1'};

template <class T>
void put(std::ostream& out, T v)
{
    unsigned char buf[sizeof(T)];
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>)
        bits = std::bit_cast<std::uint64_t>(static_cast<double>(v));
    else
        bits = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& in)
{
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw std::runtime_error("table file is truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>)
        return std::bit_cast<double>(bits);
    else
        return static_cast<T>(bits);
}

}  // namespace

void write_table(std::ostream& out, const EndgameValueTable& table)
{
    out.write(magic, sizeof magic);
    put<std::uint8_t>(out, table.kind() == ModelKind::adversarial ? 0 : 1);
    put<std::uint8_t>(out, table.stochastic_side() ? static_cast<std::uint8_t>(*table.stochastic_side()) : 255);
    const std::string spec = table.spec().str();
    put<std::uint16_t>(out, static_cast<std::uint16_t>(spec.size()));
    out.write(spec.data(), static_cast<std::streamsize>(spec.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(table.iteration_count()));
    put<std::uint64_t>(out, table.state_count());
    for (std::uint64_t idx : table.states()) {
        const StateValue v = table.at(idx);
        if (table.kind() == ModelKind::adversarial) {
            put<std::int8_t>(out, static_cast<std::int8_t>(v.value));
            put<std::uint16_t>(out, static_cast<std::uint16_t>(v.dtm));
        } else {
            put<double>(out, v.value);
        }
    }
    put<std::uint16_t>(out, static_cast<std::uint16_t>(table.subtables().size()));
    for (const auto& [key, sub] : table.subtables())
        write_table(out, *sub);
    if (!out)
        throw std::runtime_error("failed writing table file");
}

EndgameValueTable read_table(std::istream& in, int max_pieces)
{
    char head[sizeof magic];
    if (!in.read(head, sizeof head) || !std::equal(head, head + sizeof head, magic))
        throw std::runtime_error("not an endgame table file (bad magic)");
    const auto kind_byte = get<std::uint8_t>(in);
    const auto side_byte = get<std::uint8_t>(in);
    if (kind_byte > 1 || (side_byte > 1 && side_byte != 255))
        throw std::runtime_error("table file header is corrupt");
    const ModelKind kind = kind_byte == 0 ? ModelKind::adversarial : ModelKind::stochastic;
    std::optional<Color> side;
    if (side_byte != 255)
        side = static_cast<Color>(side_byte);
    std::string spec_text(get<std::uint16_t>(in), '\0');
    if (!in.read(spec_text.data(), static_cast<std::streamsize>(spec_text.size())))
        throw std::runtime_error("table file is truncated");
    EndgameSpec spec;
    try {
        spec = EndgameSpec::parse(spec_text);
    } catch (const SpecError& e) {
        throw std::runtime_error(std::string("table file header: ") + e.what());
    }
    const auto iterations = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);

    auto space = std::make_shared<const StateSpace>(spec, max_pieces);
    auto states = enumerate_states(*space);
    if (states.size() != count)
        throw std::runtime_error("table file holds " + std::to_string(count) + " states, " + spec.str() + " has " +
                                 std::to_string(states.size()));
    std::vector<double> values(space->index_space(), 0.0);
    std::vector<std::uint16_t> dtm;
    if (kind == ModelKind::adversarial)
        dtm.assign(space->index_space(), 0);
    for (std::uint64_t idx : states) {
        if (kind == ModelKind::adversarial) {
            values[idx] = get<std::int8_t>(in);
            dtm[idx] = get<std::uint16_t>(in);
        } else {
            values[idx] = get<double>(in);
        }
    }
    std::map<std::string, std::shared_ptr<const EndgameValueTable>> subs;
    for (int n = get<std::uint16_t>(in); n > 0; --n) {
        auto sub = std::make_shared<const EndgameValueTable>(read_table(in, max_pieces));
        subs[sub->spec().str()] = sub;
    }
    for (std::size_t i = 0; i < spec.pieces.size(); ++i)
        if (!subs.count(spec.without(i).str()))
            throw std::runtime_error("table file lacks the " + spec.without(i).str() + " subtable");
    return TableBuilder::assemble(std::move(space), kind, side, static_cast<int>(iterations), std::move(states),
                                  std::move(values), std::move(dtm), std::move(subs));
}

std::string summary(const EndgameValueTable& table, double residual)
{
    std::uint64_t white_to_move = 0;
    for (std::uint64_t idx : table.states())
        white_to_move += (idx & 1) == 0;
    const auto t = table.tally();
    const bool adversarial = table.kind() == ModelKind::adversarial;
    std::ostringstream out;
    out << "endgame " << table.spec().str() << " (" << to_string(table.kind());
    if (table.stochastic_side())
        out << ", " << chess::to_string(*table.stochastic_side()) << " plays uniformly at random";
    out << ")\n";
    out << "states: " << table.state_count() << " (white to move " << white_to_move << ", black to move "
        << table.state_count() - white_to_move << ")\n";
    if (adversarial)
        out << "white wins " << t.white_wins << ", draws " << t.draws << ", black wins " << t.black_wins << "\n";
    else
        out << "value > 0: " << t.white_wins << ", value = 0: " << t.draws << ", value < 0: " << t.black_wins << "\n";
    if (adversarial)
        out << "max distance to mate: " << table.max_dtm() << " plies\n";
    out << "sweeps: " << table.iteration_count() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", residual);
    out << "bellman residual: " << buf << "\n";
    out << "draws: stalemate and insufficient material only; the 50-move rule is not applied\n";
    return out.str();
}

}  // namespace sacscore::bellman
