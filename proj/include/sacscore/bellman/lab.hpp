#pragma once

#include "sacscore/chess/position.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Exact values for small pawnless endgames. Values are from white's point of
// view: +1 white wins, 0 draw, -1 black wins. The only utilities are at
// terminal states (checkmate, stalemate, insufficient material); the 50-move
// rule is not modelled.
namespace sacscore::bellman {

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Refusal to build a state space over the configured size.
class GuardError : public std::runtime_error {
public:
    GuardError(const std::string& what, double estimated_states)
        : std::runtime_error(what), estimated_states_(estimated_states) {}
    double estimated_states() const { return estimated_states_; }

private:
    double estimated_states_;
};

/// Position outside the table or its capture subtables.
class CoverageError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int default_max_pieces = 2;

/// Material of a pawnless endgame, kings implied. Written "KQvK", "KRvKN".
struct EndgameSpec {
    /// Non-king pieces, white first, then by value (Q R B N).
    std::vector<chess::Piece> pieces;

    static EndgameSpec parse(std::string_view text);
    std::string str() const;

    /// Placements times side to move, before any legality filter.
    double estimated_states() const;
    /// Spec with pieces[i] removed.
    EndgameSpec without(std::size_t i) const;
    /// Neither side has mating material.
    bool insufficient() const;
    /// Side with less material (black on equal material).
    chess::Color defender() const;

    bool operator==(const EndgameSpec&) const = default;
};

/// Dense indexing of every placement of a spec. Index layout, least
/// significant first: side to move (1 bit), then 6 bits each for the white
/// king, the black king and pieces[0..n). Identical pieces are stored with
/// ascending squares, so permuted duplicates are never legal indices.
class StateSpace {
public:
    /// Throws GuardError when the spec has more than `max_pieces` non-king
    /// pieces or the dense index would not fit in memory.
    explicit StateSpace(EndgameSpec spec, int max_pieces = default_max_pieces);

    const EndgameSpec& spec() const { return spec_; }
    int max_pieces() const { return max_pieces_; }
    std::uint64_t index_space() const { return size_; }

    bool legal(std::uint64_t index) const;
    chess::Position position(std::uint64_t index) const;
    /// Index of `p` if it has exactly this material.
    std::optional<std::uint64_t> index_of(const chess::Position& p) const;

private:
    EndgameSpec spec_;
    int max_pieces_;
    std::uint64_t size_;
};

/// All legal states in ascending index order.
std::vector<std::uint64_t> enumerate_states(const StateSpace& space);

enum class ModelKind { adversarial, stochastic };

std::string_view to_string(ModelKind k);

/// Move probabilities for the stochastic side, in the order of `moves`.
using MovePolicy = std::function<std::vector<double>(const chess::Position&, const std::vector<chess::Move>&)>;

struct OpponentModel {
    ModelKind kind = ModelKind::adversarial;
    /// Side whose moves are drawn from `policy`; defaults to the spec's defender.
    std::optional<chess::Color> stochastic_side;
    /// Empty means uniform over legal moves.
    MovePolicy policy;

    static OpponentModel adversarial() { return {}; }
    static OpponentModel uniform(std::optional<chess::Color> side = std::nullopt)
    {
        return {ModelKind::stochastic, side, {}};
    }
};

struct StateValue {
    double value = 0;  // white's view
    int dtm = 0;       // plies to mate; 0 for draws and stochastic tables
};

struct SolveOptions {
    int max_pieces = default_max_pieces;
    int jobs = 1;
    int max_sweeps = 10000;
    /// Stochastic sweeps stop once no value moves by more than this.
    double tolerance = 1e-13;
};

class EndgameValueTable {
public:
    const StateSpace& space() const { return *space_; }
    const EndgameSpec& spec() const { return space_->spec(); }
    ModelKind kind() const { return kind_; }
    /// Side playing from the policy; nullopt for adversarial tables.
    std::optional<chess::Color> stochastic_side() const { return stochastic_side_; }
    int iteration_count() const { return iterations_; }

    std::uint64_t state_count() const { return states_.size(); }
    const std::vector<std::uint64_t>& states() const { return states_; }

    /// Value by dense index; the index must be legal.
    StateValue at(std::uint64_t index) const;
    /// Value of `p`, looking into capture subtables when the material is
    /// smaller. Throws CoverageError when no table has the material.
    StateValue value(const chess::Position& p) const;
    bool covers(const chess::Position& p) const;

    struct Tally {
        std::uint64_t white_wins = 0, draws = 0, black_wins = 0;
    };
    Tally tally() const;
    int max_dtm() const;

    /// Tables for the material left after a capture, keyed by spec string.
    const std::map<std::string, std::shared_ptr<const EndgameValueTable>>& subtables() const { return subtables_; }

private:
    friend class TableBuilder;
    std::shared_ptr<const StateSpace> space_;
    ModelKind kind_ = ModelKind::adversarial;
    std::optional<chess::Color> stochastic_side_;
    int iterations_ = 0;
    std::vector<std::uint64_t> states_;
    std::vector<double> value_;          // by dense index
    std::vector<std::uint16_t> dtm_;     // by dense index, adversarial only
    std::map<std::string, std::shared_ptr<const EndgameValueTable>> subtables_;
    MovePolicy policy_for_residual_;  // not stored in files
};

/// Jacobi value iteration from an all-zero start until a full sweep changes
/// nothing (adversarial) or nothing moves by more than the tolerance
/// (stochastic). Capture subtables are solved first with the same model.
EndgameValueTable value_iteration(const EndgameSpec& spec, const OpponentModel& model, const SolveOptions& options = {});

/// Adversarial table by staged retrograde sweeps: mates in 0, then every
/// state decided in exactly 1, 2, ... plies. Used as a checker for
/// value_iteration.
EndgameValueTable retrograde_solve(const EndgameSpec& spec, const SolveOptions& options = {});

/// Q(s,a) from the mover's view: terminal utility when `a` ends the game,
/// otherwise the stored value of the successor. Throws
/// chess::IllegalMoveError if `a` is illegal and CoverageError when the
/// successor is not tabulated.
double q_value(const EndgameValueTable& table, const chess::Position& s, const chess::Move& a);

/// argmax_a Q(s,a). Ties go to the faster win (or slower loss), then to the
/// smaller UCI string. Throws std::logic_error on terminal states.
chess::Move optimal_policy(const EndgameValueTable& table, const chess::Position& s);

/// max over non-terminal states of |V(s) - backup(s)|, where backup is the
/// best Q for the deciding side and the policy expectation for the
/// stochastic side.
double bellman_residual(const EndgameValueTable& table, int jobs = 1);

/// Depth-limited expectimax in white's view. Unresolved leaves count 0.
double expectimax_value(const chess::Position& s, const OpponentModel& model, int depth);

/// Rule-forced value of a terminal position (mate, stalemate, bare
/// material); nullopt otherwise.
std::optional<double> terminal_value(const chess::Position& p);

// Binary layout, little endian:
//   8 bytes  magic "SACSTB\0\1"
//   u8       model (0 adversarial, 1 stochastic)
//   u8       stochastic side (0 white, 1 black, 255 none)
//   u16      spec length, then the spec text ("KQvK")
//   u32      iteration count
//   u64      state count
//   records  one per legal state in ascending index order:
//            adversarial i8 value + u16 dtm, stochastic f64 value
//   u16      subtable count, then each subtable in the same layout
void write_table(std::ostream& out, const EndgameValueTable& table);
/// Throws std::runtime_error on a malformed or truncated file.
EndgameValueTable read_table(std::istream& in, int max_pieces = default_max_pieces);

/// Human-readable summary: counts, tallies, max DTM, residual.
std::string summary(const EndgameValueTable& table, double residual);

}  // namespace sacscore::bellman
