#pragma once

// Referee for the hyperplane absolute and hyperplane potential games on R^d.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kbad/errors.hpp"

namespace kbad {

enum class GameKind { Absolute, Potential };

std::string to_string(GameKind kind);
GameKind parse_game_kind(const std::string& text);

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// {x : |<normal, x> - offset| < delta}. The label is the k column of the
// transcript file.
struct HyperplaneNeighborhood {
  std::vector<double> normal;
  double offset = 0.0;
  double delta = 0.0;
  int label = 0;

  double signed_distance(std::span<const double> x) const;
};

// Slab {x : |x_tau - offset| < delta}.
HyperplaneNeighborhood axis_slab(std::size_t dimension, std::size_t tau, double offset, double delta, int label = 0);

using AliceFamily = std::vector<HyperplaneNeighborhood>;

class GameTranscript {
 public:
  GameKind kind() const { return kind_; }
  double beta() const { return beta_; }
  std::optional<double> gamma() const { return gamma_; }
  std::size_t dimension() const { return balls_.front().center.size(); }

  const std::vector<Ball>& balls() const { return balls_; }
  const std::vector<AliceFamily>& alice_moves() const { return alice_; }
  const Ball& current_ball() const { return balls_.back(); }
  // Number of completed rounds (Alice move followed by Bob move).
  std::size_t rounds() const { return balls_.size() - 1; }

  bool alice_to_move() const { return !finished_ && alice_.size() < balls_.size(); }
  bool bob_to_move() const { return !finished_ && alice_.size() == balls_.size(); }
  bool finished() const { return finished_; }
  void finish() { finished_ = true; }

 private:
  friend GameTranscript new_game(GameKind, double, std::optional<double>, Ball);
  friend void alice_move(GameTranscript&, AliceFamily);
  friend void bob_move(GameTranscript&, Ball);
  GameKind kind_ = GameKind::Potential;
  double beta_ = 0.0;
  std::optional<double> gamma_;
  std::vector<Ball> balls_;
  std::vector<AliceFamily> alice_;
  bool finished_ = false;
};

// Throws ParameterOutOfRange: absolute needs 0 < beta < 1/3 and no gamma,
// potential needs 0 < beta < 1 and gamma > 0.
GameTranscript new_game(GameKind kind, double beta, std::optional<double> gamma, Ball b0);

// Throws WrongTurn or IllegalMove.
void alice_move(GameTranscript& t, AliceFamily family);
void bob_move(GameTranscript& t, Ball b);

// Checks a Bob ball against the current state without applying it.
std::optional<std::string> bob_move_violation(const GameTranscript& t, const Ball& b);

// sum_k (delta_k / (beta rho))^gamma, the potential budget used by a family.
double potential_budget_used(const AliceFamily& family, double beta, double rho, double gamma);

struct Outcome {
  std::vector<double> point;
  double radius_bound = 0.0;
};

// Throws WrongTurn before Bob's opening ball (never happens for a built transcript).
Outcome outcome(const GameTranscript& t);

struct InNeighborhood {
  std::size_t round;  // index i of the Alice move
  std::size_t index;  // position within the family
};
struct InTarget {};
struct Undetermined {};
using Verdict = std::variant<InNeighborhood, InTarget, Undetermined>;

bool alice_wins(const Verdict& v);
std::string describe(const Verdict& v);

// AliceWins(InNeighborhood) when the whole final ball lies inside an emitted
// neighborhood, AliceWins(InTarget) when the oracle accepts the outcome point,
// otherwise Undetermined.
Verdict win_check_potential(const GameTranscript& t, const std::function<bool(std::span<const double>)>& survivor_oracle);

// Alice's side of a game: maps the transcript (Alice to move) to a family.
class AliceStrategy {
 public:
  virtual ~AliceStrategy() = default;
  virtual AliceFamily respond(const GameTranscript& t) = 0;
};

// Always plays the empty move.
class EmptyStrategy final : public AliceStrategy {
 public:
  AliceFamily respond(const GameTranscript&) override { return {}; }
};

// Deletes the slab of maximal width through the ball center, normal e_tau
// with tau cycling through the coordinates. Legal in either game.
class CenterSlabStrategy final : public AliceStrategy {
 public:
  AliceFamily respond(const GameTranscript& t) override;
};

// Product of two factor strategies at parameter beta^2, acting on
// R^{d1 + d2} at parameter beta. Even Alice turns are played by factor 1 on
// the projected balls, odd turns by factor 2; each factor sees its own
// refereed game, so a projected play that is illegal for a factor throws.
class ProductStrategy final : public AliceStrategy {
 public:
  ProductStrategy(std::unique_ptr<AliceStrategy> first, std::size_t d1, std::unique_ptr<AliceStrategy> second,
                  std::size_t d2);
  AliceFamily respond(const GameTranscript& t) override;

  const std::optional<GameTranscript>& factor_game(int which) const { return which == 0 ? game1_ : game2_; }

 private:
  std::unique_ptr<AliceStrategy> s1_, s2_;
  std::size_t d1_, d2_;
  std::optional<GameTranscript> game1_, game2_;
};

std::unique_ptr<AliceStrategy> product_strategy(std::unique_ptr<AliceStrategy> first, std::size_t d1,
                                                std::unique_ptr<AliceStrategy> second, std::size_t d2);

// Transcript file:
//   GAME kind beta [gamma]
//   BOB c1,...,cd r
//   ALICE k (n1,...,nd) offset delta   (one line per neighborhood)
//   EMPTY
// Numbers use 17 significant digits.
void write_transcript(std::ostream& os, const GameTranscript& t);

struct TranscriptRecord {
  GameKind kind;
  double beta;
  std::optional<double> gamma;
  std::vector<Ball> balls;
  std::vector<AliceFamily> alice;
};

// Throws ParseError.
TranscriptRecord parse_transcript(std::istream& in);
TranscriptRecord load_transcript(const std::string& path);

// Re-validates every move through the referee. IllegalMove messages carry
// the round index.
GameTranscript replay(const TranscriptRecord& record);

std::string format_double(double v);

}  // namespace kbad
