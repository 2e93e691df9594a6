#include "kbad/game.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kbad {

namespace {

constexpr double kTol = 1e-12;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Relative to the ball scale, plus a few ulps of the coordinates so that
// tangent moves computed in floating point are not rejected.
double referee_tolerance(const Ball& b) {
  double m = 1.0;
  for (double x : b.center) m = std::fmax(m, std::fabs(x));
  return kTol * b.radius + 8 * std::numeric_limits<double>::epsilon() * m;
}

std::string num(double v) { return format_double(v); }

void check_ball(const Ball& b, std::size_t d) {
  if (b.center.size() != d) throw IllegalMove("ball has dimension " + std::to_string(b.center.size()) + ", expected " + std::to_string(d));
  if (!(b.radius > 0) || !std::isfinite(b.radius)) throw IllegalMove("radius must be positive, got " + num(b.radius));
  for (double c : b.center)
    if (!std::isfinite(c)) throw IllegalMove("ball center is not finite");
}

void check_neighborhood(const HyperplaneNeighborhood& h, std::size_t d) {
  if (h.normal.size() != d) throw IllegalMove("neighborhood normal has wrong dimension");
  if (std::fabs(norm2(h.normal) - 1.0) > kTol) throw IllegalMove("normal is not a unit vector: |n| = " + num(norm2(h.normal)));
  if (!(h.delta > 0) || !std::isfinite(h.delta)) throw IllegalMove("delta must be positive, got " + num(h.delta));
  if (!std::isfinite(h.offset)) throw IllegalMove("offset is not finite");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(GameKind kind) { return kind == GameKind::Absolute ? "absolute" : "potential"; }

GameKind parse_game_kind(const std::string& text) {
  if (text == "absolute") return GameKind::Absolute;
  if (text == "potential") return GameKind::Potential;
  throw ParseError("unknown game kind '" + text + "'");
}

double HyperplaneNeighborhood::signed_distance(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < normal.size(); ++i) s += normal[i] * x[i];
  return s - offset;
}

HyperplaneNeighborhood axis_slab(std::size_t dimension, std::size_t tau, double offset, double delta, int label) {
  HyperplaneNeighborhood h;
  h.normal.assign(dimension, 0.0);
  h.normal[tau] = 1.0;
  h.offset = offset;
  h.delta = delta;
  h.label = label;
  return h;
}

GameTranscript new_game(GameKind kind, double beta, std::optional<double> gamma, Ball b0) {
  if (kind == GameKind::Absolute) {
    if (!(beta > 0 && beta < 1.0 / 3.0)) throw ParameterOutOfRange("absolute game needs 0 < beta < 1/3, got " + num(beta));
    if (gamma) throw ParameterOutOfRange("absolute game takes no gamma");
  } else {
    if (!(beta > 0 && beta < 1)) throw ParameterOutOfRange("potential game needs 0 < beta < 1, got " + num(beta));
    if (!gamma || !(*gamma > 0)) throw ParameterOutOfRange("potential game needs gamma > 0");
  }
  if (b0.center.empty()) throw ParameterOutOfRange("opening ball has dimension 0");
  try {
    check_ball(b0, b0.center.size());
  } catch (const IllegalMove& e) {
    throw ParameterOutOfRange(e.detail());
  }
  GameTranscript t;
  t.kind_ = kind;
  t.beta_ = beta;
  t.gamma_ = gamma;
  t.balls_.push_back(std::move(b0));
  return t;
}

double potential_budget_used(const AliceFamily& family, double beta, double rho, double gamma) {
  double s = 0.0;
  for (const auto& h : family) s += std::pow(h.delta / (beta * rho), gamma);
  return s;
}

void alice_move(GameTranscript& t, AliceFamily family) {
  if (!t.alice_to_move()) throw WrongTurn("it is not Alice's turn");
  const std::size_t d = t.dimension();
  for (const auto& h : family) check_neighborhood(h, d);
  const double rho = t.current_ball().radius;
  const double cap = t.beta_ * rho;
  if (t.kind_ == GameKind::Absolute) {
    if (family.size() > 1) throw IllegalMove("absolute game allows one neighborhood per move, got " + std::to_string(family.size()));
    if (!family.empty() && family[0].delta > cap * (1 + kTol))
      throw IllegalMove("delta <= beta*rho violated: " + num(family[0].delta) + " > " + num(cap));
  } else {
    // Normalized so that the check keeps its meaning at tiny radii.
    const double used = potential_budget_used(family, t.beta_, rho, *t.gamma_);
    if (used > 1 + kTol) {
      double raw = 0.0;
      for (const auto& h : family) raw += std::pow(h.delta, *t.gamma_);
      throw IllegalMove("sum delta^gamma <= (beta*rho)^gamma violated: " + num(raw) + " > " +
                        num(std::pow(cap, *t.gamma_)));
    }
  }
  t.alice_.push_back(std::move(family));
}

std::optional<std::string> bob_move_violation(const GameTranscript& t, const Ball& b) {
  const Ball& cur = t.current_ball();
  try {
    check_ball(b, t.dimension());
  } catch (const IllegalMove& e) {
    return e.detail();
  }
  const double tol = referee_tolerance(cur);
  if (b.radius < t.beta() * cur.radius - tol)
    return "radius: " + num(b.radius) + " < beta*rho = " + num(t.beta() * cur.radius);
  const double shift = distance(b.center, cur.center);
  if (shift > cur.radius - b.radius + tol)
    return "containment: |c' - c| = " + num(shift) + " > rho - rho' = " + num(cur.radius - b.radius);
  if (t.kind() == GameKind::Absolute && !t.alice_moves().empty()) {
    for (const auto& h : t.alice_moves().back()) {
      const double dist = std::fabs(h.signed_distance(b.center));
      if (dist < h.delta + b.radius - tol)
        return "avoidance: distance to hyperplane " + num(dist) + " < delta + rho' = " + num(h.delta + b.radius);
    }
  }
  return std::nullopt;
}

void bob_move(GameTranscript& t, Ball b) {
  if (!t.bob_to_move()) throw WrongTurn("it is not Bob's turn");
  if (auto v = bob_move_violation(t, b)) throw IllegalMove(*v);
  t.balls_.push_back(std::move(b));
}

Outcome outcome(const GameTranscript& t) {
  if (t.balls().empty()) throw WrongTurn("no ball has been played");
  return {t.current_ball().center, t.current_ball().radius};
}

bool alice_wins(const Verdict& v) { return !std::holds_alternative<Undetermined>(v); }

std::string describe(const Verdict& v) {
  if (auto* n = std::get_if<InNeighborhood>(&v))
    return "AliceWins(InNeighborhood(" + std::to_string(n->round) + "," + std::to_string(n->index) + "))";
  if (std::holds_alternative<InTarget>(v)) return "AliceWins(InTarget)";
  return "Undetermined";
}

Verdict win_check_potential(const GameTranscript& t, const std::function<bool(std::span<const double>)>& survivor_oracle) {
  const Outcome o = outcome(t);
  for (std::size_t i = 0; i < t.alice_moves().size(); ++i) {
    const auto& family = t.alice_moves()[i];
    for (std::size_t k = 0; k < family.size(); ++k) {
      const auto& h = family[k];
      const double reach = std::fabs(h.signed_distance(o.point)) + o.radius_bound;
      if (reach < h.delta * (1 - 1e-12) - referee_tolerance({o.point, o.radius_bound})) return InNeighborhood{i, k};
    }
  }
  if (survivor_oracle && survivor_oracle(o.point)) return InTarget{};
  return Undetermined{};
}

AliceFamily CenterSlabStrategy::respond(const GameTranscript& t) {
  const Ball& b = t.current_ball();
  const std::size_t tau = t.alice_moves().size() % b.center.size();
  // The largest legal delta in both games is beta*rho.
  return {axis_slab(b.center.size(), tau, b.center[tau], t.beta() * b.radius)};
}

ProductStrategy::ProductStrategy(std::unique_ptr<AliceStrategy> first, std::size_t d1,
                                 std::unique_ptr<AliceStrategy> second, std::size_t d2)
    : s1_(std::move(first)), s2_(std::move(second)), d1_(d1), d2_(d2) {
  if (!s1_ || !s2_ || d1 == 0 || d2 == 0) throw std::invalid_argument("product strategy needs two factors of positive dimension");
}

AliceFamily ProductStrategy::respond(const GameTranscript& t) {
  if (t.dimension() != d1_ + d2_) throw std::invalid_argument("product strategy dimension mismatch");
  const std::size_t i = t.alice_moves().size();
  const bool first = i % 2 == 0;
  const std::size_t offset = first ? 0 : d1_;
  const std::size_t dim = first ? d1_ : d2_;
  const Ball& b = t.current_ball();
  Ball projected{std::vector<double>(b.center.begin() + static_cast<std::ptrdiff_t>(offset),
                                     b.center.begin() + static_cast<std::ptrdiff_t>(offset + dim)),
                 b.radius};
  auto& game = first ? game1_ : game2_;
  AliceStrategy& s = first ? *s1_ : *s2_;
  if (!game)
    game = new_game(t.kind(), t.beta() * t.beta(), t.gamma(), std::move(projected));
  else
    bob_move(*game, std::move(projected));
  AliceFamily factor = s.respond(*game);
  alice_move(*game, factor);
  AliceFamily lifted;
  for (auto& h : factor) {
    HyperplaneNeighborhood c;
    c.normal.assign(d1_ + d2_, 0.0);
    for (std::size_t j = 0; j < dim; ++j) c.normal[offset + j] = h.normal[j];
    c.offset = h.offset;
    c.delta = h.delta;
    c.label = h.label;
    lifted.push_back(std::move(c));
  }
  return lifted;
}

std::unique_ptr<AliceStrategy> product_strategy(std::unique_ptr<AliceStrategy> first, std::size_t d1,
                                                std::unique_ptr<AliceStrategy> second, std::size_t d2) {
  return std::make_unique<ProductStrategy>(std::move(first), d1, std::move(second), d2);
}

// ---- transcript files ----

namespace {

void write_ball(std::ostream& os, const Ball& b) {
  os << "BOB ";
  for (std::size_t j = 0; j < b.center.size(); ++j) os << (j ? "," : "") << num(b.center[j]);
  os << ' ' << num(b.radius) << '\n';
}

void write_family(std::ostream& os, const AliceFamily& f) {
  if (f.empty()) {
    os << "EMPTY\n";
    return;
  }
  for (const auto& h : f) {
    os << "ALICE " << h.label << " (";
    for (std::size_t j = 0; j < h.normal.size(); ++j) os << (j ? "," : "") << num(h.normal[j]);
    os << ") " << num(h.offset) << ' ' << num(h.delta) << '\n';
  }
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

std::vector<double> parse_vector(const std::string& s, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
  if (out.empty()) throw ParseError("line " + std::to_string(line) + ": empty vector");
  return out;
}

}  // namespace

void write_transcript(std::ostream& os, const GameTranscript& t) {
  os << "GAME " << to_string(t.kind()) << ' ' << num(t.beta());
  if (t.gamma()) os << ' ' << num(*t.gamma());
  os << '\n';
  for (std::size_t i = 0; i < t.balls().size(); ++i) {
    write_ball(os, t.balls()[i]);
    if (i < t.alice_moves().size()) write_family(os, t.alice_moves()[i]);
  }
}

TranscriptRecord parse_transcript(std::istream& in) {
  TranscriptRecord rec{};
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  bool in_family = false;  // consecutive ALICE lines form one move
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream ls(raw);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!have_header) {
      if (tag != "GAME") throw ParseError("line " + std::to_string(line_no) + ": expected GAME header");
      std::string kind, beta, gamma;
      ls >> kind >> beta;
      rec.kind = parse_game_kind(kind);
      rec.beta = parse_number(beta, line_no);
      if (ls >> gamma) rec.gamma = parse_number(gamma, line_no);
      have_header = true;
      continue;
    }
    if (tag == "BOB") {
      std::string c, r, extra;
      if (!(ls >> c >> r) || (ls >> extra)) throw ParseError("line " + std::to_string(line_no) + ": malformed BOB record");
      if (rec.alice.size() != rec.balls.size() && !rec.balls.empty())
        throw ParseError("line " + std::to_string(line_no) + ": BOB record out of turn");
      rec.balls.push_back({parse_vector(c, line_no), parse_number(r, line_no)});
      in_family = false;
    } else if (tag == "EMPTY" || tag == "ALICE") {
      if (rec.balls.empty()) throw ParseError("line " + std::to_string(line_no) + ": Alice moves before Bob's opening ball");
      if (tag == "EMPTY") {
        if (rec.alice.size() != rec.balls.size() - 1) throw ParseError("line " + std::to_string(line_no) + ": EMPTY out of turn");
        rec.alice.emplace_back();
        in_family = false;
        continue;
      }
      int k = 0;
      std::string normal, offset, delta, extra;
      if (!(ls >> k >> normal >> offset >> delta) || (ls >> extra) || normal.size() < 2 || normal.front() != '(' ||
          normal.back() != ')')
        throw ParseError("line " + std::to_string(line_no) + ": malformed ALICE record");
      HyperplaneNeighborhood h;
      h.label = k;
      h.normal = parse_vector(normal.substr(1, normal.size() - 2), line_no);
      h.offset = parse_number(offset, line_no);
      h.delta = parse_number(delta, line_no);
      if (!in_family) {
        if (rec.alice.size() != rec.balls.size() - 1) throw ParseError("line " + std::to_string(line_no) + ": ALICE out of turn");
        rec.alice.emplace_back();
        in_family = true;
      }
      rec.alice.back().push_back(std::move(h));
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw ParseError("empty transcript");
  if (rec.balls.empty()) throw ParseError("transcript has no BOB record");
  return rec;
}

TranscriptRecord load_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open transcript '" + path + "'");
  return parse_transcript(in);
}

GameTranscript replay(const TranscriptRecord& record) {
  GameTranscript t = new_game(record.kind, record.beta, record.gamma, record.balls.front());
  for (std::size_t i = 0; i < record.alice.size(); ++i) {
    try {
      alice_move(t, record.alice[i]);
      if (i + 1 < record.balls.size()) bob_move(t, record.balls[i + 1]);
    } catch (const IllegalMove& e) {
      throw IllegalMove("round " + std::to_string(i) + ": " + e.detail());
    }
  }
  return t;
}

}  // namespace kbad
