#include "latfold/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "latfold/polynomial.hpp"
#include "latfold/potentials.hpp"

namespace latfold {

Vec3 direction_step(Direction d) {
  switch (d) {
    case Direction::PlusX: return {1, 0, 0};
    case Direction::MinusX: return {-1, 0, 0};
    case Direction::PlusY: return {0, 1, 0};
    case Direction::MinusY: return {0, -1, 0};
    case Direction::PlusZ: return {0, 0, 1};
    case Direction::MinusZ: return {0, 0, -1};
  }
  return {};
}

int direction_count(LatticeKind kind) {
  return kind == LatticeKind::Cubic ? 6 : 4;
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::PlusX: return "+x";
    case Direction::MinusX: return "-x";
    case Direction::PlusY: return "+y";
    case Direction::MinusY: return "-y";
    case Direction::PlusZ: return "+z";
    case Direction::MinusZ: return "-z";
  }
  return "?";
}

int turn_bit_width(LatticeKind kind) {
  return kind == LatticeKind::Cubic ? 3 : 2;
}

int free_bit_count(LatticeKind kind, int n) {
  return 1 + turn_bit_width(kind) * (n - 3);
}

std::optional<Direction> decode_turn(std::span<const std::uint8_t> bits,
                                     LatticeKind kind) {
  if (static_cast<int>(bits.size()) != turn_bit_width(kind)) {
    throw WidthMismatchError("turn code has " + std::to_string(bits.size()) +
                             " bits, expected " +
                             std::to_string(turn_bit_width(kind)));
  }
  if (kind == LatticeKind::Cubic) {
    int code = bits[0] << 2 | bits[1] << 1 | bits[2];
    switch (code) {
      case 0b101: return Direction::PlusX;
      case 0b110: return Direction::MinusX;
      case 0b001: return Direction::PlusY;
      case 0b010: return Direction::MinusY;
      case 0b111: return Direction::PlusZ;
      case 0b100: return Direction::MinusZ;
      default: return std::nullopt;  // 000, 011
    }
  }
  int code = bits[0] << 1 | bits[1];
  switch (code) {
    case 0b00: return Direction::PlusX;
    case 0b01: return Direction::PlusY;
    case 0b10: return Direction::MinusX;
    default: return Direction::MinusY;
  }
}

std::vector<std::uint8_t> encode_turn(Direction d, LatticeKind kind) {
  if (kind == LatticeKind::Cubic) {
    switch (d) {
      case Direction::PlusX: return {1, 0, 1};
      case Direction::MinusX: return {1, 1, 0};
      case Direction::PlusY: return {0, 0, 1};
      case Direction::MinusY: return {0, 1, 0};
      case Direction::PlusZ: return {1, 1, 1};
      case Direction::MinusZ: return {1, 0, 0};
    }
  }
  switch (d) {
    case Direction::PlusX: return {0, 0};
    case Direction::PlusY: return {0, 1};
    case Direction::MinusX: return {1, 0};
    case Direction::MinusY: return {1, 1};
    default:
      throw InvalidTurnError("direction not representable on a planar lattice");
  }
}

bool Fold::connected() const {
  for (std::size_t i = 1; i < coords.size(); ++i) {
    if ((coords[i] - coords[i - 1]).l1() != 1) return false;
  }
  return true;
}

bool Fold::self_avoiding() const {
  std::vector<Vec3> sorted = coords;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Fold fold_from_bits(std::span<const std::uint8_t> q, const std::string& sequence,
                    LatticeKind kind) {
  const int n = static_cast<int>(sequence.size());
  const int width = turn_bit_width(kind);
  if (static_cast<int>(q.size()) != free_bit_count(kind, n)) {
    throw WidthMismatchError("expected " +
                             std::to_string(free_bit_count(kind, n)) +
                             " free bits for " + std::to_string(n) +
                             " residues, got " + std::to_string(q.size()));
  }
  Fold fold;
  fold.sequence = sequence;
  fold.coords.reserve(n);
  fold.coords.push_back({0, 0, 0});
  fold.coords.push_back({1, 0, 0});  // fixed first turn
  if (n >= 3) {
    Direction second = q[0] ? Direction::PlusX : Direction::PlusY;
    fold.coords.push_back(fold.coords.back() + direction_step(second));
  }
  for (int j = 2; j <= n - 2; ++j) {
    auto group = q.subspan(1 + static_cast<std::size_t>(width) * (j - 2), width);
    auto dir = decode_turn(group, kind);
    if (!dir) {
      throw InvalidTurnError("turn " + std::to_string(j) +
                             " uses an invalid bit string");
    }
    fold.coords.push_back(fold.coords.back() + direction_step(*dir));
  }
  return fold;
}

std::vector<Direction> fold_turns(const Fold& fold) {
  std::vector<Direction> turns;
  for (std::size_t i = 1; i < fold.coords.size(); ++i) {
    Vec3 d = fold.coords[i] - fold.coords[i - 1];
    bool found = false;
    for (int k = 0; k < 6; ++k) {
      if (direction_step(static_cast<Direction>(k)) == d) {
        turns.push_back(static_cast<Direction>(k));
        found = true;
        break;
      }
    }
    if (!found) throw InvalidFoldError("fold is not a unit-step walk");
  }
  return turns;
}

std::vector<std::uint8_t> bits_for_fold(const Fold& fold, LatticeKind kind) {
  auto turns = fold_turns(fold);
  if (turns.empty() || turns[0] != Direction::PlusX) {
    throw InvalidFoldError("fold is not symmetry-fixed: first turn must be +x");
  }
  std::vector<std::uint8_t> bits;
  if (turns.size() >= 2) {
    if (turns[1] == Direction::PlusX) {
      bits.push_back(1);
    } else if (turns[1] == Direction::PlusY) {
      bits.push_back(0);
    } else {
      throw InvalidFoldError("fold is not symmetry-fixed: second turn must be +x or +y");
    }
  }
  for (std::size_t j = 2; j < turns.size(); ++j) {
    auto code = encode_turn(turns[j], kind);
    bits.insert(bits.end(), code.begin(), code.end());
  }
  return bits;
}

std::vector<Contact> fold_contacts(const Fold& fold, const InteractionMatrix& P) {
  if (!fold.valid()) throw InvalidFoldError("fold is disconnected or overlaps");
  std::vector<Contact> out;
  const int n = fold.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 3; j < n; ++j) {
      if ((fold.coords[j] - fold.coords[i]).l1() == 1) {
        double e = P.at(i, j);
        if (e != 0.0) out.push_back({i, j, e});
      }
    }
  }
  return out;
}

double fold_energy(const Fold& fold, const InteractionMatrix& P) {
  double e = 0.0;
  for (const Contact& c : fold_contacts(fold, P)) e += c.energy;
  return e;
}

namespace {

// Plain contact-energy sum over coordinates that are already known to form
// a self-avoiding unit-step walk (enumeration inner loop).
double walk_energy(std::span<const Vec3> coords, const InteractionMatrix& P) {
  double e = 0.0;
  const int n = static_cast<int>(coords.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 3; j < n; j += 2) {
      if (P.at(i, j) != 0.0 && (coords[j] - coords[i]).l1() == 1) e += P.at(i, j);
    }
  }
  return e;
}

bool hits_earlier(std::span<const Vec3> coords, Vec3 next) {
  for (const Vec3& c : coords) {
    if (c == next) return true;
  }
  return false;
}

struct EnumState {
  double min_energy = 0.0;
  bool any = false;
  std::vector<std::vector<Direction>> min_turns;
  std::uint64_t walks = 0;
  std::uint64_t straight_second = 0;
  std::uint64_t bent_second = 0;
};

void dfs(std::vector<Vec3>& coords, std::vector<Direction>& turns, int n,
         LatticeKind kind, const InteractionMatrix& P, EnumState& st) {
  if (static_cast<int>(coords.size()) == n) {
    st.walks++;
    if (turns.size() >= 2) {
      if (turns[1] == Direction::PlusX) st.straight_second++;
      if (turns[1] == Direction::PlusY) st.bent_second++;
    }
    double e = walk_energy(coords, P);
    if (!st.any || e < st.min_energy - kValueTol) {
      st.min_energy = e;
      st.any = true;
      st.min_turns.clear();
      st.min_turns.push_back(turns);
    } else if (std::abs(e - st.min_energy) <= kValueTol) {
      if (e < st.min_energy) st.min_energy = e;
      st.min_turns.push_back(turns);
    }
    return;
  }
  const int ndir = direction_count(kind);
  std::size_t depth = coords.size();
  bool second = depth == 2;
  for (int k = 0; k < ndir; ++k) {
    Direction d = static_cast<Direction>(k);
    if (second && d != Direction::PlusX && d != Direction::PlusY) continue;
    Vec3 next = coords.back() + direction_step(d);
    if (hits_earlier(coords, next)) continue;
    coords.push_back(next);
    turns.push_back(d);
    dfs(coords, turns, n, kind, P, st);
    coords.pop_back();
    turns.pop_back();
  }
}

Fold fold_from_turns(const std::string& sequence,
                     const std::vector<Direction>& turns) {
  Fold f;
  f.sequence = sequence;
  f.coords.push_back({0, 0, 0});
  for (Direction d : turns) f.coords.push_back(f.coords.back() + direction_step(d));
  return f;
}

SawResult finish(const std::string& sequence, const InteractionMatrix& P,
                 EnumState st) {
  std::sort(st.min_turns.begin(), st.min_turns.end());
  SawResult out;
  out.min_energy = st.any ? st.min_energy : 0.0;
  out.walk_count = st.walks;
  out.straight_second = st.straight_second;
  out.bent_second = st.bent_second;
  for (const auto& turns : st.min_turns) {
    Fold f = fold_from_turns(sequence, turns);
    // re-derive the exact energy so ties collected at tolerance stay honest
    if (std::abs(fold_energy(f, P) - out.min_energy) <= kValueTol) {
      out.minimizers.push_back(std::move(f));
    }
  }
  return out;
}

void check_cap(int n, LatticeKind kind, const SawOptions& options) {
  int cap = kind == LatticeKind::Cubic ? options.cubic_cap : options.planar_cap;
  if (n > cap) {
    throw TooLargeError("sequence of length " + std::to_string(n) +
                        " exceeds the enumeration cap " + std::to_string(cap));
  }
}

}  // namespace

SawResult saw_enumerate_serial(const std::string& sequence,
                               const InteractionMatrix& P, LatticeKind kind,
                               const SawOptions& options) {
  const int n = static_cast<int>(sequence.size());
  check_cap(n, kind, options);
  EnumState st;
  std::vector<Vec3> coords{{0, 0, 0}, {1, 0, 0}};
  std::vector<Direction> turns{Direction::PlusX};
  if (n <= 2) {
    st.walks = 1;
    st.any = true;
    st.min_turns.push_back(turns);
    if (n == 1) {
      st.min_turns.back().clear();
    }
    return finish(sequence, P, std::move(st));
  }
  dfs(coords, turns, n, kind, P, st);
  return finish(sequence, P, std::move(st));
}

SawResult saw_enumerate(const std::string& sequence, const InteractionMatrix& P,
                        LatticeKind kind, const SawOptions& options) {
  const int n = static_cast<int>(sequence.size());
  check_cap(n, kind, options);
  if (!options.parallel || n < 7) return saw_enumerate_serial(sequence, P, kind, options);

  // Expand every symmetry-fixed prefix of 3 turns, then search the tails in
  // parallel and merge deterministically.
  struct Prefix {
    std::vector<Vec3> coords;
    std::vector<Direction> turns;
  };
  std::vector<Prefix> prefixes;
  {
    std::vector<Vec3> coords{{0, 0, 0}, {1, 0, 0}};
    std::vector<Direction> turns{Direction::PlusX};
    for (Direction d2 : {Direction::PlusX, Direction::PlusY}) {
      Vec3 p2 = coords.back() + direction_step(d2);
      for (int k = 0; k < direction_count(kind); ++k) {
        Direction d3 = static_cast<Direction>(k);
        Vec3 p3 = p2 + direction_step(d3);
        if (p3 == coords.back() || p3 == coords.front() || p3 == p2) continue;
        Prefix pre;
        pre.coords = {coords[0], coords[1], p2, p3};
        pre.turns = {Direction::PlusX, d2, d3};
        prefixes.push_back(std::move(pre));
      }
    }
  }

  std::vector<EnumState> parts(prefixes.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    std::vector<Vec3> coords = prefixes[i].coords;
    std::vector<Direction> turns = prefixes[i].turns;
    dfs(coords, turns, n, kind, P, parts[i]);
  }

  EnumState merged;
  for (EnumState& part : parts) {
    merged.walks += part.walks;
    merged.straight_second += part.straight_second;
    merged.bent_second += part.bent_second;
    if (!part.any) continue;
    if (!merged.any || part.min_energy < merged.min_energy - kValueTol) {
      merged.min_energy = part.min_energy;
      merged.any = true;
      merged.min_turns = std::move(part.min_turns);
    } else if (std::abs(part.min_energy - merged.min_energy) <= kValueTol) {
      merged.min_energy = std::min(merged.min_energy, part.min_energy);
      merged.min_turns.insert(merged.min_turns.end(),
                              std::make_move_iterator(part.min_turns.begin()),
                              std::make_move_iterator(part.min_turns.end()));
    }
  }
  return finish(sequence, P, std::move(merged));
}

namespace {

std::uint64_t count_walks_from(std::vector<Vec3>& coords, int n, LatticeKind kind) {
  if (static_cast<int>(coords.size()) == n) return 1;
  std::uint64_t total = 0;
  for (int k = 0; k < direction_count(kind); ++k) {
    Vec3 next = coords.back() + direction_step(static_cast<Direction>(k));
    if (hits_earlier(coords, next)) continue;
    coords.push_back(next);
    total += count_walks_from(coords, n, kind);
    coords.pop_back();
  }
  return total;
}

}  // namespace

std::uint64_t count_unrestricted_walks(int n, LatticeKind kind) {
  std::vector<Vec3> coords{{0, 0, 0}};
  return count_walks_from(coords, n, kind);
}

std::vector<std::array<int, 9>> rotation_matrices(LatticeKind kind) {
  std::vector<std::array<int, 9>> out;
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& perm : perms) {
    for (int signs = 0; signs < 8; ++signs) {
      std::array<int, 9> m{};
      for (int r = 0; r < 3; ++r) {
        m[static_cast<std::size_t>(r) * 3 + perm[r]] = (signs >> r & 1) ? -1 : 1;
      }
      // determinant of a signed permutation matrix
      int det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                m[1] * (m[3] * m[8] - m[5] * m[6]) +
                m[2] * (m[3] * m[7] - m[4] * m[6]);
      if (kind == LatticeKind::Cubic) {
        if (det == 1) out.push_back(m);
      } else {
        // planar: z fixed, any dihedral image in the xy plane
        bool z_fixed = m[8] == 1 && m[2] == 0 && m[5] == 0 && m[6] == 0 && m[7] == 0;
        if (z_fixed) out.push_back(m);
      }
    }
  }
  return out;
}

Vec3 apply_rotation(const std::array<int, 9>& m, Vec3 v) {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

std::vector<Vec3> canonical_coords(std::span<const Vec3> coords, LatticeKind kind) {
  static const std::vector<std::array<int, 9>> cubic = rotation_matrices(LatticeKind::Cubic);
  static const std::vector<std::array<int, 9>> planar = rotation_matrices(LatticeKind::Planar);
  const auto& mats = kind == LatticeKind::Cubic ? cubic : planar;
  std::vector<Vec3> best;
  for (const auto& m : mats) {
    std::vector<Vec3> image;
    image.reserve(coords.size());
    for (const Vec3& c : coords) image.push_back(apply_rotation(m, c - coords[0]));
    if (best.empty() || image < best) best = std::move(image);
  }
  return best;
}

namespace {

std::string coeff_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string fold_record_text(const Fold& fold, const InteractionMatrix& P) {
  std::ostringstream os;
  os << "fold " << fold.sequence << '\n';
  os << "coords";
  for (const Vec3& c : fold.coords) os << ' ' << c.x << ',' << c.y << ',' << c.z;
  os << '\n';
  os << "energy " << coeff_str(fold_energy(fold, P)) << '\n';
  for (const Contact& c : fold_contacts(fold, P)) {
    os << "contact " << c.i << ' ' << c.j << ' ' << coeff_str(c.energy) << '\n';
  }
  os << "end\n";
  return os.str();
}

std::string fold_record_json(const Fold& fold, const InteractionMatrix& P) {
  std::ostringstream os;
  os << "{\"sequence\":\"" << fold.sequence << "\",\"coords\":[";
  for (std::size_t i = 0; i < fold.coords.size(); ++i) {
    const Vec3& c = fold.coords[i];
    os << (i ? "," : "") << '[' << c.x << ',' << c.y << ',' << c.z << ']';
  }
  os << "],\"energy\":" << coeff_str(fold_energy(fold, P)) << ",\"contacts\":[";
  auto contacts = fold_contacts(fold, P);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    os << (i ? "," : "") << '[' << contacts[i].i << ',' << contacts[i].j << ','
       << coeff_str(contacts[i].energy) << ']';
  }
  os << "]}";
  return os.str();
}

std::vector<Fold> parse_fold_records(std::istream& is) {
  std::vector<Fold> out;
  std::string line;
  Fold current;
  bool open = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "fold") {
      current = Fold{};
      ls >> current.sequence;
      open = true;
    } else if (tag == "coords" && open) {
      std::string triple;
      while (ls >> triple) {
        Vec3 v;
        if (std::sscanf(triple.c_str(), "%d,%d,%d", &v.x, &v.y, &v.z) != 3) {
          throw FormatError("bad coordinate triple: " + triple);
        }
        current.coords.push_back(v);
      }
    } else if (tag == "end" && open) {
      out.push_back(current);
      open = false;
    }
    // energy / contact lines are derived content; recomputed on demand
  }
  return out;
}

std::string fold_svg(const Fold& fold, const InteractionMatrix& P) {
  // Projection: x right, y up, z as a small diagonal offset.
  auto px = [](Vec3 c) { return 60.0 + 40.0 * c.x + 14.0 * c.z; };
  auto py = [&fold](Vec3 c) {
    (void)fold;
    return 260.0 - 40.0 * c.y - 14.0 * c.z;
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"320\">\n";
  auto contacts = fold_contacts(fold, P);
  for (const Contact& c : contacts) {
    os << "  <line x1=\"" << px(fold.coords[c.i]) << "\" y1=\"" << py(fold.coords[c.i])
       << "\" x2=\"" << px(fold.coords[c.j]) << "\" y2=\"" << py(fold.coords[c.j])
       << "\" stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"5,4\"/>\n";
  }
  for (std::size_t i = 1; i < fold.coords.size(); ++i) {
    os << "  <line x1=\"" << px(fold.coords[i - 1]) << "\" y1=\"" << py(fold.coords[i - 1])
       << "\" x2=\"" << px(fold.coords[i]) << "\" y2=\"" << py(fold.coords[i])
       << "\" stroke=\"#2c3e50\" stroke-width=\"3\"/>\n";
  }
  for (std::size_t i = 0; i < fold.coords.size(); ++i) {
    char res = fold.sequence[i];
    const char* fill = res == 'H' ? "#34495e" : "#ecf0f1";
    const char* text = res == 'H' ? "#ffffff" : "#2c3e50";
    os << "  <circle cx=\"" << px(fold.coords[i]) << "\" cy=\"" << py(fold.coords[i])
       << "\" r=\"13\" fill=\"" << fill << "\" stroke=\"#2c3e50\"/>\n";
    os << "  <text x=\"" << px(fold.coords[i]) << "\" y=\"" << py(fold.coords[i]) + 4
       << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"" << text << "\">" << res
       << i << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace latfold
