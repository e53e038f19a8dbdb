#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latfold/errors.hpp"

namespace latfold {

class InteractionMatrix;

enum class LatticeKind { Cubic, Planar };

struct Vec3 {
  int x = 0, y = 0, z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend bool operator==(Vec3, Vec3) = default;
  friend auto operator<=>(Vec3, Vec3) = default;

  int l1() const { return std::abs(x) + std::abs(y) + std::abs(z); }
};

/// The six lattice directions; the planar lattice uses only the first four.
enum class Direction : int { PlusX, MinusX, PlusY, MinusY, PlusZ, MinusZ };

Vec3 direction_step(Direction d);
int direction_count(LatticeKind kind);
const char* direction_name(Direction d);

/// Bits per encoded turn: 3 on the cubic lattice, 2 on the planar one.
int turn_bit_width(LatticeKind kind);

/// Free solution-string bits for an n-residue fold: the first turn is fixed
/// and the second is restricted to one bit, so 3n-8 (cubic) or 2n-5 (planar).
int free_bit_count(LatticeKind kind, int n);

/// Decode one turn code. Returns nullopt for the two cubic codes (000, 011)
/// that name no direction. Throws WidthMismatchError on wrong bit count.
std::optional<Direction> decode_turn(std::span<const std::uint8_t> bits,
                                     LatticeKind kind);

/// Inverse of decode_turn for valid directions.
std::vector<std::uint8_t> encode_turn(Direction d, LatticeKind kind);

struct Fold {
  std::string sequence;
  std::vector<Vec3> coords;

  int size() const { return static_cast<int>(coords.size()); }
  bool connected() const;
  bool self_avoiding() const;
  bool valid() const { return connected() && self_avoiding(); }
};

/// Build the fold for a free-bit string q (length 3n-8 / 2n-5): anchored at
/// the origin, first step +x, second step +x or +y depending on q0, the rest
/// decoded one turn code at a time. Throws InvalidTurnError on 000/011.
Fold fold_from_bits(std::span<const std::uint8_t> q, const std::string& sequence,
                    LatticeKind kind);

/// Turn sequence of a fold (first turn must be +x, second +x or +y).
std::vector<Direction> fold_turns(const Fold& fold);

/// Free-bit string of a symmetry-fixed fold; inverse of fold_from_bits.
std::vector<std::uint8_t> bits_for_fold(const Fold& fold, LatticeKind kind);

struct Contact {
  int i = 0, j = 0;
  double energy = 0.0;
};

/// Contact energy: sum of P(i,j) over pairs at lattice distance 1 with
/// |i-j| >= 3. Throws InvalidFoldError if the fold is disconnected or
/// self-intersecting.
double fold_energy(const Fold& fold, const InteractionMatrix& P);
std::vector<Contact> fold_contacts(const Fold& fold, const InteractionMatrix& P);

struct SawOptions {
  int cubic_cap = 12;
  int planar_cap = 14;
  bool parallel = true;
};

struct SawResult {
  double min_energy = 0.0;
  std::vector<Fold> minimizers;          // lexicographic by turn sequence
  std::uint64_t walk_count = 0;          // symmetry-fixed self-avoiding walks
  std::uint64_t straight_second = 0;     // walks whose second turn is +x
  std::uint64_t bent_second = 0;         // walks whose second turn is +y
};

/// Exact ground-truth search: enumerate every symmetry-fixed self-avoiding
/// walk (first turn +x, second turn in {+x,+y}) and keep all minimizers.
SawResult saw_enumerate(const std::string& sequence, const InteractionMatrix& P,
                        LatticeKind kind, const SawOptions& options = {});

/// Single-threaded reference implementation, kept for testing.
SawResult saw_enumerate_serial(const std::string& sequence,
                               const InteractionMatrix& P, LatticeKind kind,
                               const SawOptions& options = {});

/// Self-avoiding walks of n-1 steps with no symmetry fixing at all.
std::uint64_t count_unrestricted_walks(int n, LatticeKind kind);

/// Canonical representative under lattice symmetry: translate residue 0 to
/// the origin and pick the lexicographically smallest image over the 24
/// proper rotations (cubic) or the 8 dihedral symmetries (planar).
std::vector<Vec3> canonical_coords(std::span<const Vec3> coords, LatticeKind kind);

/// All proper rotation images (used by tests).
std::vector<std::array<int, 9>> rotation_matrices(LatticeKind kind);
Vec3 apply_rotation(const std::array<int, 9>& m, Vec3 v);

/// Fold record rendering: text and JSON carry identical content.
std::string fold_record_text(const Fold& fold, const InteractionMatrix& P);
std::string fold_record_json(const Fold& fold, const InteractionMatrix& P);
std::vector<Fold> parse_fold_records(std::istream& is);
std::string fold_svg(const Fold& fold, const InteractionMatrix& P);

}  // namespace latfold
