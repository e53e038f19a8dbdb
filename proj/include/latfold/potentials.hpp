#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "latfold/errors.hpp"

namespace latfold {

enum class PotentialKind { HP, MJ };

/// Symmetric residue-residue contact energies. The HP table scores only
/// H-H contacts (-1); an MJ table covers all 210 unordered pairs of the
/// 20 standard one-letter codes.
class PotentialTable {
 public:
  static PotentialTable hp();
  /// Rows `A C -3.57`, `#` comments. Validates symmetry and completeness.
  static PotentialTable load_mj(std::istream& is);
  static PotentialTable load_mj_file(const std::string& path);

  PotentialKind kind() const { return kind_; }
  bool has_residue(char a) const;
  double energy(char a, char b) const;  // throws UnknownResidueError

 private:
  PotentialKind kind_ = PotentialKind::HP;
  std::map<std::pair<char, char>, double> entries_;
};

/// Map a 20-letter sequence onto the {H,P} alphabet. Rows `A H`.
std::map<char, char> load_hp_mapping(std::istream& is);
std::string map_to_hp(const std::string& sequence,
                      const std::map<char, char>& mapping);

/// Per-sequence pairwise contact matrix: P[i][j] = table(seq[i], seq[j])
/// when |i-j| >= 3 and i-j is odd, else 0. Residues an even number of
/// bonds apart can never sit on adjacent lattice vertices.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  static InteractionMatrix build(const std::string& sequence,
                                 const PotentialTable& table);

  int size() const { return n_; }
  double at(int i, int j) const { return p_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::string& sequence() const { return sequence_; }

  /// Sum over unordered pairs of |P_ij|.
  double abs_sum() const;
  double max_abs() const;
  std::vector<std::tuple<int, int, double>> nonzero_pairs() const;

 private:
  int n_ = 0;
  std::string sequence_;
  std::vector<double> p_;
};

}  // namespace latfold
