#include "latfold/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace latfold {

namespace {

constexpr const char* kMjAlphabet = "ACDEFGHIKLMNPQRSTVWY";

std::pair<char, char> ordered(char a, char b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

PotentialTable PotentialTable::hp() {
  PotentialTable t;
  t.kind_ = PotentialKind::HP;
  t.entries_[{'H', 'H'}] = -1.0;
  t.entries_[{'H', 'P'}] = 0.0;
  t.entries_[{'P', 'P'}] = 0.0;
  return t;
}

PotentialTable PotentialTable::load_mj(std::istream& is) {
  PotentialTable t;
  t.kind_ = PotentialKind::MJ;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b;
    double e;
    if (!(ls >> a)) continue;  // blank
    if (!(ls >> b >> e)) {
      throw FormatError("potential file line " + std::to_string(lineno) +
                        " is malformed: " + line);
    }
    if (a.size() != 1 || b.size() != 1) {
      throw UnknownResidueError("residue codes must be single letters: " + line);
    }
    if (std::string(kMjAlphabet).find(a[0]) == std::string::npos ||
        std::string(kMjAlphabet).find(b[0]) == std::string::npos) {
      throw UnknownResidueError("unknown residue code in line: " + line);
    }
    auto key = ordered(a[0], b[0]);
    auto it = t.entries_.find(key);
    if (it != t.entries_.end()) {
      if (std::abs(it->second - e) > 1e-12) {
        throw AsymmetricEntryError("conflicting energies for pair " +
                                   std::string{key.first} + "-" +
                                   std::string{key.second});
      }
    } else {
      t.entries_[key] = e;
    }
  }
  for (const char* a = kMjAlphabet; *a; ++a) {
    for (const char* b = a; *b; ++b) {
      if (!t.entries_.count(ordered(*a, *b))) {
        throw MissingPairError("potential table is missing pair " +
                               std::string{*a} + "-" + std::string{*b});
      }
    }
  }
  return t;
}

PotentialTable PotentialTable::load_mj_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open potential file: " + path);
  return load_mj(is);
}

bool PotentialTable::has_residue(char a) const {
  if (kind_ == PotentialKind::HP) return a == 'H' || a == 'P';
  return std::string(kMjAlphabet).find(a) != std::string::npos;
}

double PotentialTable::energy(char a, char b) const {
  if (!has_residue(a)) throw UnknownResidueError(std::string("unknown residue code '") + a + "'");
  if (!has_residue(b)) throw UnknownResidueError(std::string("unknown residue code '") + b + "'");
  auto it = entries_.find(ordered(a, b));
  return it == entries_.end() ? 0.0 : it->second;
}

std::map<char, char> load_hp_mapping(std::istream& is) {
  std::map<char, char> mapping;
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || a.size() != 1 || b.size() != 1 || (b[0] != 'H' && b[0] != 'P')) {
      throw FormatError("hydrophobicity mapping rows must look like `A H`: " + line);
    }
    mapping[a[0]] = b[0];
  }
  return mapping;
}

std::string map_to_hp(const std::string& sequence,
                      const std::map<char, char>& mapping) {
  std::string out;
  out.reserve(sequence.size());
  for (char c : sequence) {
    auto it = mapping.find(c);
    if (it == mapping.end()) {
      throw UnknownResidueError(std::string("no hydrophobicity class for '") + c + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

InteractionMatrix InteractionMatrix::build(const std::string& sequence,
                                           const PotentialTable& table) {
  InteractionMatrix m;
  m.n_ = static_cast<int>(sequence.size());
  m.sequence_ = sequence;
  m.p_.assign(static_cast<std::size_t>(m.n_) * m.n_, 0.0);
  for (int i = 0; i < m.n_; ++i) {
    if (!table.has_residue(sequence[i])) {
      throw UnknownResidueError(std::string("unknown residue code '") +
                                sequence[i] + "' in sequence");
    }
  }
  for (int i = 0; i < m.n_; ++i) {
    for (int j = i + 3; j < m.n_; j += 2) {
      double e = table.energy(sequence[i], sequence[j]);
      m.p_[static_cast<std::size_t>(i) * m.n_ + j] = e;
      m.p_[static_cast<std::size_t>(j) * m.n_ + i] = e;
    }
  }
  return m;
}

double InteractionMatrix::abs_sum() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) s += std::abs(at(i, j));
  }
  return s;
}

double InteractionMatrix::max_abs() const {
  double s = 0.0;
  for (double v : p_) s = std::max(s, std::abs(v));
  return s;
}

std::vector<std::tuple<int, int, double>> InteractionMatrix::nonzero_pairs() const {
  std::vector<std::tuple<int, int, double>> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (at(i, j) != 0.0) out.emplace_back(i, j, at(i, j));
    }
  }
  return out;
}

}  // namespace latfold
