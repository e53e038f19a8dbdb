#include "latfold/encoded.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace latfold {

const char* var_role_name(VarRole r) {
  switch (r) {
    case VarRole::Turn: return "turn";
    case VarRole::Slack: return "slack";
    case VarRole::Flag: return "flag";
    case VarRole::Site: return "site";
    case VarRole::ReductionAncilla: return "reduction-ancilla";
  }
  return "?";
}

std::size_t VariableRegistry::count(VarRole role) const {
  return static_cast<std::size_t>(
      std::count_if(vars.begin(), vars.end(),
                    [role](const VarInfo& v) { return v.role == role; }));
}

std::vector<std::uint8_t> ReductionMap::extend(std::span<const std::uint8_t> bits,
                                               std::size_t total_vars) const {
  std::vector<std::uint8_t> out(bits.begin(), bits.end());
  out.resize(total_vars, 0);
  for (const Gadget& g : gadgets) {
    out[g.ancilla] = out[g.u] & out[g.v];
  }
  return out;
}

DecodedFold EncodedProblem::decode(std::span<const std::uint8_t> bits) const {
  DecodedFold out;
  if (bits.size() < num_vars()) {
    out.reason = "assignment shorter than the variable registry";
    return out;
  }
  if (encoder == "turn-ancilla" || encoder == "turn-circuit") {
    int fbits = free_bit_count(lattice, static_cast<int>(sequence.size()));
    try {
      Fold f = fold_from_bits(bits.subspan(0, static_cast<std::size_t>(fbits)),
                              sequence, lattice);
      out.valid = f.valid();
      if (!out.valid) out.reason = "decoded walk intersects itself";
      out.fold = std::move(f);
    } catch (const InvalidTurnError& e) {
      out.reason = e.what();
    }
    return out;
  }
  if (encoder == "nested-shell") {
    Fold f;
    f.sequence = sequence;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      Vec3 where{};
      int hits = 0;
      for (std::size_t v = 0; v < registry.vars.size(); ++v) {
        const VarInfo& info = registry.vars[v];
        if (info.role == VarRole::Site &&
            info.a == static_cast<std::int32_t>(i) && bits[v]) {
          where = info.site;
          ++hits;
        }
      }
      if (hits != 1) {
        out.reason = "residue " + std::to_string(i) + " has " +
                     std::to_string(hits) + " position flags set";
        return out;
      }
      f.coords.push_back(where);
    }
    out.valid = f.valid();
    if (!out.valid) out.reason = "flagged positions do not form a self-avoiding chain";
    out.fold = std::move(f);
    return out;
  }
  out.reason = "unknown encoder: " + encoder;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void EncodedProblem::save(std::ostream& os) const {
  os << "latfold-problem v1\n";
  os << "encoder " << encoder << '\n';
  os << "sequence " << sequence << '\n';
  os << "lattice " << (lattice == LatticeKind::Cubic ? "cubic" : "planar") << '\n';
  for (const auto& [name, value] : lambdas) {
    os << "lambda " << name << ' ' << fmt(value) << '\n';
  }
  for (const auto& [key, value] : metadata) {
    os << "meta " << key << ' ' << value << '\n';
  }
  os << "vars " << registry.vars.size() << '\n';
  for (std::size_t i = 0; i < registry.vars.size(); ++i) {
    const VarInfo& v = registry.vars[i];
    os << "var " << i << ' ' << var_role_name(v.role);
    switch (v.role) {
      case VarRole::Turn: break;
      case VarRole::Slack: os << ' ' << v.a << ' ' << v.b << ' ' << v.r; break;
      case VarRole::Flag: os << ' ' << v.a << ' ' << v.b; break;
      case VarRole::Site:
        os << ' ' << v.a << ' ' << v.site.x << ' ' << v.site.y << ' ' << v.site.z;
        break;
      case VarRole::ReductionAncilla: os << ' ' << v.a << ' ' << v.b; break;
    }
    os << '\n';
  }
  os << "gadgets " << reduction.gadgets.size() << '\n';
  for (const Gadget& g : reduction.gadgets) {
    os << "gadget " << g.ancilla << ' ' << g.u << ' ' << g.v << ' '
       << fmt(g.penalty) << '\n';
  }
  os << "terms " << hamiltonian.term_count() << '\n';
  hamiltonian.write_text(os);
  os << "end\n";
}

EncodedProblem EncodedProblem::load(std::istream& is) {
  EncodedProblem p;
  std::string line;
  if (!std::getline(is, line) || line.rfind("latfold-problem", 0) != 0) {
    throw FormatError("not a latfold problem file");
  }
  std::size_t expected_terms = 0;
  bool in_terms = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "end") break;
    if (in_terms) {
      p.hamiltonian += Polynomial::parse_line(line);
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "encoder") {
      ls >> p.encoder;
    } else if (tag == "sequence") {
      ls >> p.sequence;
    } else if (tag == "lattice") {
      std::string kind;
      ls >> kind;
      if (kind == "cubic") {
        p.lattice = LatticeKind::Cubic;
      } else if (kind == "planar") {
        p.lattice = LatticeKind::Planar;
      } else {
        throw FormatError("unknown lattice kind: " + kind);
      }
    } else if (tag == "lambda") {
      std::string name;
      double value;
      if (!(ls >> name >> value)) throw FormatError("bad lambda line: " + line);
      p.lambdas[name] = value;
    } else if (tag == "meta") {
      std::string key, value;
      ls >> key;
      std::getline(ls, value);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      p.metadata[key] = value;
    } else if (tag == "vars") {
      std::size_t n;
      ls >> n;
      p.registry.vars.reserve(n);
    } else if (tag == "var") {
      std::size_t idx;
      std::string role;
      if (!(ls >> idx >> role)) throw FormatError("bad var line: " + line);
      if (idx != p.registry.vars.size()) {
        throw FormatError("variable lines out of order at index " + std::to_string(idx));
      }
      VarInfo v;
      if (role == "turn") {
        v.role = VarRole::Turn;
      } else if (role == "slack") {
        v.role = VarRole::Slack;
        if (!(ls >> v.a >> v.b >> v.r)) throw FormatError("bad slack var: " + line);
      } else if (role == "flag") {
        v.role = VarRole::Flag;
        if (!(ls >> v.a >> v.b)) throw FormatError("bad flag var: " + line);
      } else if (role == "site") {
        v.role = VarRole::Site;
        if (!(ls >> v.a >> v.site.x >> v.site.y >> v.site.z)) {
          throw FormatError("bad site var: " + line);
        }
      } else if (role == "reduction-ancilla") {
        v.role = VarRole::ReductionAncilla;
        if (!(ls >> v.a >> v.b)) throw FormatError("bad reduction var: " + line);
      } else {
        throw FormatError("unknown variable role: " + role);
      }
      p.registry.vars.push_back(v);
    } else if (tag == "gadgets") {
      // count only; individual lines follow
    } else if (tag == "gadget") {
      Gadget g;
      if (!(ls >> g.ancilla >> g.u >> g.v >> g.penalty)) {
        throw FormatError("bad gadget line: " + line);
      }
      p.reduction.gadgets.push_back(g);
    } else if (tag == "terms") {
      ls >> expected_terms;
      in_terms = true;
    } else {
      throw FormatError("unknown problem-file line: " + line);
    }
  }
  if (p.hamiltonian.term_count() != expected_terms) {
    throw FormatError("term count mismatch: header says " +
                      std::to_string(expected_terms) + ", file has " +
                      std::to_string(p.hamiltonian.term_count()));
  }
  return p;
}

}  // namespace latfold
