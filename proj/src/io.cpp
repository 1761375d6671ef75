#include "kitaoka/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kitaoka/errors.hpp"

namespace kitaoka {

std::vector<QuadRat> parse_elements(const std::string& text, const FieldCtx& ctx) {
  std::vector<QuadRat> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    try {
      out.push_back(QuadRat::parse(ctx, std::string_view(line).substr(b, e - b + 1)));
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

std::vector<QuadRat> load_elements(const std::string& path, const FieldCtx& ctx) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_elements(ss.str(), ctx);
}

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvariantViolation, "cannot write " + tmp);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cp.hash));
    out << "kitaoka-checkpoint " << Checkpoint::kVersion << "\n";
    out << "hash " << hash << "\nmode " << cp.mode << "\nunits " << cp.units << "\n";
    for (const auto& u : cp.done) {
      out << "unit " << u.index << " " << u.nodes << " " << u.prune_ring << " " << u.prune_psd << " "
          << u.prune_rank << " " << u.prune_symmetry << " " << (u.more ? 1 : 0) << " "
          << u.witnesses.size() << "\n";
      for (const auto& w : u.witnesses) {
        out << "w";
        for (const auto& e : w) out << " " << e;
        out << "\n";
      }
    }
    out << "end\n";
    if (!out) throw Error(ErrorCode::InvariantViolation, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::InvariantViolation, "cannot rename checkpoint into " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path, std::uint64_t expected_hash,
                           const std::string& expected_mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open checkpoint " + path);
  auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorCode::ParseError, "checkpoint " + path + ": " + why);
  };
  std::string tag, hash_hex;
  int version = 0;
  Checkpoint cp;
  if (!(in >> tag >> version) || tag != "kitaoka-checkpoint") fail("bad header");
  if (version != Checkpoint::kVersion) fail("unsupported version " + std::to_string(version));
  if (!(in >> tag >> hash_hex) || tag != "hash") fail("missing hash");
  if (!(in >> tag >> cp.mode) || tag != "mode") fail("missing mode");
  if (!(in >> tag >> cp.units) || tag != "units") fail("missing unit count");
  cp.hash = std::stoull(hash_hex, nullptr, 16);
  if (cp.hash != expected_hash || cp.mode != expected_mode) {
    throw Error(ErrorCode::ChecksumMismatch, "checkpoint " + path + " belongs to a different problem");
  }
  bool ended = false;
  while (in >> tag) {
    if (tag == "end") {
      ended = true;
      break;
    }
    if (tag != "unit") fail("unexpected token " + tag);
    UnitRecord u;
    int more = 0;
    std::size_t nw = 0;
    if (!(in >> u.index >> u.nodes >> u.prune_ring >> u.prune_psd >> u.prune_rank >> u.prune_symmetry >>
          more >> nw)) {
      fail("bad unit record");
    }
    u.more = more != 0;
    std::string line;
    std::getline(in, line);
    for (std::size_t i = 0; i < nw; ++i) {
      if (!std::getline(in, line) || line.rfind("w", 0) != 0) fail("missing witness line");
      std::istringstream ls(line.substr(1));
      std::vector<std::string> w;
      std::string e;
      while (ls >> e) w.push_back(e);
      u.witnesses.push_back(std::move(w));
    }
    if (u.index >= cp.units) fail("unit index out of range");
    cp.done.push_back(std::move(u));
  }
  if (!ended) fail("truncated file");
  return cp;
}

}  // namespace kitaoka
