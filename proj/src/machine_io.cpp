#include "workfn/machine_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace workfn {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array()) schema_error(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) schema_error(std::string(what) + " entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

template <typename Id>
Id lookup(const std::vector<std::string>& names, const json& name, const char* what) {
  if (!name.is_string()) schema_error(std::string(what) + " must be a name");
  const auto s = name.get<std::string>();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<Id>(i);
  schema_error(std::string("unknown ") + what + " \"" + s + "\"");
}

TapeRole parse_role(const std::string& s) {
  if (s == "work") return TapeRole::work;
  if (s == "run") return TapeRole::run;
  if (s == "valuation") return TapeRole::valuation;
  schema_error("unknown tape role \"" + s + "\"");
}

}  // namespace

MachinePtr load_machine(const json& doc) {
  if (!doc.is_object()) schema_error("machine document must be an object");
  const auto states = string_list(require(doc, "states"), "states");
  const auto symbols = string_list(require(doc, "symbols"), "symbols");
  std::vector<StateId> halts;
  if (doc.contains("halt_states"))
    for (const auto& h : doc.at("halt_states")) halts.push_back(lookup<StateId>(states, h, "state"));

  std::vector<TapeRole> roles;
  if (doc.contains("tape_roles")) {
    for (const auto& r : string_list(doc.at("tape_roles"), "tape_roles")) roles.push_back(parse_role(r));
  } else {
    const auto& tapes = require(doc, "tapes");
    if (!tapes.is_number_integer() || tapes.get<long long>() < 0) schema_error("tapes must be a non-negative integer");
    if (doc.value("run_tape", false)) roles.push_back(TapeRole::run);
    if (doc.value("valuation_tape", false)) roles.push_back(TapeRole::valuation);
    for (long long i = 0; i < tapes.get<long long>(); ++i) roles.push_back(TapeRole::work);
  }
  const auto& skip = require(doc, "max_skip");
  if (!skip.is_number_integer() || skip.get<long long>() < 0) schema_error("max_skip must be a non-negative integer");
  const auto initial = lookup<StateId>(states, require(doc, "initial_state"), "state");

  auto spec = std::make_shared<MachineSpec>(states, symbols, roles, static_cast<Move>(skip.get<long long>()),
                                            initial, halts);
  if (doc.contains("tape_alphabets")) {
    const auto& la = doc.at("tape_alphabets");
    if (!la.is_array() || la.size() != roles.size()) schema_error("tape_alphabets needs one entry per tape");
    for (std::size_t i = 0; i < la.size(); ++i) spec->set_tape_alphabet(i, la[i].get<Symbol>());
  }

  const auto& table = require(doc, "table");
  if (!table.is_array()) schema_error("table must be an array");
  const std::size_t t = roles.size();
  std::vector<Symbol> read(t), write(t);
  std::vector<Move> move(t);
  for (const auto& row : table) {
    const auto state = lookup<StateId>(states, require(row, "state"), "state");
    const auto& r = require(row, "read");
    const auto& w = require(row, "write");
    const auto& m = require(row, "move");
    if (!r.is_array() || !w.is_array() || !m.is_array() || r.size() != t || w.size() != t || m.size() != t)
      schema_error("read/write/move must list one entry per tape");
    for (std::size_t i = 0; i < t; ++i) {
      read[i] = lookup<Symbol>(symbols, r[i], "symbol");
      write[i] = lookup<Symbol>(symbols, w[i], "symbol");
      if (!m[i].is_number_integer()) schema_error("moves must be integers");
      const long long mv = m[i].get<long long>();
      if (mv < -skip.get<long long>() || mv > skip.get<long long>())
        schema_error("move " + std::to_string(mv) + " out of range");
      move[i] = static_cast<Move>(mv);
    }
    spec->set_action(state, read, write, move, lookup<StateId>(states, require(row, "next"), "state"));
  }
  spec->finalize();
  return spec;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::not_found, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, path + ": " + e.what());
  }
}

MachinePtr load_machine_file(const std::string& path) {
  try {
    return load_machine(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, path + ": " + e.what());
  }
}

json machine_to_json(const MachineSpec& spec) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["states"] = spec.state_names();
  doc["symbols"] = spec.symbol_names();
  json halts = json::array();
  for (StateId h : spec.halt_states()) halts.push_back(spec.state_name(h));
  doc["halt_states"] = halts;
  json roles = json::array();
  for (TapeRole r : spec.tape_roles()) roles.push_back(to_string(r));
  doc["tape_roles"] = roles;
  doc["tapes"] = spec.work_tape_count();
  doc["max_skip"] = spec.max_skip();
  doc["initial_state"] = spec.state_name(spec.initial_state());
  json alphabets = json::array();
  bool narrowed = false;
  for (std::size_t i = 0; i < spec.tape_count(); ++i) {
    alphabets.push_back(spec.tape_alphabet(i));
    narrowed = narrowed || spec.tape_alphabet(i) != spec.symbol_count();
  }
  if (narrowed) doc["tape_alphabets"] = alphabets;

  json table = json::array();
  std::vector<Symbol> read;
  for (std::uint64_t idx = 0; idx < spec.entry_count(); ++idx) {
    StateId state;
    spec.decode_entry(idx, state, read);
    const auto act = spec.entry(idx);
    json row;
    row["state"] = spec.state_name(state);
    json r = json::array(), w = json::array(), m = json::array();
    for (std::size_t i = 0; i < read.size(); ++i) {
      r.push_back(spec.symbol_name(read[i]));
      w.push_back(spec.symbol_name(act.write[i]));
      m.push_back(act.move[i]);
    }
    row["read"] = r;
    row["write"] = w;
    row["move"] = m;
    row["next"] = spec.state_name(act.next);
    table.push_back(std::move(row));
  }
  doc["table"] = std::move(table);
  return doc;
}

std::vector<Symbol> parse_symbols(const MachineSpec& spec, const json& names) {
  if (!names.is_array()) schema_error("tape contents must be an array of symbol names");
  std::vector<Symbol> out;
  for (const auto& n : names) out.push_back(lookup<Symbol>(spec.symbol_names(), n, "symbol"));
  return out;
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::not_found, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorKind::not_found, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorKind::not_found, "cannot rename into " + path);
}

}  // namespace workfn
