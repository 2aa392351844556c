#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "workfn/machine.h"

namespace workfn {

constexpr int kFormatVersion = 1;

// Machine-spec document:
//   {"states": [...], "halt_states": [...], "symbols": [...], "tapes": t,
//    "run_tape": bool, "valuation_tape": bool, "max_skip": Dmax,
//    "initial_state": name,
//    "table": [{"state", "read": [...], "write": [...], "move": [...], "next"}]}
// Names map to ids in declaration order. Tape order is run, valuation, then
// the t work tapes; "tape_roles" may be given instead of the three counts.
// Optional "tape_alphabets" narrows per-tape alphabets.
MachinePtr load_machine(const nlohmann::json& doc);
MachinePtr load_machine_file(const std::string& path);

// Writes the full table, halt rows included.
nlohmann::json machine_to_json(const MachineSpec& spec);

// Resolves symbol names against the machine alphabet.
std::vector<Symbol> parse_symbols(const MachineSpec& spec, const nlohmann::json& names);

nlohmann::json read_json_file(const std::string& path);

// Writes through a temporary file and renames it into place.
void write_file_atomically(const std::string& path, const std::string& content);

}  // namespace workfn
