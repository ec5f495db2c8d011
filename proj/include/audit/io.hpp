#pragma once

#include <string>
#include <vector>

#include "audit/adaptive.hpp"
#include "audit/game.hpp"
#include "audit/sweep.hpp"

namespace audit::io {

// Game config: JSON object with n, m, q, val (row-major), pay, pen, and
// exactly one of "lambda" or "budget". Decimals are base-10,
// locale independent; a file written by write_game re-parses to a
// bit-identical game.
AuditGame parse_game(const std::string& text);
AuditGame load_game(const std::string& path);
std::string write_game(const AuditGame& g);

// Continuous model config: keys pay_affine = [c0, c1], pen_offset,
// val_family = [a0, a1, a2], lambda, m.
ContinuousModelSpec parse_continuous(const std::string& text);

// True when the JSON object carries the continuous-model keys.
bool looks_continuous(const std::string& text);

// Priors file: JSON array of length-m probability vectors.
std::vector<std::vector<double>> parse_priors(const std::string& text, int m);

// Sweep plan; "kind" selects the protocol, "game" or "continuous" supplies
// the instance inline or via {"file": path}.
SweepPlan parse_plan(const std::string& text, const std::string& base_dir);

std::string write_policy(const DictatorPolicy& policy);
DictatorPolicy parse_policy(const std::string& text);

std::string read_file(const std::string& path);

// Writes via a temp file in the same directory and renames into place.
void atomic_write(const std::string& path, const std::string& content);

// Shortest decimal representation with at most `digits` significant
// digits; used for all human-facing numeric output.
std::string fmt_sig(double x, int digits = 12);

}  // namespace audit::io
