#pragma once

#include <filesystem>
#include <string>

#include "platoon/simulator.hpp"

namespace platoon {

/// Write `content` to `path` via a temp file and atomic rename, so a failed
/// write never leaves a partial file behind.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

/// Leader velocity CSV: header `k,velocity`, k contiguous from 0.
LeaderProfile read_leader_profile(const std::filesystem::path& path);
void write_leader_profile(const std::filesystem::path& path, const LeaderProfile& profile);

/// Attack vector CSV: header `k,delta`, k = 0..T-1, lossless round-trip.
void write_attack_csv(const std::filesystem::path& path, const AttackVector& vector);
AttackVector read_attack_csv(const std::filesystem::path& path, int expected_duration);

/// Trace CSV: header `k,vehicle,position,velocity,acceleration,control,gap`;
/// the gap field is empty for the leader.
void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace);
SimulationTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace platoon
