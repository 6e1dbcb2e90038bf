#pragma once

#include <string>

#include "divsp/curriculum.hpp"
#include "divsp/learner.hpp"

namespace divsp {

// Policy snapshot: header plus flat row-major weight arrays as JSON text.
// Doubles round-trip bit-exactly (shortest round-trip serialization).
struct PolicySnapshot {
    std::string family_id;
    PolicyParams params;
};

std::string policy_snapshot_to_json(const PolicySnapshot& snapshot);
PolicySnapshot policy_snapshot_from_json(const std::string& text);
void save_policy_snapshot(const std::string& path, const PolicySnapshot& snapshot);
PolicySnapshot load_policy_snapshot(const std::string& path);

// Buffer snapshot: replay config plus every entry with its level encoding,
// representative vectors, cached scores, and counters.
struct BufferSnapshot {
    ReplayConfig config;
    std::vector<BufferEntry> entries;
    std::uint64_t next_insert_seq = 0;
};

BufferSnapshot buffer_snapshot_of(const LevelBuffer& buffer);
LevelBuffer buffer_from_snapshot(const BufferSnapshot& snapshot);

std::string buffer_snapshot_to_json(const BufferSnapshot& snapshot);
BufferSnapshot buffer_snapshot_from_json(const std::string& text);
void save_buffer_snapshot(const std::string& path, const BufferSnapshot& snapshot);
BufferSnapshot load_buffer_snapshot(const std::string& path);

}  // namespace divsp
