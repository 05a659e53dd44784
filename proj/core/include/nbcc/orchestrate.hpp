// Parallel execution of path-tracking jobs with chunked work distribution,
// checkpointing, resume, and progress statistics.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbcc/tracker.hpp"

namespace nbcc {

struct JobSpec {
    unsigned long long chunk_size = 1024;
    int worker_count = 1;
    std::string checkpoint_path;  // empty: checkpointing disabled
    bool resume = false;
    unsigned long long path_budget = 4'000'000;
    bool progress = false;  // `chunk <id> done: c=.. d=.. f=..` on stderr
    // identifies the run inside the checkpoint header
    std::uint64_t seed = 0;
    int method_tag = 0;
};

/// Path result keyed by its deterministic global index.
struct PathRecord {
    unsigned long long path_index = 0;
    SolutionRecord record;
};

struct JobResult {
    std::vector<PathRecord> converged;  // in path-index order
    SolveStatistics stats;
};

/// Traces every start point of `source` in deterministic chunks. Chunk
/// results are merged by a single writer; the final record list depends only
/// on (system, seed, options), not on worker count or interruption pattern.
/// With a checkpoint path set, completed chunks are persisted after each
/// finish (write-to-temp, atomic rename) and `resume` skips them.
JobResult run_job(const JobSpec& spec, const PolySystem& target,
                  const StartSystem& source, const TrackerOptions& opts);

/// 64-bit FNV-1a content hash of the target system plus run identity; a
/// checkpoint only resumes against the hash it was written with.
std::uint64_t job_content_hash(const PolySystem& target, const JobSpec& spec);

}  // namespace nbcc
