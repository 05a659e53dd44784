#include "nbcc/orchestrate.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nbcc {

namespace {

constexpr std::uint64_t kMagic = 0x4e42434b50543031ULL;  // "NBCKPT01"
constexpr std::uint32_t kVersion = 1;

struct ChunkResult {
    unsigned long long chunk_id = 0;
    unsigned long long converged = 0, diverged = 0, failed = 0, retried = 0;
    std::vector<PathRecord> records;  // converged only, in path order
};

struct CheckpointState {
    std::map<unsigned long long, ChunkResult> chunks;
};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return in.good();
}

void write_checkpoint(const std::string& path, std::uint64_t hash,
                      unsigned long long total_paths, unsigned long long chunk_size,
                      int nvars, const CheckpointState& state) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp);
        put(out, kMagic);
        put(out, kVersion);
        put(out, hash);
        put(out, total_paths);
        put(out, chunk_size);
        put(out, static_cast<std::uint32_t>(nvars));
        put(out, static_cast<std::uint64_t>(state.chunks.size()));
        for (const auto& [id, ch] : state.chunks) {
            put(out, static_cast<std::uint64_t>(id));
            put(out, static_cast<std::uint64_t>(ch.converged));
            put(out, static_cast<std::uint64_t>(ch.diverged));
            put(out, static_cast<std::uint64_t>(ch.failed));
            put(out, static_cast<std::uint64_t>(ch.retried));
            put(out, static_cast<std::uint64_t>(ch.records.size()));
            for (const auto& pr : ch.records) {
                put(out, static_cast<std::uint64_t>(pr.path_index));
                put(out, pr.record.residual);
                put(out, pr.record.condition);
                for (const Complex& c : pr.record.endpoint) {
                    put(out, c.real());
                    put(out, c.imag());
                }
            }
        }
        if (!out) throw std::runtime_error("checkpoint: write failed on " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

CheckpointState load_checkpoint(const std::string& path, std::uint64_t hash,
                                unsigned long long total_paths,
                                unsigned long long chunk_size, int nvars) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    std::uint64_t magic, fhash, ftotal, fchunk, nchunks;
    std::uint32_t version, fnvars;
    if (!get(in, magic) || magic != kMagic)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (!get(in, version) || version != kVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    if (!get(in, fhash) || fhash != hash)
        throw std::runtime_error(
            "checkpoint: content hash mismatch (different system/seed/method): " + path);
    if (!get(in, ftotal) || ftotal != total_paths)
        throw std::runtime_error("checkpoint: path count mismatch in " + path);
    if (!get(in, fchunk) || fchunk != chunk_size)
        throw std::runtime_error("checkpoint: chunk size mismatch in " + path);
    if (!get(in, fnvars) || fnvars != static_cast<std::uint32_t>(nvars))
        throw std::runtime_error("checkpoint: variable count mismatch in " + path);
    if (!get(in, nchunks)) throw std::runtime_error("checkpoint: truncated " + path);
    CheckpointState state;
    for (std::uint64_t k = 0; k < nchunks; ++k) {
        ChunkResult ch;
        std::uint64_t id, c, d, f, rt, nrec;
        if (!get(in, id) || !get(in, c) || !get(in, d) || !get(in, f) ||
            !get(in, rt) || !get(in, nrec))
            throw std::runtime_error("checkpoint: truncated chunk in " + path);
        ch.chunk_id = id;
        ch.converged = c;
        ch.diverged = d;
        ch.failed = f;
        ch.retried = rt;
        for (std::uint64_t r = 0; r < nrec; ++r) {
            PathRecord pr;
            std::uint64_t pi;
            if (!get(in, pi) || !get(in, pr.record.residual) ||
                !get(in, pr.record.condition))
                throw std::runtime_error("checkpoint: truncated record in " + path);
            pr.path_index = pi;
            pr.record.endpoint.resize(nvars);
            for (int i = 0; i < nvars; ++i) {
                double re, im;
                if (!get(in, re) || !get(in, im))
                    throw std::runtime_error("checkpoint: truncated record in " + path);
                pr.record.endpoint[i] = Complex(re, im);
            }
            pr.record.status = PathStatus::kConverged;
            ch.records.push_back(std::move(pr));
        }
        state.chunks[id] = std::move(ch);
    }
    return state;
}

// A path failing short of the end, or stalling with moderate coordinates,
// is a numerical loss worth retrying under tighter control (the same
// deformation, so this cannot change which root the path belongs to).
// Stalls near t=1 at enormous norm are paths to infinity; retrying them is
// pointless.
bool retryable_failure(const PathResult& pr) {
    return pr.t_reached < 1.0 - 1e-6 || pr.final_norm < 1e3;
}

TrackerOptions tightened(TrackerOptions opts, int round) {
    for (int r = 0; r < round; ++r) {
        opts.initial_step /= 5.0;
        opts.corrector_tol /= 10.0;
        opts.min_step = std::min(opts.min_step, 1e-11);
    }
    return opts;
}

ChunkResult trace_chunk(unsigned long long chunk_id, unsigned long long begin,
                        unsigned long long end, const PolySystem& target,
                        const StartSystem& source, const TrackerOptions& opts) {
    ChunkResult ch;
    ch.chunk_id = chunk_id;
    for (unsigned long long pi = begin; pi < end; ++pi) {
        auto start = source.start_point(pi);
        PathResult pr = track_path(source.homotopy(pi), start, target, opts);
        for (int round = 1;
             round <= 2 && pr.status == PathStatus::kFailed && retryable_failure(pr);
             ++round) {
            ch.retried++;
            pr = track_path(source.homotopy(pi), start, target,
                            tightened(opts, round));
        }
        switch (pr.status) {
            case PathStatus::kConverged: {
                ch.converged++;
                PathRecord rec;
                rec.path_index = pi;
                rec.record.endpoint = std::move(pr.endpoint);
                rec.record.residual = pr.residual;
                rec.record.condition = pr.condition_estimate;
                rec.record.status = PathStatus::kConverged;
                ch.records.push_back(std::move(rec));
                break;
            }
            case PathStatus::kDiverged:
                ch.diverged++;
                break;
            case PathStatus::kFailed:
                ch.failed++;
                break;
        }
    }
    return ch;
}

}  // namespace

std::uint64_t job_content_hash(const PolySystem& target, const JobSpec& spec) {
    std::string text = to_text(target);
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(text.data(), text.size());
    mix(&spec.seed, sizeof spec.seed);
    mix(&spec.method_tag, sizeof spec.method_tag);
    return h;
}

JobResult run_job(const JobSpec& spec, const PolySystem& target,
                  const StartSystem& source, const TrackerOptions& opts) {
    const unsigned long long total = source.path_count();
    if (total > spec.path_budget)
        throw std::runtime_error("run_job: " + std::to_string(total) +
                                 " paths exceed the budget " +
                                 std::to_string(spec.path_budget));
    const unsigned long long chunk_size = std::max(1ULL, spec.chunk_size);
    const unsigned long long nchunks = (total + chunk_size - 1) / chunk_size;
    const std::uint64_t hash = job_content_hash(target, spec);

    CheckpointState state;
    const bool use_ckpt = !spec.checkpoint_path.empty();
    if (use_ckpt && spec.resume) {
        state = load_checkpoint(spec.checkpoint_path, hash, total, chunk_size,
                                target.nvars());
    }

    std::vector<unsigned long long> pending;
    for (unsigned long long id = 0; id < nchunks; ++id)
        if (!state.chunks.count(id)) pending.push_back(id);

    std::mutex merge_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= pending.size()) break;
            unsigned long long id = pending[k];
            unsigned long long begin = id * chunk_size;
            unsigned long long end = std::min(total, begin + chunk_size);
            ChunkResult ch = trace_chunk(id, begin, end, target, source, opts);
            std::lock_guard<std::mutex> lock(merge_mutex);
            if (spec.progress)
                std::fprintf(stderr, "chunk %llu done: c=%llu d=%llu f=%llu\n",
                             ch.chunk_id, ch.converged, ch.diverged, ch.failed);
            state.chunks[id] = std::move(ch);
            if (use_ckpt)
                write_checkpoint(spec.checkpoint_path, hash, total, chunk_size,
                                 target.nvars(), state);
        }
    };

    if (spec.worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < spec.worker_count; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    JobResult result;
    for (auto& [id, ch] : state.chunks) {
        result.stats.converged += ch.converged;
        result.stats.diverged += ch.diverged;
        result.stats.failed += ch.failed;
        result.stats.retracked += ch.retried;
        for (auto& r : ch.records) result.converged.push_back(std::move(r));
    }
    result.stats.attempted = total;
    if (result.stats.converged + result.stats.diverged + result.stats.failed != total)
        throw std::logic_error("run_job: path conservation violated");
    return result;
}

}  // namespace nbcc
