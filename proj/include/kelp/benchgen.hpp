#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kelp {

// One pool entry: literal tokens with erased variable slots. Any source
// token containing "<*>" is normalized to a bare slot, so "uid=<*>" and
// "<*>" both erase to a generic placeholder.
struct TemplateSkeleton {
    std::vector<std::string> parts; // literals; "<*>" marks a slot
    std::vector<std::uint32_t> slots;
    std::size_t pool_index = 0;
    std::string origin;

    std::string render() const;   // normalized one-line form
    std::string event_id() const; // stable per skeleton: E<pool_index+1>
};

TemplateSkeleton parse_skeleton(std::string_view line);

// Loads one template per line; blank lines and '#' comments are ignored,
// duplicates (after normalization) dropped. Zero valid templates is a
// configuration error.
std::vector<TemplateSkeleton> load_pool(const std::string& path);

struct GenerationConfig {
    std::uint64_t seed = 1;
    std::uint64_t n_lines = 100000;
    int tier = 1; // 1: 50-value slot alphabets, 2: 500, 3: fresh value per occurrence
    std::string pool_path;
    double zipf_s = 1.2;
    std::pair<std::uint32_t, std::uint32_t> template_count_range{165, 180};

    std::string out_log;
    std::string out_truth;
    std::string out_manifest;

    void validate() const;
};

struct GenerationResult {
    std::size_t template_count = 0;
    std::uint64_t lines = 0;
    std::string log_digest;
    std::string truth_digest;
    std::string pool_digest;
};

// Deterministic three-stage generation: sample a template subset, assign
// Zipf weights, inject high-entropy fillers per tier. Writes the raw log,
// the ground-truth CSV (LineId,EventId,EventTemplate) and a JSON manifest.
GenerationResult generate(const GenerationConfig& cfg);

} // namespace kelp
