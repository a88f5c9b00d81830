#include "kelp/benchgen.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "kelp/error.hpp"
#include "kelp/rng.hpp"
#include "kelp/tokenizer.hpp"
#include "kelp/util.hpp"

namespace kelp {

static constexpr std::string_view kSlot = "<*>";

std::string TemplateSkeleton::render() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(' ');
        out += parts[i];
    }
    return out;
}

std::string TemplateSkeleton::event_id() const {
    return "E" + std::to_string(pool_index + 1);
}

TemplateSkeleton parse_skeleton(std::string_view line) {
    TemplateSkeleton sk;
    for (std::string_view tok : split_whitespace(line)) {
        if (tok.find(kSlot) != std::string_view::npos) {
            sk.slots.push_back(static_cast<std::uint32_t>(sk.parts.size()));
            sk.parts.emplace_back(kSlot);
        } else {
            sk.parts.emplace_back(tok);
        }
    }
    return sk;
}

std::vector<TemplateSkeleton> load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open template pool: " + path);
    std::vector<TemplateSkeleton> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        std::string_view sv = strip_eol(line);
        if (is_blank(sv) || sv.front() == '#') continue;
        TemplateSkeleton sk = parse_skeleton(sv);
        if (sk.parts.empty()) continue;
        if (sk.slots.size() == sk.parts.size()) continue; // needs >= 1 literal
        std::string norm = sk.render();
        if (!seen.insert(norm).second) continue;
        sk.pool_index = index++;
        sk.origin = path;
        out.push_back(std::move(sk));
    }
    if (out.empty()) throw ConfigError("template pool has no valid templates: " + path);
    return out;
}

void GenerationConfig::validate() const {
    if (tier < 1 || tier > 3) throw ConfigError("tier must be 1, 2 or 3");
    if (n_lines == 0) throw ConfigError("n_lines must be positive");
    if (template_count_range.first < 1 ||
        template_count_range.second < template_count_range.first)
        throw ConfigError("invalid template count range");
    if (pool_path.empty()) throw ConfigError("pool path required");
    if (zipf_s <= 0.0) throw ConfigError("zipf_s must be positive");
}

namespace {

constexpr std::string_view kAlnum =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

std::string random_token(Rng& rng) {
    std::size_t len = 8 + rng.below(9); // 8..16
    std::string out(len, '0');
    for (auto& c : out) c = kAlnum[rng.below(kAlnum.size())];
    return out;
}

std::string fresh_filler(Rng& rng, const std::unordered_set<std::string>& literals) {
    for (;;) {
        std::string t = random_token(rng);
        if (literals.find(t) == literals.end()) return t;
    }
}

class DigestWriter {
public:
    DigestWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open output file: " + path);
        path_ = path;
    }
    void write(std::string_view data) {
        out_.write(data.data(), static_cast<std::streamsize>(data.size()));
        digest_ = fnv1a64(data, digest_);
    }
    std::string finish() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_);
        return to_hex16(digest_);
    }

private:
    std::ofstream out_;
    std::string path_;
    std::uint64_t digest_ = kFnvOffset;
};

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for digest: " + path);
    std::uint64_t h = kFnvOffset;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return to_hex16(h);
}

} // namespace

GenerationResult generate(const GenerationConfig& cfg) {
    cfg.validate();
    auto pool = load_pool(cfg.pool_path);
    if (pool.size() < cfg.template_count_range.first)
        throw ConfigError("pool too small: " + std::to_string(pool.size()) + " templates, need >= " +
                          std::to_string(cfg.template_count_range.first));

    Rng rng(cfg.seed);

    std::uint32_t hi = cfg.template_count_range.second;
    if (hi > pool.size()) hi = static_cast<std::uint32_t>(pool.size());
    std::uint32_t lo = cfg.template_count_range.first;
    std::uint32_t count = lo + static_cast<std::uint32_t>(rng.below(hi - lo + 1));

    if (cfg.n_lines < count)
        throw ConfigError("n_lines smaller than selected template count; every template must appear");

    // Seeded selection: shuffle pool indices, take the first `count`.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i-- > 1;) {
        std::size_t j = rng.below(i + 1);
        std::swap(order[i], order[j]);
    }
    std::vector<const TemplateSkeleton*> selected;
    selected.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) selected.push_back(&pool[order[i]]);

    std::unordered_set<std::string> literals;
    for (const auto* sk : selected)
        for (std::size_t i = 0; i < sk->parts.size(); ++i)
            if (sk->parts[i] != kSlot) literals.insert(sk->parts[i]);

    // Pre-generate per-slot alphabets for tiers 1 and 2.
    std::size_t alphabet_size = cfg.tier == 1 ? 50 : (cfg.tier == 2 ? 500 : 0);
    std::vector<std::vector<std::vector<std::string>>> alphabets(selected.size());
    if (alphabet_size > 0) {
        for (std::size_t t = 0; t < selected.size(); ++t) {
            alphabets[t].resize(selected[t]->slots.size());
            for (auto& alpha : alphabets[t]) {
                std::unordered_set<std::string> used;
                alpha.reserve(alphabet_size);
                while (alpha.size() < alphabet_size) {
                    std::string v = fresh_filler(rng, literals);
                    if (used.insert(v).second) alpha.push_back(std::move(v));
                }
            }
        }
    }

    ZipfSampler zipf(selected.size(), cfg.zipf_s);

    DigestWriter log_out(cfg.out_log);
    DigestWriter truth_out(cfg.out_truth);
    truth_out.write("LineId,EventId,EventTemplate\n");

    std::string line;
    std::string truth_row;
    for (std::uint64_t n = 0; n < cfg.n_lines; ++n) {
        // First pass is a round-robin so every selected template appears.
        std::size_t t = n < selected.size() ? n : zipf.sample(rng);
        const TemplateSkeleton& sk = *selected[t];

        line.clear();
        std::size_t slot_i = 0;
        for (std::size_t i = 0; i < sk.parts.size(); ++i) {
            if (i) line.push_back(' ');
            if (sk.parts[i] == kSlot) {
                if (alphabet_size > 0) {
                    const auto& alpha = alphabets[t][slot_i];
                    line += alpha[rng.below(alpha.size())];
                } else {
                    line += fresh_filler(rng, literals);
                }
                ++slot_i;
            } else {
                line += sk.parts[i];
            }
        }
        line.push_back('\n');
        log_out.write(line);

        truth_row.clear();
        truth_row += std::to_string(n + 1);
        truth_row.push_back(',');
        truth_row += sk.event_id();
        truth_row.push_back(',');
        truth_row += csv_quote(sk.render());
        truth_row.push_back('\n');
        truth_out.write(truth_row);
    }

    GenerationResult res;
    res.template_count = selected.size();
    res.lines = cfg.n_lines;
    res.log_digest = log_out.finish();
    res.truth_digest = truth_out.finish();
    res.pool_digest = file_digest(cfg.pool_path);

    nlohmann::json manifest{
        {"generator", "kelp-benchgen"},
        {"version", 1},
        {"seed", cfg.seed},
        {"n_lines", cfg.n_lines},
        {"tier", cfg.tier},
        {"zipf_s", cfg.zipf_s},
        {"template_count_range", {cfg.template_count_range.first, cfg.template_count_range.second}},
        {"pool_path", cfg.pool_path},
        {"pool_templates", pool.size()},
        {"template_count", res.template_count},
        {"slot_alphabet_size", alphabet_size == 0 ? nlohmann::json("fresh-per-occurrence")
                                                  : nlohmann::json(alphabet_size)},
        {"digests", {{"log", res.log_digest}, {"truth", res.truth_digest}, {"pool", res.pool_digest}}},
    };
    std::ofstream mf(cfg.out_manifest);
    if (!mf) throw IoError("cannot open manifest: " + cfg.out_manifest);
    mf << manifest.dump(2) << '\n';
    if (!mf.good()) throw IoError("manifest write failed: " + cfg.out_manifest);
    return res;
}

} // namespace kelp
