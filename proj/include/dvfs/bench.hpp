#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dvfs/corpus.hpp"
#include "dvfs/fuzzy.hpp"
#include "dvfs/service.hpp"

namespace dvfs {

// ---------------------------------------------------------------------------
// Fuzzy accuracy: mutate sampled keywords and measure how often the bucket
// string is preserved. T1 letter substitution, T2 letter omission/addition,
// T3 adjacent transposition, T4 inflectional suffix.
// ---------------------------------------------------------------------------

enum class ErrorType { T1Substitution, T2OmissionAddition, T3Transposition, T4Suffix };

inline const char* to_string(ErrorType t) {
    switch (t) {
        case ErrorType::T1Substitution: return "T1";
        case ErrorType::T2OmissionAddition: return "T2";
        case ErrorType::T3Transposition: return "T3";
        case ErrorType::T4Suffix: return "T4";
    }
    return "?";
}

inline std::string mutate_keyword(std::mt19937_64& rng, const std::string& word,
                                  ErrorType t) {
    std::string out = word;
    std::uniform_int_distribution<std::size_t> pos(0, out.size() - 1);
    std::uniform_int_distribution<int> letter(0, 25);
    switch (t) {
        case ErrorType::T1Substitution: {
            std::size_t i = pos(rng);
            char old = out[i];
            do out[i] = char('a' + letter(rng));
            while (out[i] == old);
            break;
        }
        case ErrorType::T2OmissionAddition: {
            if (rng() % 2 == 0 && out.size() > 3) {
                out.erase(pos(rng), 1);
            } else {
                std::uniform_int_distribution<std::size_t> ins(0, out.size());
                out.insert(ins(rng), 1, char('a' + letter(rng)));
            }
            break;
        }
        case ErrorType::T3Transposition: {
            if (out.size() < 2) break;
            std::uniform_int_distribution<std::size_t> p(0, out.size() - 2);
            std::size_t i = p(rng);
            std::swap(out[i], out[i + 1]);
            break;
        }
        case ErrorType::T4Suffix: {
            static const char* suffixes[] = {"s", "ed", "ing", "ment", "ness", "ful"};
            out += suffixes[rng() % 6];
            break;
        }
    }
    return out;
}

struct AccuracyRow {
    ErrorType type{};
    std::size_t samples = 0;
    std::size_t preserved = 0;
    double rate() const { return samples ? 100.0 * double(preserved) / double(samples) : 0; }
};

inline std::vector<AccuracyRow> bench_accuracy(const LshFamily& fam,
                                               const std::vector<std::string>& dictionary,
                                               std::size_t sample_size,
                                               std::uint64_t seed) {
    if (dictionary.size() < sample_size)
        throw ConfigError("dictionary smaller than requested sample size");
    std::mt19937_64 rng(seed);
    std::vector<AccuracyRow> rows;
    for (ErrorType t : {ErrorType::T1Substitution, ErrorType::T2OmissionAddition,
                        ErrorType::T3Transposition, ErrorType::T4Suffix}) {
        AccuracyRow row;
        row.type = t;
        std::uniform_int_distribution<std::size_t> pick(0, dictionary.size() - 1);
        for (std::size_t i = 0; i < sample_size; ++i) {
            const std::string& word = dictionary[pick(rng)];
            std::string bad = mutate_keyword(rng, word, t);
            ++row.samples;
            if (fuzzify(fam, word) == fuzzify(fam, bad)) ++row.preserved;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// LSH calibration: per-function collision rates for near pairs (Euclidean
// distance <= sqrt(3), i.e. 1-3 differing slots) and far pairs (independent
// uniform vectors, distance >= 2 with overwhelming probability).
// ---------------------------------------------------------------------------

struct CalibrationResult {
    std::size_t pairs = 0;
    double near_collision = 0;  // mean per-function collision rate, near pairs
    double far_collision = 0;   // same, far pairs
};

inline CalibrationResult lsh_calibrate(const LshFamily& fam, std::size_t pairs,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> slot(0, kUnigramDims - 1);
    std::uniform_int_distribution<int> flips(1, 3);
    auto random_vec = [&] {
        UnigramVector v{};
        for (auto& b : v) b = std::uint8_t(rng() & 1);
        return v;
    };
    std::uint64_t near_hits = 0, far_hits = 0, near_total = 0, far_total = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
        UnigramVector a = random_vec();
        UnigramVector b = a;
        int n = flips(rng);
        std::set<std::size_t> touched;
        while (int(touched.size()) < n) touched.insert(slot(rng));
        for (std::size_t i : touched) b[i] ^= 1;
        for (int t = 0; t < fam.k(); ++t) {
            ++near_total;
            if (fam.bucket_of(t, a) == fam.bucket_of(t, b)) ++near_hits;
        }
        UnigramVector c = random_vec(), d = random_vec();
        for (int t = 0; t < fam.k(); ++t) {
            ++far_total;
            if (fam.bucket_of(t, c) == fam.bucket_of(t, d)) ++far_hits;
        }
    }
    CalibrationResult res;
    res.pairs = pairs;
    res.near_collision = double(near_hits) / double(near_total);
    res.far_collision = double(far_hits) / double(far_total);
    return res;
}

// ---------------------------------------------------------------------------
// Scaling: corpora of growing size with two planted query keywords in fixed
// documents, so the result size stays constant while n grows. Reports the
// counters the complexity criteria are stated over.
// ---------------------------------------------------------------------------

struct ScalingPoint {
    std::size_t n = 0;
    std::size_t ap_length = 0;
    std::uint64_t probes = 0;
    std::size_t result_size = 0;
    std::uint64_t verify_recomputes = 0;
    std::uint64_t verify_checks = 0;
    double search_ms = 0;
};

inline ScalingPoint scaling_point(const std::string& work_dir, std::size_t n,
                                  int height, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(work_dir);
    Config cfg;
    // Keys derived from the run seed so the benchmark is reproducible.
    cfg.master_key_hex = to_hex(prf(MasterKey{}, "bench-key", std::to_string(seed)));
    cfg.lsh_seed_hex = to_hex(prf(MasterKey{}, "bench-seed", std::to_string(seed)));
    cfg.height = height;
    cfg.index_path = work_dir + "/dvfs.index";
    cfg.ledger_path = work_dir + "/dvfs.ledger";
    cfg.repo_path = work_dir + "/dvfs.repo";
    cfg.store_dir = work_dir + "/docs";
    cfg.validate();
    Service svc(cfg);

    CorpusGen gen(seed, 400);
    // Two reserved words planted into the same three documents regardless
    // of n: the query's result set never changes size.
    const std::string planted_a = "zanvexorilum";
    const std::string planted_b = "qofudrimakel";
    const std::vector<std::uint64_t> planted_docs = {3, 9, 17};
    for (std::uint64_t id = 0; id < n; ++id) {
        std::string text = gen.document(20, 40);
        for (std::uint64_t pd : planted_docs)
            if (id == pd) text += " " + planted_a + " " + planted_b;
        svc.add_document(id, text);
    }

    auto t0 = std::chrono::steady_clock::now();
    SearchResponse resp = svc.run_search({planted_a, planted_b});
    auto t1 = std::chrono::steady_clock::now();
    VerifyReport rep = svc.run_verify(resp);

    ScalingPoint pt;
    pt.n = n;
    pt.ap_length = resp.transcript.main.ap.size() + resp.transcript.shadow.ap.size();
    pt.probes = resp.transcript.probe_count;
    pt.result_size = resp.transcript.results.size();
    pt.verify_recomputes = rep.digest_recomputes;
    pt.verify_checks = rep.structural_checks;
    pt.search_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return pt;
}

/// Least-squares fit y = c1 + c2 * x; returns max relative residual.
inline double fit_residual(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    double c2 = (n * sxy - sx * sy) / denom;
    double c1 = (sy - c2 * sx) / n;
    double worst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pred = c1 + c2 * x[i];
        worst = std::max(worst, std::abs(pred - y[i]) / std::max(1.0, std::abs(y[i])));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Adversary harness: corrupt the document store (or the returned response)
// and report what the verifier says.
// ---------------------------------------------------------------------------

enum class AdversaryMode { TamperDoc, DropResult, StaleDoc, None };

inline AdversaryMode adversary_mode_from(const std::string& s) {
    if (s == "tamper-doc") return AdversaryMode::TamperDoc;
    if (s == "drop-result") return AdversaryMode::DropResult;
    if (s == "stale-doc") return AdversaryMode::StaleDoc;
    if (s == "none") return AdversaryMode::None;
    throw ConfigError("unknown adversary mode: " + s);
}

/// Runs a search for `query`, applies the corruption, verifies. The system
/// must already contain at least one matching document.
inline VerifyReport run_adversary(Service& svc, const std::vector<std::string>& query,
                                  AdversaryMode mode, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SearchResponse resp = svc.run_search(query);
    if (resp.transcript.results.empty())
        throw ContractViolation("adversary harness needs a non-empty result set");
    std::uniform_int_distribution<std::size_t> pick(0, resp.ciphertexts.size() - 1);
    std::size_t victim = pick(rng);
    std::uint64_t doc = resp.ciphertexts[victim].doc_id;

    switch (mode) {
        case AdversaryMode::TamperDoc: {
            svc.store().tamper(doc, rng() % 64);
            resp.ciphertexts[victim] = svc.store().get(doc);
            break;
        }
        case AdversaryMode::DropResult: {
            resp.ciphertexts.erase(resp.ciphertexts.begin() +
                                   std::ptrdiff_t(victim));
            break;
        }
        case AdversaryMode::StaleDoc: {
            // Replace with a ciphertext of different (older) content.
            Ciphertext stale =
                encrypt_doc(svc.master_key(), doc, bytes_of("stale superseded content"));
            svc.store().replace(stale);
            resp.ciphertexts[victim] = stale;
            break;
        }
        case AdversaryMode::None: break;
    }
    return svc.run_verify(resp);
}

}  // namespace dvfs
