#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dvfs/crypto.hpp"
#include "dvfs/index.hpp"
#include "dvfs/search.hpp"

namespace dvfs {

enum class FailureKind {
    None,
    DigestMismatch,
    TreeMalformed,
    MissingBranch,
    ResultSetMismatch,
    CoverageGap,
};

inline const char* to_string(FailureKind k) {
    switch (k) {
        case FailureKind::None: return "none";
        case FailureKind::DigestMismatch: return "digest-mismatch";
        case FailureKind::TreeMalformed: return "tree-malformed";
        case FailureKind::MissingBranch: return "missing-branch";
        case FailureKind::ResultSetMismatch: return "result-set-mismatch";
        case FailureKind::CoverageGap: return "coverage-gap";
    }
    return "?";
}

struct VerifyReport {
    int verdict = 0;  // 1 iff failure_kind == None
    FailureKind failure_kind = FailureKind::None;
    std::string offending_item;  // path or doc_id
    std::uint64_t digest_recomputes = 0;
    std::uint64_t structural_checks = 0;
};

struct VerifyInput {
    SearchTranscript transcript;
    std::vector<Ciphertext> returned_ciphertexts;  // E, one per doc in R
};

namespace detail {

inline bool fail(VerifyReport& rep, FailureKind kind, std::string item) {
    rep.verdict = 0;
    rep.failure_kind = kind;
    rep.offending_item = std::move(item);
    return false;
}

// Reconstruct the search tree from one pass's proof list and check it is
// exactly the canonical pre-order frontier of the claimed matches.
inline bool check_pass(const TreePass& pass, int L, VerifyReport& rep) {
    std::map<PathCode, int> bits;
    for (const auto& e : pass.ap) {
        ++rep.structural_checks;
        if (!bits.emplace(e.path, e.bit).second)
            return fail(rep, FailureKind::TreeMalformed, "duplicate " + e.path);
    }
    if (pass.ap.empty() || !bits.count(PathCode{}))
        return fail(rep, FailureKind::TreeMalformed, "missing root");

    for (const auto& [path, bit] : bits) {
        if (path.empty()) continue;
        PathCode parent = path.substr(0, path.size() - 1);
        auto it = bits.find(parent);
        if (it == bits.end())
            return fail(rep, FailureKind::TreeMalformed, "orphan node " + path);
        // No node may appear below a non-matching terminal.
        if (it->second == 0)
            return fail(rep, FailureKind::CoverageGap, "node below 0-node: " + path);
    }

    // Every matched non-leaf must have both children examined.
    for (const auto& [path, bit] : bits) {
        if (bit != 1 || int(path.size()) >= L - 1) continue;
        if (!bits.count(path + '0') || !bits.count(path + '1'))
            return fail(rep, FailureKind::MissingBranch,
                        "unexplored child of " + (path.empty() ? "(root)" : path));
    }

    // Canonical pre-order: node before children, '0' child before '1'.
    std::vector<PathCode> stack{PathCode{}};
    std::size_t pos = 0;
    while (!stack.empty()) {
        PathCode expect = stack.back();
        stack.pop_back();
        if (pos >= pass.ap.size() || pass.ap[pos].path != expect)
            return fail(rep, FailureKind::TreeMalformed, "order at " + expect);
        if (pass.ap[pos].bit == 1 && int(expect.size()) < L - 1) {
            stack.push_back(expect + '1');
            stack.push_back(expect + '0');
        }
        ++pos;
    }
    if (pos != pass.ap.size())
        return fail(rep, FailureKind::TreeMalformed, "trailing proof entries");

    // Matched leaves, claimed results and digests must line up one-to-one.
    std::set<std::uint64_t> matched_leaves;
    for (const auto& [path, bit] : bits)
        if (bit == 1 && int(path.size()) == L - 1) matched_leaves.insert(doc_id_of(path));
    if (matched_leaves != pass.results)
        return fail(rep, FailureKind::ResultSetMismatch, "leaf/result mismatch");

    // Digests must come only from matched leaves. The shadow tree may match
    // leaves that were never ingested as documents and so carry no digest;
    // the main pass additionally requires full coverage (checked by caller).
    std::set<PathCode> digest_paths;
    for (const auto& [p, dig] : pass.digests) digest_paths.insert(p);
    std::set<PathCode> expect_paths;
    for (std::uint64_t d : pass.results) expect_paths.insert(path_of(d, L));
    if (digest_paths.size() != pass.digests.size() ||
        !std::includes(expect_paths.begin(), expect_paths.end(), digest_paths.begin(),
                       digest_paths.end()))
        return fail(rep, FailureKind::ResultSetMismatch, "digest/leaf mismatch");
    return true;
}

}  // namespace detail

/// Completeness: the proof lists must reconstruct exactly the search trees,
/// and the final result set must be the main matches minus the effective
/// deletions derivable from the per-leaf version maxima.
inline VerifyReport verify_completeness(const SearchTranscript& t, int L) {
    VerifyReport rep;
    rep.verdict = 1;
    if (!detail::check_pass(t.main, L, rep)) return rep;

    // Main-tree digests are mandatory for every matched leaf.
    std::set<PathCode> digest_paths;
    for (const auto& [p, dig] : t.main.digests) digest_paths.insert(p);
    for (std::uint64_t d : t.main.results) {
        ++rep.structural_checks;
        if (!digest_paths.count(path_of(d, L))) {
            detail::fail(rep, FailureKind::ResultSetMismatch,
                         "missing digest for doc " + std::to_string(d));
            return rep;
        }
    }

    if (!detail::check_pass(t.shadow, L, rep)) return rep;

    // Recompute the effective deletion set from the version maxima.
    std::set<std::uint64_t> deleted;
    for (std::uint64_t doc : t.main.results) {
        ++rep.structural_checks;
        auto mit = t.main.max_versions.find(doc);
        if (mit == t.main.max_versions.end()) {
            detail::fail(rep, FailureKind::TreeMalformed,
                         "no version record for doc " + std::to_string(doc));
            return rep;
        }
        auto sit = t.shadow.max_versions.find(doc);
        if (sit == t.shadow.max_versions.end()) continue;
        const auto& mv = mit->second;
        const auto& sv = sit->second;
        if (mv.size() != sv.size()) {
            detail::fail(rep, FailureKind::TreeMalformed,
                         "version arity mismatch for doc " + std::to_string(doc));
            return rep;
        }
        for (std::size_t i = 0; i < mv.size(); ++i)
            if (sv[i] >= mv[i]) {
                deleted.insert(doc);
                break;
            }
    }
    if (deleted != t.deleted) {
        detail::fail(rep, FailureKind::ResultSetMismatch, "deletion set mismatch");
        return rep;
    }
    std::set<std::uint64_t> expect_final;
    for (std::uint64_t d : t.main.results)
        if (!deleted.count(d)) expect_final.insert(d);
    if (expect_final != t.results)
        detail::fail(rep, FailureKind::ResultSetMismatch, "final result set mismatch");
    return rep;
}

/// Correctness: recompute each returned ciphertext's leaf digest and compare
/// with the search-derived digest for that leaf.
inline VerifyReport verify_correctness(const MasterKey& key, const SearchTranscript& t,
                                       const std::vector<Ciphertext>& returned) {
    VerifyReport rep;
    rep.verdict = 1;

    std::map<std::uint64_t, const Ciphertext*> by_doc;
    for (const auto& ct : returned) {
        if (!by_doc.emplace(ct.doc_id, &ct).second) {
            detail::fail(rep, FailureKind::ResultSetMismatch,
                         "duplicate ciphertext " + std::to_string(ct.doc_id));
            return rep;
        }
    }
    if (by_doc.size() != t.results.size()) {
        detail::fail(rep, FailureKind::ResultSetMismatch, "ciphertext count mismatch");
        return rep;
    }

    std::map<PathCode, PrfOutput> search_digests;
    for (const auto& [p, dig] : t.main.digests) search_digests[p] = dig;

    for (std::uint64_t doc : t.results) {
        auto it = by_doc.find(doc);
        if (it == by_doc.end()) {
            detail::fail(rep, FailureKind::ResultSetMismatch,
                         "missing ciphertext " + std::to_string(doc));
            return rep;
        }
        PathCode leaf = path_of(doc, t.height);
        auto dit = search_digests.find(leaf);
        if (dit == search_digests.end()) {
            detail::fail(rep, FailureKind::ResultSetMismatch,
                         "no search digest for doc " + std::to_string(doc));
            return rep;
        }
        ++rep.digest_recomputes;
        PrfOutput recomputed = EncryptedIndex::leaf_digest(key, leaf, *it->second);
        if (recomputed != dit->second) {
            detail::fail(rep, FailureKind::DigestMismatch, std::to_string(doc));
            return rep;
        }
    }
    return rep;
}

/// Full verification: completeness first (a malformed tree makes digest
/// claims meaningless), then correctness. Verdict 1 iff both pass.
inline VerifyReport verify(const MasterKey& key, const VerifyInput& input, int L) {
    VerifyReport rep = verify_completeness(input.transcript, L);
    if (rep.verdict != 1) return rep;
    VerifyReport corr =
        verify_correctness(key, input.transcript, input.returned_ciphertexts);
    corr.structural_checks += rep.structural_checks;
    return corr;
}

}  // namespace dvfs
