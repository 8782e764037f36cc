#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dvfs/bytes.hpp"
#include "dvfs/crypto.hpp"
#include "dvfs/fuzzy.hpp"
#include "dvfs/index.hpp"
#include "dvfs/version.hpp"

namespace dvfs {

struct QueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trapdoor {
    std::vector<PrfOutput> tokens;  // one per query keyword
};

/// Current-version tokens for the query keywords. Marks each keyword's
/// local-repository entry as queried; unseen keywords start at version 0.
inline Trapdoor trapgen(LocalRepo& lr, const MasterKey& key, const LshFamily& fam,
                        const std::vector<std::string>& query) {
    if (query.empty()) throw QueryError("empty query");
    Trapdoor tk;
    tk.tokens.reserve(query.size());
    for (const auto& word : query) {
        BucketString s = fuzzify(fam, word);
        LocalRepoEntry& e = lr.get_or_create(s);
        tk.tokens.push_back(versioned_token(key, s, e.version));
        e.queried = true;
    }
    return tk;
}

struct ApEntry {
    PathCode path;
    int bit = 0;  // 1 = all (main) / any (shadow) keywords matched here
    bool operator==(const ApEntry&) const = default;
};

/// One tree traversal's worth of evidence: visited nodes in pre-order,
/// matched leaves, their digests, and per-leaf max matched version per
/// query keyword (-1 when the keyword had no surviving token).
struct TreePass {
    std::vector<ApEntry> ap;
    std::set<std::uint64_t> results;
    std::vector<std::pair<PathCode, PrfOutput>> digests;
    std::map<std::uint64_t, std::vector<int>> max_versions;
};

struct SearchTranscript {
    int height = 0;
    std::size_t keyword_count = 0;
    TreePass main;
    TreePass shadow;
    std::set<std::uint64_t> deleted;  // R_treeB: effectively deleted docs
    std::set<std::uint64_t> results;  // final R = R_main \ R_treeB
    std::uint64_t probe_count = 0;
};

namespace detail {

// Surviving token indices per keyword; copied on descend so that pruning
// in one subtree never suppresses matches in a sibling subtree.
using Surviving = std::vector<std::vector<std::size_t>>;

struct SearchCtx {
    const EncryptedIndex& index;
    const std::vector<std::vector<PrfOutput>>& histories;
    TreeTag tag;
    bool conjunctive;
    TreePass& pass;
};

inline void descend(SearchCtx& ctx, const PathCode& path, const Surviving& parent) {
    Surviving alive(parent.size());
    bool ok = ctx.conjunctive;
    for (std::size_t i = 0; i < parent.size(); ++i) {
        for (std::size_t j : parent[i])
            if (ctx.index.contains(ctx.tag, path, ctx.histories[i][j]))
                alive[i].push_back(j);
        if (ctx.conjunctive)
            ok = ok && !alive[i].empty();
        else
            ok = ok || !alive[i].empty();
    }

    ctx.pass.ap.push_back({path, ok ? 1 : 0});
    if (!ok) return;

    const int L = ctx.index.height();
    if (int(path.size()) == L - 1) {
        std::uint64_t doc = doc_id_of(path);
        ctx.pass.results.insert(doc);
        std::vector<int> maxv(parent.size(), -1);
        for (std::size_t i = 0; i < alive.size(); ++i) {
            std::size_t p = ctx.histories[i].size();
            for (std::size_t j : alive[i])
                maxv[i] = std::max(maxv[i], int(p - 1 - j));
        }
        ctx.pass.max_versions[doc] = std::move(maxv);
        auto d = ctx.index.digest(path);
        if (ctx.tag == TreeTag::Main) {
            if (!d)
                throw CorruptionError("missing digest for matched leaf " + path);
            ctx.pass.digests.emplace_back(path, *d);
        } else if (d) {
            ctx.pass.digests.emplace_back(path, *d);
        }
        return;
    }
    descend(ctx, path + '0', alive);
    descend(ctx, path + '1', alive);
}

inline TreePass run_pass(const EncryptedIndex& index,
                         const std::vector<std::vector<PrfOutput>>& histories,
                         TreeTag tag, bool conjunctive) {
    TreePass pass;
    Surviving all(histories.size());
    for (std::size_t i = 0; i < histories.size(); ++i)
        for (std::size_t j = 0; j < histories[i].size(); ++j) all[i].push_back(j);
    SearchCtx ctx{index, histories, tag, conjunctive, pass};
    detail::descend(ctx, PathCode{}, all);
    return pass;
}

}  // namespace detail

/// Pruned top-down conjunctive search. The shadow (deletion) pass uses
/// any-keyword survival so that a single deleted keyword can knock a
/// document out of a multi-keyword result; a document counts as deleted
/// when, for some keyword, the newest version matched in the shadow tree
/// is at least the newest version matched in the main tree.
inline SearchTranscript search(const EncryptedIndex& index, const ChainRepo& br,
                               const Trapdoor& tk) {
    if (tk.tokens.empty()) throw QueryError("empty trapdoor");

    std::vector<std::vector<PrfOutput>> histories;
    histories.reserve(tk.tokens.size());
    for (const auto& tok : tk.tokens) histories.push_back(resolve_history(br, tok));

    SearchTranscript t;
    t.height = index.height();
    t.keyword_count = tk.tokens.size();
    index.reset_counters();

    t.main = detail::run_pass(index, histories, TreeTag::Main, /*conjunctive=*/true);
    t.shadow = detail::run_pass(index, histories, TreeTag::Delete, /*conjunctive=*/false);

    for (std::uint64_t doc : t.main.results) {
        auto bit = t.shadow.max_versions.find(doc);
        if (bit == t.shadow.max_versions.end()) continue;
        const auto& main_v = t.main.max_versions.at(doc);
        const auto& del_v = bit->second;
        for (std::size_t i = 0; i < main_v.size(); ++i) {
            if (del_v[i] >= main_v[i]) {
                t.deleted.insert(doc);
                break;
            }
        }
    }
    for (std::uint64_t doc : t.main.results)
        if (!t.deleted.count(doc)) t.results.insert(doc);

    t.probe_count = index.probes();
    return t;
}

// --- transcript serialization (line-delimited, ledger- and CLI-friendly) ---

namespace detail {

inline std::string path_str(const PathCode& p) { return p.empty() ? "-" : p; }
inline PathCode str_path(const std::string& s) { return s == "-" ? PathCode{} : s; }

inline void write_pass(std::ostream& out, const TreePass& pass, char which) {
    for (const auto& e : pass.ap)
        out << "A" << which << " " << path_str(e.path) << " " << e.bit << "\n";
    for (std::uint64_t d : pass.results) out << "R" << which << " " << d << "\n";
    for (const auto& [p, dig] : pass.digests)
        out << "D" << which << " " << path_str(p) << " " << to_hex(dig) << "\n";
    for (const auto& [doc, vs] : pass.max_versions) {
        out << "V" << which << " " << doc;
        for (int v : vs) out << " " << v;
        out << "\n";
    }
}

}  // namespace detail

inline std::string serialize(const SearchTranscript& t) {
    std::ostringstream out;
    out << "DVFS-TRANSCRIPT 1 L=" << t.height << " q=" << t.keyword_count << "\n";
    detail::write_pass(out, t.main, 'M');
    detail::write_pass(out, t.shadow, 'B');
    for (std::uint64_t d : t.deleted) out << "RD " << d << "\n";
    for (std::uint64_t d : t.results) out << "RF " << d << "\n";
    out << "P " << t.probe_count << "\n";
    return out.str();
}

inline SearchTranscript parse_transcript(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty transcript");
    std::istringstream header(line);
    std::string magic, version, lfield, qfield;
    header >> magic >> version >> lfield >> qfield;
    if (magic != "DVFS-TRANSCRIPT" || version != "1" || lfield.rfind("L=", 0) != 0 ||
        qfield.rfind("q=", 0) != 0)
        throw FormatError("bad transcript header");
    SearchTranscript t;
    t.height = std::stoi(lfield.substr(2));
    t.keyword_count = std::stoul(qfield.substr(2));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream rec(line);
        std::string kind;
        rec >> kind;
        auto pass_of = [&](char c) -> TreePass& { return c == 'M' ? t.main : t.shadow; };
        try {
            if (kind == "AM" || kind == "AB") {
                std::string p;
                int bit = 0;
                rec >> p >> bit;
                pass_of(kind[1]).ap.push_back({detail::str_path(p), bit});
            } else if (kind == "RM" || kind == "RB") {
                std::uint64_t d;
                rec >> d;
                pass_of(kind[1]).results.insert(d);
            } else if (kind == "DM" || kind == "DB") {
                std::string p, hex;
                rec >> p >> hex;
                pass_of(kind[1]).digests.emplace_back(detail::str_path(p),
                                                      array_from_hex<32>(hex));
            } else if (kind == "VM" || kind == "VB") {
                std::uint64_t d;
                rec >> d;
                std::vector<int> vs;
                int v;
                while (rec >> v) vs.push_back(v);
                pass_of(kind[1]).max_versions[d] = std::move(vs);
            } else if (kind == "RD") {
                std::uint64_t d;
                rec >> d;
                t.deleted.insert(d);
            } else if (kind == "RF") {
                std::uint64_t d;
                rec >> d;
                t.results.insert(d);
            } else if (kind == "P") {
                rec >> t.probe_count;
            } else {
                throw FormatError("unknown record kind");
            }
            if (rec.fail() && kind != "VM" && kind != "VB")
                throw FormatError("short record");
        } catch (const FormatError&) {
            throw FormatError("malformed transcript record (line " +
                              std::to_string(lineno) + ")");
        }
    }
    return t;
}

}  // namespace dvfs
